// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/mesh.hpp"

#include "magvem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace magvem {

namespace {

int loop_start(const Edge& e, int sign) { return sign > 0 ? e.tail : e.head; }
int loop_end(const Edge& e, int sign) { return sign > 0 ? e.head : e.tail; }

double max_pair_distance(const std::vector<Vec3>& pts, const std::vector<int>& ids) {
  double d = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      d = std::max(d, (pts[ids[i]] - pts[ids[j]]).norm());
  return d;
}

// Degree-2 exact integral of g over a planar polygon: fan from the
// barycenter, edge-midpoint rule on each triangle. Signed areas keep it
// exact for non-convex loops.
template <class F>
double face_integral_deg2(const std::vector<Vec3>& pts, const FaceGeometry& fg, F&& g) {
  double sum = 0.0;
  const std::size_t m = fg.loop.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& a = fg.barycenter;
    const Vec3& b = pts[fg.loop[k]];
    const Vec3& c = pts[fg.loop[(k + 1) % m]];
    const double area = 0.5 * fg.normal.dot((b - a).cross(c - a));
    sum += area / 3.0 * (g(0.5 * (a + b)) + g(0.5 * (b + c)) + g(0.5 * (c + a)));
  }
  return sum;
}

}  // namespace

PolyMesh::PolyMesh(std::vector<Vec3> vertices, std::vector<Edge> edges,
                   std::vector<Face> faces, std::vector<Cell> cells,
                   std::vector<bool> boundary_faces)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      faces_(std::move(faces)),
      cells_(std::move(cells)),
      boundary_faces_(std::move(boundary_faces)) {
  face_cells_.assign(faces_.size(), {});
  for (int c = 0; c < num_cells(); ++c)
    for (const auto& sf : cells_[c].faces)
      if (sf.index >= 0 && sf.index < num_faces())
        face_cells_[sf.index].push_back({c, sf.sign});
  if (boundary_faces_.empty()) {
    boundary_faces_.resize(faces_.size());
    for (int f = 0; f < num_faces(); ++f) boundary_faces_[f] = face_cells_[f].size() == 1;
  }
  if (boundary_faces_.size() != faces_.size())
    throw Error(ErrorKind::TopologyError, "boundary flag count does not match face count");
  for (const auto& e : edges_)
    if (e.tail < 0 || e.head < 0 || e.tail >= num_vertices() || e.head >= num_vertices())
      throw Error(ErrorKind::TopologyError, "edge references a missing vertex");
  for (const auto& f : faces_)
    for (const auto& se : f.edges)
      if (se.index < 0 || se.index >= num_edges() || std::abs(se.sign) != 1)
        throw Error(ErrorKind::TopologyError, "face references a missing edge");
  for (const auto& c : cells_)
    for (const auto& sf : c.faces)
      if (sf.index < 0 || sf.index >= num_faces() || std::abs(sf.sign) != 1)
        throw Error(ErrorKind::TopologyError, "cell references a missing face");
  compute_geometry();
}

void PolyMesh::compute_geometry() {
  edge_lengths_.resize(edges_.size());
  edge_tangents_.resize(edges_.size());
  for (int e = 0; e < num_edges(); ++e) {
    const Vec3 d = vertices_[edges_[e].head] - vertices_[edges_[e].tail];
    edge_lengths_[e] = d.norm();
    edge_tangents_[e] = edge_lengths_[e] > 0 ? Vec3(d / edge_lengths_[e]) : Vec3::Zero();
  }

  face_geometry_.resize(faces_.size());
  for (int f = 0; f < num_faces(); ++f) {
    FaceGeometry& g = face_geometry_[f];
    g.loop.clear();
    for (const auto& se : faces_[f].edges) g.loop.push_back(loop_start(edges_[se.index], se.sign));
    const std::size_t m = g.loop.size();
    if (m < 3) continue;
    const Vec3& o = vertices_[g.loop[0]];
    Vec3 newell = Vec3::Zero();
    for (std::size_t i = 0; i < m; ++i)
      newell += (vertices_[g.loop[i]] - o).cross(vertices_[g.loop[(i + 1) % m]] - o);
    const double two_area = newell.norm();
    g.area = 0.5 * two_area;
    g.normal = two_area > 0 ? Vec3(newell / two_area) : Vec3::Zero();
    Vec3 c0 = Vec3::Zero();
    for (int v : g.loop) c0 += vertices_[v];
    c0 /= static_cast<double>(m);
    Vec3 moment = Vec3::Zero();
    double area_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3& b = vertices_[g.loop[i]];
      const Vec3& c = vertices_[g.loop[(i + 1) % m]];
      const double a = 0.5 * g.normal.dot((b - c0).cross(c - c0));
      moment += a * (c0 + b + c) / 3.0;
      area_sum += a;
    }
    g.barycenter = area_sum != 0.0 ? Vec3(moment / area_sum) : c0;
    g.diameter = max_pair_distance(vertices_, g.loop);
  }

  cell_geometry_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    CellGeometry& g = cell_geometry_[c];
    g.vertices.clear();
    g.edges.clear();
    for (const auto& sf : cells_[c].faces) {
      for (int v : face_geometry_[sf.index].loop) g.vertices.push_back(v);
      for (const auto& se : faces_[sf.index].edges) g.edges.push_back(se.index);
    }
    std::sort(g.vertices.begin(), g.vertices.end());
    g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    if (g.vertices.empty()) continue;

    const Vec3 o = vertices_[g.vertices.front()];
    double volume = 0.0;
    Vec3 first = Vec3::Zero();
    for (const auto& sf : cells_[c].faces) {
      const FaceGeometry& fg = face_geometry_[sf.index];
      const Vec3 n = sf.sign * fg.normal;
      volume += fg.area * n.dot(fg.barycenter - o) / 3.0;
      for (int i = 0; i < 3; ++i) {
        const double sq = face_integral_deg2(vertices_, fg, [&](const Vec3& x) {
          const double t = x[i] - o[i];
          return t * t;
        });
        first[i] += 0.5 * n[i] * sq;
      }
    }
    g.volume = volume;
    g.barycenter = volume != 0.0 ? Vec3(o + first / volume) : o;
    g.diameter = max_pair_distance(vertices_, g.vertices);
  }
}

std::vector<bool> PolyMesh::boundary_edges() const {
  std::vector<bool> out(edges_.size(), false);
  for (int f = 0; f < num_faces(); ++f)
    if (boundary_faces_[f])
      for (const auto& se : faces_[f].edges) out[se.index] = true;
  return out;
}

std::vector<bool> PolyMesh::boundary_vertices() const {
  std::vector<bool> out(vertices_.size(), false);
  for (int f = 0; f < num_faces(); ++f)
    if (boundary_faces_[f])
      for (int v : face_geometry_[f].loop) out[v] = true;
  return out;
}

double PolyMesh::mean_cell_diameter() const {
  if (cells_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& g : cell_geometry_) s += g.diameter;
  return s / static_cast<double>(cells_.size());
}

// ---------------------------------------------------------------------------
// MeshBuilder

std::size_t MeshBuilder::KeyHash::operator()(const std::vector<int>& k) const noexcept {
  std::size_t h = k.size();
  for (int v : k) h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t MeshBuilder::PairHash::operator()(const std::pair<int, int>& k) const noexcept {
  return std::hash<long long>{}((static_cast<long long>(k.first) << 32) ^
                                static_cast<unsigned>(k.second));
}

MeshBuilder::MeshBuilder(std::vector<Vec3> vertices) : vertices_(std::move(vertices)) {}

int MeshBuilder::find_or_add_edge(int a, int b) {
  const auto key = std::minmax(a, b);
  auto it = edge_index_.find({key.first, key.second});
  if (it != edge_index_.end()) return it->second;
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({key.first, key.second});
  edge_index_.emplace(std::pair<int, int>{key.first, key.second}, id);
  return id;
}

void MeshBuilder::add_cell(const std::vector<std::vector<int>>& outward_loops, int subdomain) {
  Cell cell;
  cell.subdomain = subdomain;
  for (const auto& loop : outward_loops) {
    if (loop.size() < 3)
      throw Error(ErrorKind::TopologyError, "face loop with fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= static_cast<int>(vertices_.size()))
        throw Error(ErrorKind::TopologyError, "face loop references a missing vertex");
    std::vector<int> key = loop;
    std::sort(key.begin(), key.end());
    auto it = face_index_.find(key);
    if (it == face_index_.end()) {
      Face face;
      const std::size_t m = loop.size();
      for (std::size_t i = 0; i < m; ++i) {
        const int a = loop[i];
        const int b = loop[(i + 1) % m];
        face.edges.push_back({find_or_add_edge(a, b), a < b ? 1 : -1});
      }
      const int id = static_cast<int>(faces_.size());
      faces_.push_back(std::move(face));
      face_loops_.push_back(loop);
      face_index_.emplace(std::move(key), id);
      cell.faces.push_back({id, 1});
    } else {
      // Same cyclic direction as the stored loop means both cells claim the
      // same normal as outward; validate() reports that.
      const auto& stored = face_loops_[it->second];
      const std::size_t m = stored.size();
      const auto pos = std::find(stored.begin(), stored.end(), loop[0]) - stored.begin();
      const bool same = stored[(pos + 1) % m] == loop[1 % loop.size()];
      cell.faces.push_back({it->second, same ? 1 : -1});
    }
  }
  cells_.push_back(std::move(cell));
}

PolyMesh MeshBuilder::build() && {
  return PolyMesh(std::move(vertices_), std::move(edges_), std::move(faces_), std::move(cells_));
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(const PolyMesh& mesh) {
  ValidationReport report;
  auto fail = [&](std::string inv, std::string detail) {
    report.violations.push_back({std::move(inv), std::move(detail)});
  };
  auto str = [](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
  };

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (ed.tail == ed.head) fail("edge_nondegenerate", str("edge ", e, " has equal endpoints"));
    else if (ed.tail > ed.head)
      fail("edge_orientation", str("edge ", e, " is not oriented tail < head"));
  }

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const FaceGeometry& fg = mesh.face_geometry(f);
    const std::size_t m = face.edges.size();
    if (m < 3) {
      fail("face_loop_closed", str("face ", f, " has fewer than 3 edges"));
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = face.edges[i];
      const auto& b = face.edges[(i + 1) % m];
      if (loop_end(mesh.edge(a.index), a.sign) != loop_start(mesh.edge(b.index), b.sign)) {
        fail("face_loop_closed", str("face ", f, " loop breaks after edge ", a.index));
        break;
      }
    }
    if (!(fg.area > 0.0)) fail("face_area_positive", str("face ", f, " has zero area"));
    double planar = 0.0;
    for (int v : fg.loop) planar = std::max(planar, std::abs(fg.normal.dot(mesh.vertex(v) - fg.barycenter)));
    if (planar > kPlanarityTolerance * fg.diameter)
      fail("face_planar", str("face ", f, " planarity residual ", planar / fg.diameter));

    const auto& refs = mesh.face_cells(f);
    if (refs.empty() || refs.size() > 2) {
      fail("face_cell_count", str("face ", f, " is referenced by ", refs.size(), " cells"));
    } else if (refs.size() == 2 && refs[0].sign == refs[1].sign) {
      fail("face_orientation", str("face ", f, " has equal signs in cells ", refs[0].index,
                                   " and ", refs[1].index));
    }
    const bool single = refs.size() == 1;
    if (!refs.empty() && refs.size() <= 2 && single != mesh.is_boundary_face(f))
      fail("boundary_flags", str("face ", f, " boundary flag disagrees with cell count"));
  }

  report.cells.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cell(c);
    const CellGeometry& cg = mesh.cell_geometry(c);
    // Each cell edge is traversed exactly twice, in opposite directions,
    // by the outward-oriented face loops.
    std::map<int, std::pair<int, int>> use;  // edge -> (count, signed sum)
    Vec3 closure = Vec3::Zero();
    double surface = 0.0;
    for (const auto& sf : cell.faces) {
      const FaceGeometry& fg = mesh.face_geometry(sf.index);
      closure += sf.sign * fg.area * fg.normal;
      surface += fg.area;
      for (const auto& se : mesh.face(sf.index).edges) {
        auto& u = use[se.index];
        u.first += 1;
        u.second += sf.sign * se.sign;
      }
    }
    for (const auto& [e, u] : use) {
      if (u.first != 2 || u.second != 0) {
        fail("cell_orientation", str("cell ", c, " edge ", e, " used ", u.first,
                                     " times with signed sum ", u.second));
        break;
      }
    }
    const double closure_rel = surface > 0 ? closure.norm() / surface : 0.0;
    report.max_closure_residual = std::max(report.max_closure_residual, closure_rel);
    if (closure_rel > 1e-12) fail("cell_closed_surface", str("cell ", c, " residual ", closure_rel));

    const int nv = static_cast<int>(cg.vertices.size());
    const int ne = static_cast<int>(cg.edges.size());
    const int nf = static_cast<int>(cell.faces.size());
    if (ne - (nv - 1) != nf - 1)
      fail("euler_count", str("cell ", c, ": N_e=", ne, " N_v=", nv, " N_f=", nf));
    if (!(cg.volume > 0.0)) fail("cell_volume_positive", str("cell ", c, " volume ", cg.volume));

    CellQuality& q = report.cells[c];
    q.diameter = cg.diameter;
    double min_edge = std::numeric_limits<double>::infinity();
    for (int e : cg.edges) min_edge = std::min(min_edge, mesh.edge_length(e));
    q.min_edge_ratio = cg.diameter > 0 ? min_edge / cg.diameter : 0.0;
    double min_fd = std::numeric_limits<double>::infinity();
    double planar = 0.0;
    double inner = std::numeric_limits<double>::infinity();
    bool star = true;
    for (const auto& sf : cell.faces) {
      const FaceGeometry& fg = mesh.face_geometry(sf.index);
      min_fd = std::min(min_fd, fg.diameter);
      for (int v : fg.loop)
        planar = std::max(planar, std::abs(fg.normal.dot(mesh.vertex(v) - fg.barycenter)) /
                                      std::max(fg.diameter, 1e-300));
      const Vec3 n = sf.sign * fg.normal;
      inner = std::min(inner, n.dot(fg.barycenter - cg.barycenter));
      const std::size_t m = fg.loop.size();
      for (std::size_t k = 0; k < m; ++k) {
        const Vec3 a = fg.barycenter - cg.barycenter;
        const Vec3 b = mesh.vertex(fg.loop[k]) - cg.barycenter;
        const Vec3 d = mesh.vertex(fg.loop[(k + 1) % m]) - cg.barycenter;
        if (sf.sign * a.dot(b.cross(d)) <= 0.0) star = false;
      }
    }
    q.min_face_diameter_ratio = cg.diameter > 0 ? min_fd / cg.diameter : 0.0;
    q.max_planarity_residual = planar;
    q.inner_radius_ratio = cg.diameter > 0 ? inner / cg.diameter : 0.0;
    q.star_shaped_heuristic = star && inner > 0.0;
  }

  // Connectivity of the cell adjacency graph.
  if (mesh.num_cells() > 0) {
    std::vector<bool> seen(mesh.num_cells(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    int count = 1;
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      for (const auto& sf : mesh.cell(c).faces)
        for (const auto& other : mesh.face_cells(sf.index))
          if (!seen[other.index]) {
            seen[other.index] = true;
            ++count;
            queue.push_back(other.index);
          }
    }
    if (count != mesh.num_cells())
      fail("mesh_connected", str(mesh.num_cells() - count, " cells unreachable from cell 0"));
  }
  return report;
}

}  // namespace magvem
