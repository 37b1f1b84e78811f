// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/mesh_generators.hpp"

#include "magvem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace magvem {

namespace {

// Loop rotated to start at its smallest vertex, oriented so that the second
// entry is smaller than the last. Both cells sharing a face agree on it.
std::vector<int> canonical_loop(const std::vector<int>& loop) {
  const std::size_t m = loop.size();
  const auto pos = std::min_element(loop.begin(), loop.end()) - loop.begin();
  std::vector<int> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = loop[(pos + i) % m];
  if (out[1] > out[m - 1]) std::reverse(out.begin() + 1, out.end());
  return out;
}

bool loop_is_planar(const std::vector<Vec3>& pts, const std::vector<int>& loop) {
  const std::vector<int> c = canonical_loop(loop);
  const std::size_t m = c.size();
  if (m == 3) return true;
  const Vec3& o = pts[c[0]];
  Vec3 n = Vec3::Zero();
  Vec3 mean = Vec3::Zero();
  double diam = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    n += (pts[c[i]] - o).cross(pts[c[(i + 1) % m]] - o);
    mean += pts[c[i]];
    for (std::size_t j = i + 1; j < m; ++j) diam = std::max(diam, (pts[c[i]] - pts[c[j]]).norm());
  }
  n.normalize();
  mean /= static_cast<double>(m);
  double r = 0.0;
  for (int v : c) r = std::max(r, std::abs(n.dot(pts[v] - mean)));
  // Half the validation tolerance keeps accepted quads well inside it.
  return r <= 0.5 * kPlanarityTolerance * diam;
}

PolyMesh hex_mesh(int n, const Box& box, double amplitude, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "subdivisions must be >= 1");
  const int np = n + 1;
  auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };
  const Vec3 h = (box.hi - box.lo) / n;
  std::vector<Vec3> pts(static_cast<std::size_t>(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        pts[vid(i, j, k)] = box.lo + Vec3(i * h.x(), j * h.y(), k * h.z());

  if (amplitude != 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int k = 1; k < n; ++k)
      for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
          Vec3& p = pts[vid(i, j, k)];
          for (int d = 0; d < 3; ++d) p[d] += amplitude * h[d] * unit(rng);
        }
  }

  MeshBuilder builder(pts);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int v000 = vid(i, j, k), v100 = vid(i + 1, j, k), v110 = vid(i + 1, j + 1, k),
                  v010 = vid(i, j + 1, k), v001 = vid(i, j, k + 1), v101 = vid(i + 1, j, k + 1),
                  v111 = vid(i + 1, j + 1, k + 1), v011 = vid(i, j + 1, k + 1);
        const std::vector<std::vector<int>> quads = {
            {v000, v010, v110, v100}, {v001, v101, v111, v011}, {v000, v001, v011, v010},
            {v100, v110, v111, v101}, {v000, v100, v101, v001}, {v010, v011, v111, v110}};
        std::vector<std::vector<int>> loops;
        for (const auto& q : quads) {
          if (amplitude == 0.0 || loop_is_planar(pts, q)) {
            loops.push_back(q);
            continue;
          }
          const auto pos = std::min_element(q.begin(), q.end()) - q.begin();
          const int a = q[pos], b = q[(pos + 1) % 4], c = q[(pos + 2) % 4], d = q[(pos + 3) % 4];
          loops.push_back({a, b, c});
          loops.push_back({a, c, d});
        }
        builder.add_cell(loops, 0);
      }
  return std::move(builder).build();
}

double signed_area(const PolygonMesh2D& m, const std::vector<int>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = m.vertices[poly[i]];
    const Vec2& q = m.vertices[poly[(i + 1) % poly.size()]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double d1 = orient(a, b, c), d2 = orient(a, b, d), d3 = orient(c, d, a),
               d4 = orient(c, d, b);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

PolyMesh generate_structured_hex(int n, const Box& box) { return hex_mesh(n, box, 0.0, 0); }

PolyMesh generate_perturbed_hex(int n, const Box& box, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude <= kMaxPerturbation)) {
    std::ostringstream os;
    os << "perturbation amplitude " << amplitude << " outside [0, " << kMaxPerturbation << "]";
    throw Error(ErrorKind::PerturbationRejected, os.str());
  }
  PolyMesh mesh = hex_mesh(n, box, amplitude, seed);
  const ValidationReport report = validate(mesh);
  if (!report.ok())
    throw Error(ErrorKind::PerturbationRejected,
                "perturbed mesh invalid: " + report.violations.front().invariant + " (" +
                    report.violations.front().detail + ")");
  return mesh;
}

void validate_polygon_mesh(const PolygonMesh2D& mesh) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidPolygon2D, msg); };
  if (mesh.polygons.empty()) fail("no polygons");
  if (!mesh.regions.empty() && mesh.regions.size() != mesh.polygons.size())
    fail("region count does not match polygon count");
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t p = 0; p < mesh.polygons.size(); ++p) {
    const auto& poly = mesh.polygons[p];
    const std::string tag = "polygon " + std::to_string(p);
    if (poly.size() < 3) fail(tag + " has fewer than 3 vertices");
    for (int v : poly)
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size())) fail(tag + " references a missing vertex");
    std::vector<int> sorted = poly;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail(tag + " repeats a vertex");
    if (!(signed_area(mesh, poly) > 0.0)) fail(tag + " is not counterclockwise");
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2& a = mesh.vertices[poly[i]];
      const Vec2& b = mesh.vertices[poly[(i + 1) % m]];
      if ((a - b).norm() == 0.0) fail(tag + " has a zero-length edge");
      for (std::size_t j = i + 2; j < m; ++j) {
        if (i == 0 && j == m - 1) continue;
        if (segments_cross(a, b, mesh.vertices[poly[j]], mesh.vertices[poly[(j + 1) % m]]))
          fail(tag + " self-intersects");
      }
      if (++directed[{poly[i], poly[(i + 1) % m]}] > 1) fail(tag + " overlaps a neighbour");
    }
  }
}

PolyMesh generate_extruded(const PolygonMesh2D& mesh2d, const std::vector<double>& z_levels,
                           const SubdomainClassifier& classify) {
  validate_polygon_mesh(mesh2d);
  if (z_levels.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least one layer");
  for (std::size_t k = 1; k < z_levels.size(); ++k)
    if (!(z_levels[k] > z_levels[k - 1]))
      throw Error(ErrorKind::InvalidArgument, "z levels must increase");
  const int nv = static_cast<int>(mesh2d.vertices.size());
  const int nl = static_cast<int>(z_levels.size());
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(nv) * nl);
  for (int k = 0; k < nl; ++k)
    for (const auto& p : mesh2d.vertices) pts.emplace_back(p.x(), p.y(), z_levels[k]);

  MeshBuilder builder(pts);
  for (int k = 0; k + 1 < nl; ++k) {
    for (std::size_t p = 0; p < mesh2d.polygons.size(); ++p) {
      const auto& poly = mesh2d.polygons[p];
      const int m = static_cast<int>(poly.size());
      const int lo = k * nv, hi = (k + 1) * nv;
      std::vector<std::vector<int>> loops;
      std::vector<int> bottom, top;
      for (int i = m - 1; i >= 0; --i) bottom.push_back(lo + poly[i]);
      for (int i = 0; i < m; ++i) top.push_back(hi + poly[i]);
      loops.push_back(bottom);
      loops.push_back(top);
      Vec2 centroid2 = Vec2::Zero();
      for (int i = 0; i < m; ++i) {
        const int a = poly[i], b = poly[(i + 1) % m];
        loops.push_back({lo + a, lo + b, hi + b, hi + a});
        centroid2 += mesh2d.vertices[a];
      }
      centroid2 /= m;
      const int region = mesh2d.regions.empty() ? 0 : mesh2d.regions[p];
      const Vec3 centroid(centroid2.x(), centroid2.y(), 0.5 * (z_levels[k] + z_levels[k + 1]));
      builder.add_cell(loops, classify ? classify(centroid, region) : region);
    }
  }
  return std::move(builder).build();
}

PolyMesh generate_extruded(const PolygonMesh2D& mesh2d, int layers, double height,
                           const SubdomainClassifier& classify) {
  if (layers < 1) throw Error(ErrorKind::InvalidArgument, "layers must be >= 1");
  std::vector<double> z(layers + 1);
  for (int k = 0; k <= layers; ++k) z[k] = height * k / layers;
  return generate_extruded(mesh2d, z, classify);
}

PolygonMesh2D unit_square_polygon() {
  return {{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {{0, 1, 2, 3}}, {0}};
}

PolygonMesh2D regular_polygon(int sides, double radius) {
  if (sides < 3) throw Error(ErrorKind::InvalidPolygon2D, "polygon needs at least 3 sides");
  PolygonMesh2D m;
  std::vector<int> poly;
  for (int i = 0; i < sides; ++i) {
    const double t = 2.0 * std::numbers::pi * i / sides;
    m.vertices.emplace_back(radius * std::cos(t), radius * std::sin(t));
    poly.push_back(i);
  }
  m.polygons.push_back(poly);
  m.regions.push_back(0);
  return m;
}

PolygonMesh2D honeycomb(int rings, double hex_radius) {
  if (rings < 1) throw Error(ErrorKind::InvalidArgument, "rings must be >= 1");
  PolygonMesh2D m;
  std::map<std::pair<long long, long long>, int> index;
  const double snap = 1e-9 * hex_radius;
  auto vertex = [&](const Vec2& p) {
    const std::pair<long long, long long> key{std::llround(p.x() / snap), std::llround(p.y() / snap)};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(p);
    index.emplace(key, id);
    return id;
  };
  const int r = rings - 1;
  for (int q = -r; q <= r; ++q)
    for (int s = -r; s <= r; ++s) {
      if (std::abs(q + s) > r) continue;
      const Vec2 c(std::sqrt(3.0) * hex_radius * (q + 0.5 * s), 1.5 * hex_radius * s);
      std::vector<int> poly;
      for (int i = 0; i < 6; ++i) {
        const double t = std::numbers::pi / 6.0 + std::numbers::pi / 3.0 * i;
        poly.push_back(vertex(c + hex_radius * Vec2(std::cos(t), std::sin(t))));
      }
      m.polygons.push_back(poly);
      m.regions.push_back(std::max({std::abs(q), std::abs(s), std::abs(q + s)}));
    }
  return m;
}

PolygonMesh2D polar_disk(const std::vector<double>& radii, int base_sectors, double arc_factor) {
  if (radii.empty() || !(radii.front() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "radii must be positive");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw Error(ErrorKind::InvalidArgument, "radii must increase");
  if (base_sectors < 3) throw Error(ErrorKind::InvalidArgument, "base_sectors must be >= 3");

  std::vector<int> count(radii.size()), offset(radii.size());
  count[0] = base_sectors;
  for (std::size_t k = 1; k < radii.size(); ++k) {
    count[k] = count[k - 1];
    const double width = radii[k] - radii[k - 1];
    while (2.0 * std::numbers::pi * radii[k] / count[k] > arc_factor * width) count[k] *= 2;
  }
  PolygonMesh2D m;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    offset[k] = static_cast<int>(m.vertices.size());
    for (int j = 0; j < count[k]; ++j) {
      const double t = 2.0 * std::numbers::pi * j / count[k];
      m.vertices.emplace_back(radii[k] * std::cos(t), radii[k] * std::sin(t));
    }
  }
  std::vector<int> center(count[0]);
  for (int j = 0; j < count[0]; ++j) center[j] = j;
  m.polygons.push_back(center);
  m.regions.push_back(0);
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const int ratio = count[k] / count[k - 1];
    for (int s = 0; s < count[k - 1]; ++s) {
      std::vector<int> poly;
      poly.push_back(offset[k - 1] + s);
      for (int j = 0; j <= ratio; ++j) poly.push_back(offset[k] + (ratio * s + j) % count[k]);
      poly.push_back(offset[k - 1] + (s + 1) % count[k - 1]);
      m.polygons.push_back(poly);
      m.regions.push_back(static_cast<int>(k));
    }
  }
  return m;
}

}  // namespace magvem
