// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/spaces.hpp"

#include "magvem/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace magvem {

DofLayout DofLayout::of(const PolyMesh& mesh) {
  DofLayout d;
  d.n_vertex = mesh.num_vertices();
  d.n_edge = mesh.num_edges();
  d.n_face = mesh.num_faces();
  d.boundary_vertex = mesh.boundary_vertices();
  d.boundary_edge = mesh.boundary_edges();
  return d;
}

int DofLayout::num_interior_vertices() const {
  return static_cast<int>(std::count(boundary_vertex.begin(), boundary_vertex.end(), false));
}

int DofLayout::num_interior_edges() const {
  return static_cast<int>(std::count(boundary_edge.begin(), boundary_edge.end(), false));
}

IntMatrix grad_op(const PolyMesh& mesh) {
  std::vector<Eigen::Triplet<int>> t;
  t.reserve(2 * mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    t.emplace_back(e, mesh.edge(e).head, 1);
    t.emplace_back(e, mesh.edge(e).tail, -1);
  }
  IntMatrix g(mesh.num_edges(), mesh.num_vertices());
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

IntMatrix curl_op(const PolyMesh& mesh) {
  std::vector<Eigen::Triplet<int>> t;
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (const auto& se : mesh.face(f).edges) t.emplace_back(f, se.index, se.sign);
  IntMatrix c(mesh.num_faces(), mesh.num_edges());
  c.setFromTriplets(t.begin(), t.end());
  return c;
}

IntMatrix div_op(const PolyMesh& mesh) {
  std::vector<Eigen::Triplet<int>> t;
  for (int p = 0; p < mesh.num_cells(); ++p)
    for (const auto& sf : mesh.cell(p).faces) t.emplace_back(p, sf.index, sf.sign);
  IntMatrix d(mesh.num_cells(), mesh.num_faces());
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

EdgeField apply_grad(const IntMatrix& g, const VertexField& q) {
  if (q.size() != g.cols()) throw Error(ErrorKind::InvalidArgument, "vertex field size mismatch");
  return EdgeField(g.cast<double>() * q.values);
}

FaceField apply_curl(const IntMatrix& c, const EdgeField& v) {
  if (v.size() != c.cols()) throw Error(ErrorKind::InvalidArgument, "edge field size mismatch");
  return FaceField(c.cast<double>() * v.values);
}

Eigen::VectorXd apply_div(const IntMatrix& d, const FaceField& psi) {
  if (psi.size() != d.cols()) throw Error(ErrorKind::InvalidArgument, "face field size mismatch");
  return d.cast<double>() * psi.values;
}

ExactSequenceReport exact_sequence_audit(const PolyMesh& mesh, int rank_limit) {
  ExactSequenceReport r;
  const IntMatrix g = grad_op(mesh);
  const IntMatrix c = curl_op(mesh);
  const IntMatrix d = div_op(mesh);
  const IntMatrix cg = c * g;
  const IntMatrix dc = d * c;
  auto all_zero = [](const IntMatrix& m) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (IntMatrix::InnerIterator it(m, k); it; ++it)
        if (it.value() != 0) return false;
    return true;
  };
  r.cg_zero = all_zero(cg);
  r.dc_zero = all_zero(dc);

  for (int p = 0; p < mesh.num_cells(); ++p) {
    const CellGeometry& geo = mesh.cell_geometry(p);
    const int nv = static_cast<int>(geo.vertices.size());
    const int ne = static_cast<int>(geo.edges.size());
    const int nf = static_cast<int>(mesh.cell(p).faces.size());
    if (ne - (nv - 1) != nf - 1) r.euler_failures.push_back(p);
  }

  if (mesh.num_edges() <= rank_limit) {
    r.rank_checked = true;
    const Eigen::MatrixXd gd = Eigen::MatrixXd(g.cast<double>());
    const Eigen::MatrixXd cd = Eigen::MatrixXd(c.cast<double>());
    r.rank_grad = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(gd).rank());
    r.rank_curl = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(cd).rank());
    const int nv = mesh.num_vertices();
    r.rank_ok = r.rank_grad == nv - 1 && mesh.num_edges() - r.rank_curl == nv - 1;
  }
  return r;
}

}  // namespace magvem
