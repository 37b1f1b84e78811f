// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/localforms.hpp"

#include "magvem/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace magvem {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

SpectrumBounds spectrum(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

void require_spd(const Eigen::MatrixXd& m, const char* what, int cell) {
  const SpectrumBounds s = spectrum(m);
  if (!(s.min_eigenvalue > 1e-13 * s.max_eigenvalue)) {
    std::ostringstream os;
    os << what << " of cell " << cell << " is not positive definite (eigenvalues "
       << s.min_eigenvalue << " .. " << s.max_eigenvalue << ")";
    throw Error(ErrorKind::NotSPD, os.str());
  }
}

Eigen::MatrixXd edge_mass(const PolyMesh& mesh, int c, const CellEdgeProjection& proj) {
  const CellGeometry& cg = mesh.cell_geometry(c);
  const int ne = static_cast<int>(proj.edges.size());
  Eigen::MatrixXd t(ne, 3);
  Eigen::VectorXd len(ne);
  for (int i = 0; i < ne; ++i) {
    t.row(i) = mesh.edge_tangent(proj.edges[i]).transpose();
    len(i) = mesh.edge_length(proj.edges[i]);
  }
  Eigen::MatrixXd r = -t * proj.pi0;
  r.diagonal() += len.cwiseInverse();
  const double h2 = cg.diameter * cg.diameter;
  const Eigen::MatrixXd m = cg.volume * proj.pi0.transpose() * proj.pi0 +
                            h2 * r.transpose() * len.asDiagonal() * r;
  return symmetrized(m);
}

Eigen::MatrixXd edge_mass(const PolyMesh& mesh, int c) {
  return edge_mass(mesh, c, proj_edge_cell(mesh, c));
}

Eigen::MatrixXd face_mass(const PolyMesh& mesh, int c, const CellFaceProjection& proj) {
  const CellGeometry& cg = mesh.cell_geometry(c);
  const int nf = static_cast<int>(proj.faces.size());
  Eigen::MatrixXd n(nf, 3);
  Eigen::VectorXd area(nf);
  for (int i = 0; i < nf; ++i) {
    const FaceGeometry& fg = mesh.face_geometry(proj.faces[i]);
    n.row(i) = fg.normal.transpose();
    area(i) = fg.area;
  }
  Eigen::MatrixXd r = -n * proj.pi0;
  r.diagonal() += area.cwiseInverse();
  const Eigen::MatrixXd m = cg.volume * proj.pi0.transpose() * proj.pi0 +
                            cg.diameter * r.transpose() * area.asDiagonal() * r;
  return symmetrized(m);
}

Eigen::MatrixXd face_mass(const PolyMesh& mesh, int c) {
  return face_mass(mesh, c, proj_face_cell(mesh, c));
}

Eigen::MatrixXd weighted_edge_mass(const PolyMesh& mesh, int c, double mu) {
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "permeability " << mu << " in cell " << c;
    throw Error(ErrorKind::NonPositivePermeability, os.str());
  }
  return mu * edge_mass(mesh, c);
}

LocalElementOps build_local_ops(const PolyMesh& mesh, int c, double mu) {
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "permeability " << mu << " in cell " << c;
    throw Error(ErrorKind::NonPositivePermeability, os.str());
  }
  const CellGeometry& cg = mesh.cell_geometry(c);
  LocalElementOps ops;
  ops.cell = c;
  ops.mu = mu;
  ops.h = cg.diameter;
  ops.vertices = cg.vertices;
  ops.edges = cg.edges;
  for (const auto& sf : mesh.cell(c).faces) ops.faces.push_back(sf.index);

  auto local_of = [](const std::vector<int>& sorted, int g) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), g) - sorted.begin());
  };
  const int nv = static_cast<int>(ops.vertices.size());
  const int ne = static_cast<int>(ops.edges.size());
  const int nf = static_cast<int>(ops.faces.size());
  ops.grad = Eigen::MatrixXd::Zero(ne, nv);
  for (int i = 0; i < ne; ++i) {
    const Edge& e = mesh.edge(ops.edges[i]);
    ops.grad(i, local_of(ops.vertices, e.head)) += 1.0;
    ops.grad(i, local_of(ops.vertices, e.tail)) -= 1.0;
  }
  ops.curl = Eigen::MatrixXd::Zero(nf, ne);
  for (int i = 0; i < nf; ++i)
    for (const auto& se : mesh.face(ops.faces[i]).edges)
      ops.curl(i, local_of(ops.edges, se.index)) += se.sign;

  const CellEdgeProjection pe = proj_edge_cell(mesh, c);
  const CellFaceProjection pf = proj_face_cell(mesh, c);
  ops.pi0_edge = pe.pi0;
  ops.pi0_face = pf.pi0;
  ops.m_edge = mu * edge_mass(mesh, c, pe);
  ops.m_face = face_mass(mesh, c, pf);
  require_spd(ops.m_edge, "edge mass", c);
  require_spd(ops.m_face, "face mass", c);
  return ops;
}

}  // namespace magvem
