// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MAGVEM_LOCALFORMS_HPP
#define MAGVEM_LOCALFORMS_HPP

#include "magvem/mesh.hpp"
#include "magvem/projections.hpp"

#include <Eigen/Dense>

#include <vector>

namespace magvem {

/// Local edge scalar product
///   [v, w] = |P| Pi0 v . Pi0 w + h_P^2 sum_e |e| (v_e/|e| - t_e.Pi0 v)(w_e/|e| - t_e.Pi0 w)
/// over the cell edges in CellGeometry::edges order.
Eigen::MatrixXd edge_mass(const PolyMesh& mesh, int c);
Eigen::MatrixXd edge_mass(const PolyMesh& mesh, int c, const CellEdgeProjection& proj);

/// Local face scalar product
///   [psi, phi] = |P| Pi0 psi . Pi0 phi + h_P sum_f |f| (psi_f/|f| - n_f.Pi0 psi)(...)
/// over the cell faces in cell order, fluxes taken along the global normals.
Eigen::MatrixXd face_mass(const PolyMesh& mesh, int c);
Eigen::MatrixXd face_mass(const PolyMesh& mesh, int c, const CellFaceProjection& proj);

/// mu * edge_mass; throws NonPositivePermeability unless mu > 0.
Eigen::MatrixXd weighted_edge_mass(const PolyMesh& mesh, int c, double mu);

/// Throws NotSPD unless the symmetric matrix has a positive spectrum
/// (smallest eigenvalue above 1e-13 of the largest).
void require_spd(const Eigen::MatrixXd& m, const char* what, int cell);

struct SpectrumBounds {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};
SpectrumBounds spectrum(const Eigen::MatrixXd& m);

/// Everything the assembly needs from one cell.
struct LocalElementOps {
  int cell = -1;
  double mu = 1.0;
  double h = 0.0;
  std::vector<int> vertices;  ///< global, sorted
  std::vector<int> edges;     ///< global, sorted
  std::vector<int> faces;     ///< global, cell order
  Eigen::MatrixXd grad;       ///< N_e(P) x N_v(P), local slice of G
  Eigen::MatrixXd curl;       ///< N_f(P) x N_e(P), local slice of C
  Eigen::MatrixXd m_edge;     ///< mu-weighted
  Eigen::MatrixXd m_face;
  Eigen::MatrixXd pi0_edge;   ///< 3 x N_e(P)
  Eigen::MatrixXd pi0_face;   ///< 3 x N_f(P)
};

LocalElementOps build_local_ops(const PolyMesh& mesh, int c, double mu);

}  // namespace magvem

#endif  // MAGVEM_LOCALFORMS_HPP
