// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Computable L2 projections of the lowest-order virtual element spaces.
//
// Each projection is a dense matrix mapping local DOFs to coefficients in a
// centered, scaled monomial basis:
//   face (P1)^2:  [t1: 1, xi, eta | t2: 1, xi, eta]          (6 rows)
//   cell (P1)^3:  [x: 1, xi, eta, zeta | y: ... | z: ...]     (12 rows)
//   cell (P0)^3:  [x, y, z]                                   (3 rows)
// with face coordinates taken in FaceFrame::of(f) and cell coordinates
// (x - b_P) / h_P.

#ifndef MAGVEM_PROJECTIONS_HPP
#define MAGVEM_PROJECTIONS_HPP

#include "magvem/mesh.hpp"
#include "magvem/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace magvem {

/// Local Gram systems above this condition number are rejected.
inline constexpr double kMaxConditionNumber = 1e12;

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

/// Gram matrix of the face (P1)^2 basis.
Mat6 face_vector_gram(const PolyMesh& mesh, int f);
/// Gram matrix of the cell (P1)^3 basis.
Mat12 cell_vector_gram(const PolyMesh& mesh, int c);

/// Pi_1 grad q from the vertex values of q, in face loop order.
struct FaceNodalProjection {
  FaceFrame frame;
  std::vector<int> vertices;  ///< global ids, loop order
  Eigen::MatrixXd pi1;        ///< 6 x N_v(f)
};

/// Pi_1 v and rot v from the edge moments (global orientation) of the loop.
struct FaceEdgeProjection {
  FaceFrame frame;
  std::vector<int> edges;  ///< global ids, loop order
  Eigen::MatrixXd pi1;     ///< 6 x N_e(f)
  Eigen::RowVectorXd rot;  ///< 1 x N_e(f)
};

/// Pi_0 v from the edge moments of the cell.
struct CellEdgeProjection {
  std::vector<int> edges;  ///< global ids, sorted (CellGeometry::edges)
  Eigen::MatrixXd pi0;     ///< 3 x N_e(P)
};

/// Pi_1 psi, Pi_0 psi and div psi from the face fluxes (global normals).
struct CellFaceProjection {
  std::vector<int> faces;  ///< global ids, in cell face order
  Eigen::MatrixXd pi1;     ///< 12 x N_f(P)
  Eigen::MatrixXd pi0;     ///< 3 x N_f(P)
  Eigen::RowVectorXd div;  ///< 1 x N_f(P)
};

FaceNodalProjection proj_nodal_face(const PolyMesh& mesh, int f);
FaceEdgeProjection proj_edge_face(const PolyMesh& mesh, int f);
CellEdgeProjection proj_edge_cell(const PolyMesh& mesh, int c);
CellFaceProjection proj_face_cell(const PolyMesh& mesh, int c);

/// Evaluates face (P1)^2 coefficients at scaled local coordinates; returns
/// the (t1, t2) components.
Vec2 eval_face_p1(const Eigen::VectorXd& coeffs, const Vec2& s);
/// Evaluates cell (P1)^3 coefficients at scaled cell coordinates.
Vec3 eval_cell_p1(const Eigen::VectorXd& coeffs, const Vec3& s);

}  // namespace magvem

#endif  // MAGVEM_PROJECTIONS_HPP
