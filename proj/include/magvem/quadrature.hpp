// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Integration over edges, planar polygonal faces and polyhedral cells.
//
// Polynomials of degree <= 2 are written in centered, scaled monomials:
//   face:  {1, xi, eta, xi^2, xi*eta, eta^2},  (xi, eta) = frame coords / h_f
//   cell:  {1, xi, eta, zeta, xi^2, xi*eta, xi*zeta, eta^2, eta*zeta, zeta^2},
//          (xi, eta, zeta) = (x - b_P) / h_P
//   edge:  {1, s, s^2}, s = arclength from the tail (unscaled)
// Their integrals are exact. Non-polynomial integrands go through the
// point rules (face_rule / cell_rule / edge_rule) at a requested degree.

#ifndef MAGVEM_QUADRATURE_HPP
#define MAGVEM_QUADRATURE_HPP

#include "magvem/mesh.hpp"

#include <array>
#include <type_traits>
#include <utility>
#include <vector>

namespace magvem {

/// Orthonormal in-plane axes of a face. t1 is the direction of the first
/// loop edge projected onto the face plane; t1 x t2 = normal.
struct FaceFrame {
  Vec3 origin = Vec3::Zero();  ///< face barycenter
  Vec3 t1 = Vec3::UnitX();
  Vec3 t2 = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();
  double h = 1.0;  ///< face diameter

  static FaceFrame of(const PolyMesh& mesh, int f);

  /// Scaled local coordinates (xi, eta).
  Vec2 local(const Vec3& x) const {
    const Vec3 d = x - origin;
    return {t1.dot(d) / h, t2.dot(d) / h};
  }
  Vec3 global(const Vec2& s) const { return origin + h * (s.x() * t1 + s.y() * t2); }
};

inline constexpr int kFaceMonomials = 6;
inline constexpr int kCellMonomials = 10;

using FacePoly = std::array<double, kFaceMonomials>;
using CellPoly = std::array<double, kCellMonomials>;
using EdgePoly = std::array<double, 3>;

/// Values of the face / cell monomials at a scaled point.
FacePoly face_monomials(const Vec2& s);
CellPoly cell_monomials(const Vec3& s);

/// Total degree of monomial i.
int face_monomial_degree(int i);
int cell_monomial_degree(int i);

/// Scaled cell coordinates (x - b_P) / h_P.
Vec3 cell_local(const PolyMesh& mesh, int c, const Vec3& x);

struct QuadPoint {
  Vec3 x;
  double w;
};

/// Fan triangulation from b_f with signed areas. degree <= 2 uses the
/// edge-midpoint rule per triangle, degree <= 7 a collapsed Gauss rule.
std::vector<QuadPoint> face_rule(const PolyMesh& mesh, int f, int degree);

/// Signed tetrahedra (b_P, b_f, p_i, p_i+1). degree <= 2 uses a 4-point rule
/// per tetrahedron, degree <= 9 a collapsed Gauss rule.
std::vector<QuadPoint> cell_rule(const PolyMesh& mesh, int c, int degree);

/// Gauss-Legendre rule with `points` nodes along edge e.
std::vector<QuadPoint> edge_rule(const PolyMesh& mesh, int e, int points);

/// Exact integrals of the face monomials over face f (fan triangulation).
FacePoly face_monomial_integrals(const PolyMesh& mesh, int f);

/// Same integrals through the 2D divergence theorem: for a homogeneous
/// monomial m of degree d, (2 + d) int_f m = sum_e (x_f . n_e) int_e m.
FacePoly face_monomial_integrals_by_divergence(const PolyMesh& mesh, int f);

/// Exact integrals of the cell monomials over cell c, reduced to faces:
/// (3 + d) int_P m = sum_f s_f n_f . (b_f - b_P) int_f m.
CellPoly cell_monomial_integrals(const PolyMesh& mesh, int c);

/// Integrals of the cell monomials of cell c over face f.
CellPoly cell_monomial_face_integrals(const PolyMesh& mesh, int c, int f);

double integrate_face(const PolyMesh& mesh, int f, const FacePoly& p);
double integrate_cell(const PolyMesh& mesh, int c, const CellPoly& p);
double integrate_edge(const PolyMesh& mesh, int e, const EdgePoly& p);

/// Integrates a callable over a point rule.
template <class Rule, class F>
auto integrate(const Rule& rule, F&& g) {
  using R = std::decay_t<decltype(g(rule.front().x))>;
  R sum;
  if constexpr (std::is_arithmetic_v<R>) sum = 0.0;
  else sum = R::Zero();
  for (const auto& q : rule) sum += q.w * g(q.x);
  return sum;
}

/// Gauss-Legendre nodes and weights mapped to [0, 1], n >= 1.
std::vector<std::pair<double, double>> gauss_legendre_unit(int n);

}  // namespace magvem

#endif  // MAGVEM_QUADRATURE_HPP
