// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Kikuchi saddle-point problem for magnetostatics:
//   [curl H, curl v]_face + [grad p, mu v]_edge = [j_I, curl v]_face
//   [grad q, mu H]_edge                          = 0
// assembled from the local forms, with either tangential Dirichlet data on
// the boundary edges or natural conditions plus a zero-mean constraint on p.

#ifndef MAGVEM_SYSTEM_HPP
#define MAGVEM_SYSTEM_HPP

#include "magvem/localforms.hpp"
#include "magvem/mesh.hpp"
#include "magvem/spaces.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace magvem {

enum class BoundaryCondition { DirichletTangential, Neumann };

/// Only Kikuchi is implemented; the name of the augmented grad-grad variant
/// is reserved.
enum class Formulation { Kikuchi, HGradAugmented };

enum class CurrentInterpolation {
  FaceQuadrature,      ///< int_f j.n_f with the degree-6 face rule
  MatchedCirculation,  ///< C applied to the edge interpolant of the exact H
};

using FieldFunction = std::function<Vec3(const Vec3&)>;
/// Current density; the subdomain of the cell the point is seen from lets
/// piecewise data be evaluated on interfaces.
using CurrentFunction = std::function<Vec3(const Vec3&, int subdomain)>;

struct CaseSpec {
  std::string name;
  std::map<int, double> mu;  ///< relative permeability per subdomain
  std::map<int, std::string> subdomain_names;
  CurrentFunction current;
  std::optional<FieldFunction> exact_field;
  BoundaryCondition bc = BoundaryCondition::DirichletTangential;
  CurrentInterpolation current_interpolation = CurrentInterpolation::FaceQuadrature;
  Formulation formulation = Formulation::Kikuchi;
  double energy_scale = 1.0;  ///< multiplies mu |H|^2 in reported energies
  /// Reference energies per subdomain; may depend on the mesh (e.g. height).
  std::function<std::map<int, double>(const PolyMesh&)> reference_energy;
  std::string reference_label;  ///< "analytic", "external", ...

  double mu_of(int subdomain) const;
  std::string subdomain_name(int subdomain) const;
};

/// int_f j.n_f, averaged over the cells adjacent to f.
FaceField interpolate_current(const CurrentFunction& j, const PolyMesh& mesh);
/// int_e H.t_e with 4-point Gauss.
EdgeField interpolate_field(const FieldFunction& h, const PolyMesh& mesh);
/// j_I according to the case's interpolation rule.
FaceField interpolate_case_current(const CaseSpec& spec, const PolyMesh& mesh);

/// Worker count: VEM_THREADS if set and positive, else hardware concurrency.
int worker_count();
/// Runs body(i) for i in [0, n) on up to `threads` threads.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

/// Local operators of every cell, built in parallel.
std::vector<LocalElementOps> build_local_ops(const PolyMesh& mesh, const CaseSpec& spec,
                                             int threads = 0);

struct SaddleSystem {
  BoundaryCondition bc = BoundaryCondition::DirichletTangential;
  DofLayout layout;

  // Global operators (all DOFs).
  Eigen::SparseMatrix<double> a;       ///< C^T M_face C, N_e x N_e
  Eigen::SparseMatrix<double> bt;      ///< M_edge^mu G, N_e x N_v
  Eigen::SparseMatrix<double> m_edge;  ///< mu-weighted
  Eigen::SparseMatrix<double> m_face;
  IntMatrix grad;
  IntMatrix curl;

  FaceField j_interp;
  EdgeField prescribed;  ///< boundary edge values (Dirichlet); zero elsewhere

  // Reduced block system K x = rhs.
  Eigen::SparseMatrix<double> k;
  Eigen::VectorXd rhs;
  std::vector<int> edge_unknowns;    ///< global edge id per edge unknown
  std::vector<int> vertex_unknowns;  ///< global vertex id per vertex unknown
  bool mean_constraint = false;      ///< trailing Lagrange row for sum p = 0

  double assemble_seconds = 0.0;
};

/// Builds the system. Throws EmptyInterior for a Dirichlet problem without
/// interior edges and NotImplemented for reserved formulations.
SaddleSystem assemble(const CaseSpec& spec, const PolyMesh& mesh,
                      const std::vector<LocalElementOps>& ops);
SaddleSystem assemble(const CaseSpec& spec, const PolyMesh& mesh);

/// Direct: LDL^T of a quasi-definite regularization with iterative
/// refinement on the exact saddle matrix, falling back to sparse LU.
/// Minres: block-diagonal preconditioned MINRES.
enum class SolverKind { Direct, Minres };

struct SolverOptions {
  SolverKind kind = SolverKind::Direct;
  double tolerance = 1e-12;  ///< relative residual of the block system
  int max_iterations = 20000;
  int max_refinements = 5;  ///< LU refinement steps; 4x this for LDL^T
};

struct SolveStats {
  double relative_residual = 0.0;
  int iterations = 0;  ///< Krylov iterations or refinement steps
  double solve_seconds = 0.0;
};

struct Solution {
  EdgeField h;
  VertexField p;
  double lagrange = 0.0;
  SolveStats stats;
};

/// Throws SolverBreakdown when the factorization fails and
/// ToleranceNotReached when the residual stays above the tolerance.
Solution solve(const SaddleSystem& system, const SolverOptions& options = {});

}  // namespace magvem

#endif  // MAGVEM_SYSTEM_HPP
