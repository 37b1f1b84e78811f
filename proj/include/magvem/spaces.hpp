// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MAGVEM_SPACES_HPP
#define MAGVEM_SPACES_HPP

#include "magvem/mesh.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace magvem {

/// Global numbering of the nodal, edge and face degrees of freedom.
/// Vertex DOFs are nodal values, edge DOFs are moments int_e v.t_e and face
/// DOFs are fluxes int_f psi.n_f, each in mesh index order.
struct DofLayout {
  int n_vertex = 0;
  int n_edge = 0;
  int n_face = 0;
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;

  static DofLayout of(const PolyMesh& mesh);

  int num_interior_vertices() const;
  int num_interior_edges() const;
};

namespace detail {
template <class Tag>
struct TaggedField {
  Eigen::VectorXd values;

  TaggedField() = default;
  explicit TaggedField(Eigen::VectorXd v) : values(std::move(v)) {}
  static TaggedField zero(int n) { return TaggedField(Eigen::VectorXd::Zero(n)); }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};
struct VertexTag {};
struct EdgeTag {};
struct FaceTag {};
}  // namespace detail

using VertexField = detail::TaggedField<detail::VertexTag>;
using EdgeField = detail::TaggedField<detail::EdgeTag>;  ///< edge moments
using FaceField = detail::TaggedField<detail::FaceTag>;  ///< face fluxes

using IntMatrix = Eigen::SparseMatrix<int, Eigen::RowMajor>;

/// (G q)_e = q(head) - q(tail).
IntMatrix grad_op(const PolyMesh& mesh);
/// (C v)_f = sum over the loop of sign * v_e.
IntMatrix curl_op(const PolyMesh& mesh);
/// (D psi)_P = sum over cell faces of sign * psi_f (not divided by |P|).
IntMatrix div_op(const PolyMesh& mesh);

EdgeField apply_grad(const IntMatrix& g, const VertexField& q);
FaceField apply_curl(const IntMatrix& c, const EdgeField& v);
Eigen::VectorXd apply_div(const IntMatrix& d, const FaceField& psi);

struct ExactSequenceReport {
  bool cg_zero = false;
  bool dc_zero = false;
  std::vector<int> euler_failures;  ///< cells violating N_e - (N_v - 1) = N_f - 1
  bool rank_checked = false;        ///< rank checks only run on small meshes
  int rank_grad = -1;
  int rank_curl = -1;
  bool rank_ok = true;  ///< rank(G) = N_v - 1 and dim ker(C) = N_v - 1

  bool ok() const { return cg_zero && dc_zero && euler_failures.empty() && rank_ok; }
};

/// Verifies C G = 0 and D C = 0 in integer arithmetic, the per-cell Euler
/// count and, when N_e <= rank_limit, the kernel dimensions by dense rank.
ExactSequenceReport exact_sequence_audit(const PolyMesh& mesh, int rank_limit = 400);

}  // namespace magvem

#endif  // MAGVEM_SPACES_HPP
