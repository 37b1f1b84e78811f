// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/system.hpp"

#include "magvem/errors.hpp"
#include "magvem/quadrature.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace magvem {

namespace {

using Clock = std::chrono::steady_clock;
using Triplets = std::vector<Eigen::Triplet<double>>;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Diagonal preconditioner with externally supplied inverse entries.
class BlockJacobi {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  BlockJacobi() = default;
  template <class M>
  explicit BlockJacobi(const M&) {}
  template <class M>
  BlockJacobi& analyzePattern(const M&) { return *this; }
  template <class M>
  BlockJacobi& factorize(const M&) { return *this; }
  template <class M>
  BlockJacobi& compute(const M&) { return *this; }

  void set_inverse(Eigen::VectorXd inv) { inv_ = std::move(inv); }

  template <class Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    if (inv_.size() != b.size()) return b;
    return inv_.asDiagonal() * b;
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  Eigen::VectorXd inv_;
};

}  // namespace

double CaseSpec::mu_of(int subdomain) const {
  auto it = mu.find(subdomain);
  if (it == mu.end()) {
    if (mu.empty()) return 1.0;
    throw Error(ErrorKind::InvalidArgument,
                "no permeability for subdomain " + std::to_string(subdomain));
  }
  return it->second;
}

std::string CaseSpec::subdomain_name(int subdomain) const {
  auto it = subdomain_names.find(subdomain);
  return it == subdomain_names.end() ? std::to_string(subdomain) : it->second;
}

int worker_count() {
  if (const char* env = std::getenv("VEM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = worker_count();
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_lock);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

FaceField interpolate_current(const CurrentFunction& j, const PolyMesh& mesh) {
  FaceField out = FaceField::zero(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& cells = mesh.face_cells(f);
    if (cells.empty()) continue;
    const Vec3 n = mesh.face_geometry(f).normal;
    const auto rule = face_rule(mesh, f, 6);
    double sum = 0.0;
    for (const auto& sc : cells) {
      const int sub = mesh.cell(sc.index).subdomain;
      sum += integrate(rule, [&](const Vec3& x) { return j(x, sub).dot(n); });
    }
    out[f] = sum / static_cast<double>(cells.size());
  }
  return out;
}

EdgeField interpolate_field(const FieldFunction& h, const PolyMesh& mesh) {
  EdgeField out = EdgeField::zero(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec3 t = mesh.edge_tangent(e);
    out[e] = integrate(edge_rule(mesh, e, 4), [&](const Vec3& x) { return h(x).dot(t); });
  }
  return out;
}

FaceField interpolate_case_current(const CaseSpec& spec, const PolyMesh& mesh) {
  if (spec.current_interpolation == CurrentInterpolation::MatchedCirculation) {
    if (!spec.exact_field)
      throw Error(ErrorKind::InvalidArgument, "matched current interpolation needs an exact field");
    return apply_curl(curl_op(mesh), interpolate_field(*spec.exact_field, mesh));
  }
  if (!spec.current) return FaceField::zero(mesh.num_faces());
  return interpolate_current(spec.current, mesh);
}

std::vector<LocalElementOps> build_local_ops(const PolyMesh& mesh, const CaseSpec& spec,
                                             int threads) {
  std::vector<LocalElementOps> ops(mesh.num_cells());
  parallel_for(mesh.num_cells(), threads, [&](int c) {
    ops[c] = build_local_ops(mesh, c, spec.mu_of(mesh.cell(c).subdomain));
  });
  return ops;
}

SaddleSystem assemble(const CaseSpec& spec, const PolyMesh& mesh) {
  return assemble(spec, mesh, build_local_ops(mesh, spec));
}

SaddleSystem assemble(const CaseSpec& spec, const PolyMesh& mesh,
                      const std::vector<LocalElementOps>& ops) {
  if (spec.formulation != Formulation::Kikuchi)
    throw Error(ErrorKind::NotImplemented, "only the Kikuchi formulation is implemented");
  const auto t0 = Clock::now();
  SaddleSystem sys;
  sys.bc = spec.bc;
  sys.layout = DofLayout::of(mesh);
  sys.grad = grad_op(mesh);
  sys.curl = curl_op(mesh);
  const int ne = mesh.num_edges(), nv = mesh.num_vertices(), nf = mesh.num_faces();

  // Per-cell triplets, concatenated in cell order for a deterministic sum.
  const int nc = mesh.num_cells();
  std::vector<Triplets> ta(nc), tb(nc), tme(nc), tmf(nc);
  parallel_for(nc, 0, [&](int c) {
    const LocalElementOps& o = ops[c];
    Eigen::MatrixXd a = o.curl.transpose() * o.m_face * o.curl;
    a = 0.5 * (a + a.transpose()).eval();
    const Eigen::MatrixXd b = o.m_edge * o.grad;
    const int le = static_cast<int>(o.edges.size());
    const int lv = static_cast<int>(o.vertices.size());
    const int lf = static_cast<int>(o.faces.size());
    for (int i = 0; i < le; ++i) {
      for (int j = 0; j < le; ++j) {
        ta[c].emplace_back(o.edges[i], o.edges[j], a(i, j));
        tme[c].emplace_back(o.edges[i], o.edges[j], o.m_edge(i, j));
      }
      for (int j = 0; j < lv; ++j) tb[c].emplace_back(o.edges[i], o.vertices[j], b(i, j));
    }
    for (int i = 0; i < lf; ++i)
      for (int j = 0; j < lf; ++j) tmf[c].emplace_back(o.faces[i], o.faces[j], o.m_face(i, j));
  });
  auto build = [](int rows, int cols, const std::vector<Triplets>& parts) {
    Triplets all;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total);
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(all.begin(), all.end());
    return m;
  };
  sys.a = build(ne, ne, ta);
  sys.bt = build(ne, nv, tb);
  sys.m_edge = build(ne, ne, tme);
  sys.m_face = build(nf, nf, tmf);

  sys.j_interp = interpolate_case_current(spec, mesh);
  const Eigen::SparseMatrix<double> cd = sys.curl.cast<double>();
  const Eigen::VectorXd r_edge = cd.transpose() * (sys.m_face * sys.j_interp.values);

  sys.prescribed = EdgeField::zero(ne);
  std::vector<int> em(ne, -1), vm(nv, -1);
  const bool dirichlet = spec.bc == BoundaryCondition::DirichletTangential;
  for (int e = 0; e < ne; ++e)
    if (!dirichlet || !sys.layout.boundary_edge[e]) {
      em[e] = static_cast<int>(sys.edge_unknowns.size());
      sys.edge_unknowns.push_back(e);
    }
  if (dirichlet && sys.edge_unknowns.empty())
    throw Error(ErrorKind::EmptyInterior, "no interior edges: the mesh is too coarse");
  const int n_e = static_cast<int>(sys.edge_unknowns.size());
  for (int v = 0; v < nv; ++v)
    if (!dirichlet || !sys.layout.boundary_vertex[v]) {
      vm[v] = n_e + static_cast<int>(sys.vertex_unknowns.size());
      sys.vertex_unknowns.push_back(v);
    }
  if (dirichlet && spec.exact_field) {
    const EdgeField hi = interpolate_field(*spec.exact_field, mesh);
    for (int e = 0; e < ne; ++e)
      if (sys.layout.boundary_edge[e]) sys.prescribed[e] = hi[e];
  }
  sys.mean_constraint = !dirichlet;
  const int n = n_e + static_cast<int>(sys.vertex_unknowns.size()) + (sys.mean_constraint ? 1 : 0);

  sys.rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n_e; ++i) sys.rhs(i) = r_edge(sys.edge_unknowns[i]);
  Triplets tk;
  tk.reserve(sys.a.nonZeros() + 2 * sys.bt.nonZeros() + 2 * nv);
  for (int col = 0; col < sys.a.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.a, col); it; ++it) {
      const int i = em[it.row()], j = em[it.col()];
      if (i < 0) continue;
      if (j >= 0) tk.emplace_back(i, j, it.value());
      else sys.rhs(i) -= it.value() * sys.prescribed[it.col()];
    }
  for (int col = 0; col < sys.bt.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.bt, col); it; ++it) {
      const int i = em[it.row()], j = vm[it.col()];
      if (j < 0) continue;
      if (i >= 0) {
        tk.emplace_back(i, j, it.value());
        tk.emplace_back(j, i, it.value());
      } else {
        sys.rhs(j) -= it.value() * sys.prescribed[it.row()];
      }
    }
  if (sys.mean_constraint)
    for (int v = 0; v < nv; ++v) {
      tk.emplace_back(vm[v], n - 1, 1.0);
      tk.emplace_back(n - 1, vm[v], 1.0);
    }
  sys.k.resize(n, n);
  sys.k.setFromTriplets(tk.begin(), tk.end());
  sys.assemble_seconds = seconds_since(t0);
  return sys;
}

namespace {
// Quasi-definite regularization of the saddle matrix: +delta M_edge on the
// edge block, -delta diag(G^T M G) on the vertex block (and -delta on the
// Lagrange row). Its LDL^T factorization exists for any symmetric ordering;
// iterative refinement against the unregularized matrix recovers the exact
// solution. Returns false if the refinement does not reach the tolerance.
bool solve_quasidefinite(const SaddleSystem& sys, const SolverOptions& options,
                         Eigen::VectorXd& x, SolveStats& stats) {
  constexpr double kDelta = 1e-8;
  const int n = static_cast<int>(sys.k.rows());
  const int n_e = static_cast<int>(sys.edge_unknowns.size());
  const int n_v = static_cast<int>(sys.vertex_unknowns.size());
  std::vector<int> local(sys.layout.n_edge, -1);
  for (int i = 0; i < n_e; ++i) local[sys.edge_unknowns[i]] = i;

  Triplets t;
  for (int k = 0; k < sys.m_edge.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.m_edge, k); it; ++it) {
      const int a = local[it.row()], b = local[it.col()];
      if (a >= 0 && b >= 0) t.emplace_back(a, b, kDelta * it.value());
    }
  const Eigen::SparseMatrix<double> gd = sys.grad.cast<double>();
  const Eigen::SparseMatrix<double> schur = gd.transpose() * sys.bt;
  for (int i = 0; i < n_v; ++i) {
    const int v = sys.vertex_unknowns[i];
    t.emplace_back(n_e + i, n_e + i, -kDelta * schur.coeff(v, v));
  }
  if (sys.mean_constraint) t.emplace_back(n - 1, n - 1, -kDelta);
  Eigen::SparseMatrix<double> reg(n, n);
  reg.setFromTriplets(t.begin(), t.end());
  const Eigen::SparseMatrix<double> kq = sys.k + reg;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(kq);
  if (ldlt.info() != Eigen::Success) return false;
  const double bnorm = sys.rhs.norm();
  Eigen::VectorXd r = sys.rhs;
  for (int step = 0; step < 4 * options.max_refinements; ++step) {
    x += ldlt.solve(r);
    r = sys.rhs - sys.k * x;
    stats.relative_residual = r.norm() / bnorm;
    stats.iterations = step + 1;
    if (!x.allFinite()) return false;
    if (stats.relative_residual <= options.tolerance) return true;
  }
  return false;
}

// Sparse LU with partial pivoting on the saddle matrix itself.
void solve_lu(const SaddleSystem& sys, const SolverOptions& options, Eigen::VectorXd& x,
              SolveStats& stats) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(sys.k);
  lu.factorize(sys.k);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::SolverBreakdown, "sparse LU failed: " + lu.lastErrorMessage());
  const double bnorm = sys.rhs.norm();
  x = lu.solve(sys.rhs);
  Eigen::VectorXd r = sys.rhs - sys.k * x;
  stats.relative_residual = r.norm() / bnorm;
  while (stats.relative_residual > options.tolerance && stats.iterations < options.max_refinements) {
    x += lu.solve(r);
    r = sys.rhs - sys.k * x;
    stats.relative_residual = r.norm() / bnorm;
    ++stats.iterations;
  }
}

}  // namespace

Solution solve(const SaddleSystem& sys, const SolverOptions& options) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(sys.k.rows());
  const double bnorm = sys.rhs.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  SolveStats stats;

  if (bnorm > 0.0) {
    if (options.kind == SolverKind::Direct) {
      if (!solve_quasidefinite(sys, options, x, stats)) {
        x.setZero();
        stats = {};
        solve_lu(sys, options, x, stats);
      }
    } else {
      const int n_e = static_cast<int>(sys.edge_unknowns.size());
      const int n_v = static_cast<int>(sys.vertex_unknowns.size());
      const Eigen::SparseMatrix<double> gd = sys.grad.cast<double>();
      const Eigen::SparseMatrix<double> schur = gd.transpose() * sys.bt;
      Eigen::VectorXd inv(n);
      for (int i = 0; i < n_e; ++i) {
        const int e = sys.edge_unknowns[i];
        inv(i) = 1.0 / (sys.a.coeff(e, e) + sys.m_edge.coeff(e, e));
      }
      for (int i = 0; i < n_v; ++i) {
        const int v = sys.vertex_unknowns[i];
        inv(n_e + i) = 1.0 / schur.coeff(v, v);
      }
      if (sys.mean_constraint) inv(n - 1) = 1.0 / std::max(1, n_v);
      Eigen::MINRES<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, BlockJacobi> minres;
      minres.setMaxIterations(options.max_iterations);
      minres.setTolerance(options.tolerance);
      minres.compute(sys.k);
      minres.preconditioner().set_inverse(inv);
      x = minres.solve(sys.rhs);
      stats.iterations = static_cast<int>(minres.iterations());
      stats.relative_residual = (sys.rhs - sys.k * x).norm() / bnorm;
      if (!x.allFinite()) throw Error(ErrorKind::SolverBreakdown, "MINRES produced non-finite values");
    }
    if (!(stats.relative_residual <= options.tolerance)) {
      std::ostringstream os;
      os << "relative residual " << stats.relative_residual << " above tolerance "
         << options.tolerance;
      throw Error(ErrorKind::ToleranceNotReached, os.str());
    }
  }

  Solution sol;
  sol.h = sys.prescribed;
  sol.p = VertexField::zero(sys.layout.n_vertex);
  const int n_e = static_cast<int>(sys.edge_unknowns.size());
  for (int i = 0; i < n_e; ++i) sol.h[sys.edge_unknowns[i]] = x(i);
  for (std::size_t i = 0; i < sys.vertex_unknowns.size(); ++i)
    sol.p[sys.vertex_unknowns[i]] = x(n_e + static_cast<int>(i));
  if (sys.mean_constraint) sol.lagrange = x(n - 1);
  stats.solve_seconds = seconds_since(t0);
  sol.stats = stats;
  return sol;
}

}  // namespace magvem
