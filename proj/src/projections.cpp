// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/projections.hpp"

#include "magvem/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <sstream>

namespace magvem {

namespace {

// Index of m_i * m_j among the face monomials, i, j in {1, xi, eta}.
constexpr int kFaceProduct[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
// Same for the cell monomials, i, j in {1, xi, eta, zeta}.
constexpr int kCellProduct[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
// Exponents of the cell monomials.
constexpr int kCellExponents[kCellMonomials][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                                   {2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0},
                                                   {0, 1, 1}, {0, 0, 2}};

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

void check_conditioning(const Eigen::MatrixXd& a, ErrorKind kind, const char* what, int id) {
  const double k = condition_number(a);
  if (!(k <= kMaxConditionNumber)) {
    std::ostringstream os;
    os << what << " " << id << ": local system condition number " << k;
    throw Error(kind, os.str());
  }
}

// Simpson weights for int_e q m ds with q linear: coefficients on q(a), q(b).
std::pair<double, double> linear_times(double ma, double mm, double mb, double len) {
  return {len / 6.0 * (ma + 2.0 * mm), len / 6.0 * (mb + 2.0 * mm)};
}

struct LoopEdge {
  Vec2 a, b;      // scaled local coordinates of the loop-ordered endpoints
  double length;  // physical length
  Vec2 normal;    // outward unit normal in the face plane
};

std::vector<LoopEdge> loop_edges(const PolyMesh& mesh, int f, const FaceFrame& fr) {
  const auto& loop = mesh.face_geometry(f).loop;
  const std::size_t m = loop.size();
  std::vector<LoopEdge> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i].a = fr.local(mesh.vertex(loop[i]));
    out[i].b = fr.local(mesh.vertex(loop[(i + 1) % m]));
    const Vec2 d = out[i].b - out[i].a;
    out[i].length = fr.h * d.norm();
    out[i].normal = Vec2(d.y(), -d.x()) / d.norm();
  }
  return out;
}

}  // namespace

Mat6 face_vector_gram(const PolyMesh& mesh, int f) {
  const FacePoly mi = face_monomial_integrals(mesh, f);
  Mat6 g = Mat6::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      g(i, j) = mi[kFaceProduct[i][j]];
      g(3 + i, 3 + j) = mi[kFaceProduct[i][j]];
    }
  return g;
}

Mat12 cell_vector_gram(const PolyMesh& mesh, int c) {
  const CellPoly mi = cell_monomial_integrals(mesh, c);
  Mat12 g = Mat12::Zero();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(4 * k + i, 4 * k + j) = mi[kCellProduct[i][j]];
  return g;
}

Vec2 eval_face_p1(const Eigen::VectorXd& c, const Vec2& s) {
  return {c(0) + c(1) * s.x() + c(2) * s.y(), c(3) + c(4) * s.x() + c(5) * s.y()};
}

Vec3 eval_cell_p1(const Eigen::VectorXd& c, const Vec3& s) {
  Vec3 v;
  for (int k = 0; k < 3; ++k)
    v[k] = c(4 * k) + c(4 * k + 1) * s.x() + c(4 * k + 2) * s.y() + c(4 * k + 3) * s.z();
  return v;
}

FaceNodalProjection proj_nodal_face(const PolyMesh& mesh, int f) {
  FaceNodalProjection out;
  out.frame = FaceFrame::of(mesh, f);
  out.vertices = mesh.face_geometry(f).loop;
  const int m = static_cast<int>(out.vertices.size());
  const auto edges = loop_edges(mesh, f, out.frame);
  const double h = out.frame.h;

  // Mean value: 2 int_f q = sum_e (x_f . n_e) int_e q.
  Eigen::RowVectorXd mean_q = Eigen::RowVectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const double lever = h * edges[i].a.dot(edges[i].normal);
    mean_q(i) += 0.25 * lever * edges[i].length;
    mean_q((i + 1) % m) += 0.25 * lever * edges[i].length;
  }

  // rhs for p = e_k m_j: -int_f q div p + int_df q p.n
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(6, m);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) {
      const int row = 3 * k + j;
      if (j == k + 1) rhs.row(row) -= mean_q / h;
      for (int i = 0; i < m; ++i) {
        const auto& e = edges[i];
        const FacePoly fa = face_monomials(e.a), fm = face_monomials(0.5 * (e.a + e.b)),
                       fb = face_monomials(e.b);
        const auto [wa, wb] = linear_times(fa[j], fm[j], fb[j], e.length);
        rhs(row, i) += e.normal[k] * wa;
        rhs(row, (i + 1) % m) += e.normal[k] * wb;
      }
    }

  const Mat6 gram = face_vector_gram(mesh, f);
  check_conditioning(gram, ErrorKind::DegenerateFace, "face", f);
  out.pi1 = gram.ldlt().solve(rhs);
  return out;
}

FaceEdgeProjection proj_edge_face(const PolyMesh& mesh, int f) {
  FaceEdgeProjection out;
  out.frame = FaceFrame::of(mesh, f);
  const Face& face = mesh.face(f);
  const int m = static_cast<int>(face.edges.size());
  for (const auto& se : face.edges) out.edges.push_back(se.index);
  const auto edges = loop_edges(mesh, f, out.frame);
  const double h = out.frame.h;
  const double area = mesh.face_geometry(f).area;
  const FacePoly mi = face_monomial_integrals(mesh, f);

  out.rot.resize(m);
  for (int i = 0; i < m; ++i) out.rot(i) = face.edges[i].sign / area;

  // Test functions h brot(m) for m in {xi, eta, xi^2, xi eta, eta^2}, plus x_f / h.
  Mat6 t = Mat6::Zero();
  t(0, 3) = -1.0;
  t(1, 0) = 1.0;
  t(2, 4) = -2.0;
  t(3, 1) = 1.0;
  t(3, 5) = -1.0;
  t(4, 2) = 2.0;
  t(5, 1) = 1.0;
  t(5, 5) = 1.0;

  // int_f v . brot m = rot v int_f m - sum_e (v.t_e) int_e m ds; the x_f
  // moment of v is zero by definition of the space.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(6, m);
  for (int r = 0; r < 5; ++r) {
    const int mono = r + 1;
    for (int i = 0; i < m; ++i) {
      const auto& e = edges[i];
      const FacePoly fa = face_monomials(e.a), fm = face_monomials(0.5 * (e.a + e.b)),
                     fb = face_monomials(e.b);
      const double edge_int = e.length / 6.0 * (fa[mono] + 4.0 * fm[mono] + fb[mono]);
      rhs(r, i) = h * face.edges[i].sign * (mi[mono] / area - edge_int / e.length);
    }
  }

  const Mat6 sys = t * face_vector_gram(mesh, f);
  check_conditioning(sys, ErrorKind::DegenerateFace, "face", f);
  out.pi1 = sys.fullPivLu().solve(rhs);
  return out;
}

CellEdgeProjection proj_edge_cell(const PolyMesh& mesh, int c) {
  const CellGeometry& cg = mesh.cell_geometry(c);
  if (!(cg.volume > 0.0))
    throw Error(ErrorKind::DegenerateCell, "cell " + std::to_string(c) + " has non-positive volume");
  CellEdgeProjection out;
  out.edges = cg.edges;
  const int ne = static_cast<int>(out.edges.size());
  out.pi0 = Eigen::MatrixXd::Zero(3, ne);
  auto local = [&](int e) {
    return static_cast<int>(std::lower_bound(out.edges.begin(), out.edges.end(), e) -
                            out.edges.begin());
  };

  // int_P v . e_k = sum_f int_f (n x (x_P x q0))^tau . Pi_1 v^tau, q0 = -e_k / 2.
  for (const auto& sf : mesh.cell(c).faces) {
    const FaceEdgeProjection fp = proj_edge_face(mesh, sf.index);
    const Mat6 gram = face_vector_gram(mesh, sf.index);
    const FaceFrame& fr = fp.frame;
    const Vec3 n = sf.sign * fr.normal;
    const Eigen::MatrixXd weighted = gram * fp.pi1;  // 6 x N_e(f)
    for (int k = 0; k < 3; ++k) {
      const Vec3 q0 = -0.5 * Vec3::Unit(k);
      const Vec3 g0 = n.cross((fr.origin - cg.barycenter).cross(q0));
      const Vec3 gx = fr.h * n.cross(fr.t1.cross(q0));
      const Vec3 gy = fr.h * n.cross(fr.t2.cross(q0));
      Eigen::Matrix<double, 1, 6> gamma;
      gamma << g0.dot(fr.t1), gx.dot(fr.t1), gy.dot(fr.t1), g0.dot(fr.t2), gx.dot(fr.t2),
          gy.dot(fr.t2);
      const Eigen::RowVectorXd contrib = gamma * weighted;
      for (int i = 0; i < contrib.size(); ++i) out.pi0(k, local(fp.edges[i])) += contrib(i);
    }
  }
  out.pi0 /= cg.volume;
  return out;
}

CellFaceProjection proj_face_cell(const PolyMesh& mesh, int c) {
  const CellGeometry& cg = mesh.cell_geometry(c);
  if (!(cg.volume > 0.0))
    throw Error(ErrorKind::DegenerateCell, "cell " + std::to_string(c) + " has non-positive volume");
  const Cell& cell = mesh.cell(c);
  const int nf = static_cast<int>(cell.faces.size());
  const double h = cg.diameter;
  const double vol = cg.volume;
  const CellPoly mi = cell_monomial_integrals(mesh, c);

  CellFaceProjection out;
  out.pi0.resize(3, nf);
  out.div.resize(nf);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(12, nf);
  for (int i = 0; i < nf; ++i) {
    const auto& sf = cell.faces[i];
    const FaceGeometry& fg = mesh.face_geometry(sf.index);
    out.faces.push_back(sf.index);
    out.div(i) = sf.sign / vol;
    out.pi0.col(i) = sf.sign * (fg.barycenter - cg.barycenter) / vol;
    const CellPoly fi = cell_monomial_face_integrals(mesh, c, sf.index);
    // int_P psi . h grad m = h (-div psi int_P m + sum_f (psi.n) int_f m)
    for (int r = 0; r < 9; ++r)
      rhs(r, i) = h * sf.sign * (fi[r + 1] / fg.area - mi[r + 1] / vol);
  }

  // Rows 0..8: h grad m for the non-constant monomials; rows 9..11: xi x e_k.
  Mat12 t = Mat12::Zero();
  auto basis = [](int comp, const int* exp) {
    // exp has total degree <= 1
    int j = 0;
    for (int d = 0; d < 3; ++d)
      if (exp[d] == 1) j = d + 1;
    return 4 * comp + j;
  };
  for (int r = 0; r < 9; ++r) {
    const int* e = kCellExponents[r + 1];
    for (int d = 0; d < 3; ++d) {
      if (e[d] == 0) continue;
      int reduced[3] = {e[0], e[1], e[2]};
      reduced[d] -= 1;
      t(r, basis(d, reduced)) += e[d];
    }
  }
  // xi x e_k
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    // (xi x e_k)_a = xi_b, (xi x e_k)_b = -xi_a
    t(9 + k, 4 * a + 1 + b) = 1.0;
    t(9 + k, 4 * b + 1 + a) = -1.0;
  }

  const Mat12 sys = t * cell_vector_gram(mesh, c);
  check_conditioning(sys, ErrorKind::DegenerateCell, "cell", c);
  out.pi1 = sys.fullPivLu().solve(rhs);
  return out;
}

}  // namespace magvem
