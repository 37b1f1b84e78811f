// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/quadrature.hpp"

#include "magvem/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace magvem {

namespace {

constexpr double kTetA = 0.5854101966249685;
constexpr double kTetB = 0.1381966011250105;

double simpson(double fa, double fm, double fb, double length) {
  return length / 6.0 * (fa + 4.0 * fm + fb);
}

void check_face(const PolyMesh& mesh, int f) {
  const FaceGeometry& fg = mesh.face_geometry(f);
  if (!(fg.area > 0.0)) throw Error(ErrorKind::DegenerateFace, "face " + std::to_string(f) + " has zero area");
  for (int v : fg.loop)
    if (std::abs(fg.normal.dot(mesh.vertex(v) - fg.barycenter)) > kPlanarityTolerance * fg.diameter)
      throw Error(ErrorKind::NonPlanarFace, "face " + std::to_string(f) + " is not planar");
}

}  // namespace

std::vector<std::pair<double, double>> gauss_legendre_unit(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss rule needs at least one point");
  static std::mutex lock;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Boost returns the non-negative roots of P_n on [-1, 1].
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(n);
  std::vector<std::pair<double, double>> rule;
  for (double x : roots) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.emplace_back(0.5 * (1.0 + x), 0.5 * w);
    if (x != 0.0) rule.emplace_back(0.5 * (1.0 - x), 0.5 * w);
  }
  std::sort(rule.begin(), rule.end());
  cache.emplace(n, rule);
  return rule;
}

FaceFrame FaceFrame::of(const PolyMesh& mesh, int f) {
  const FaceGeometry& fg = mesh.face_geometry(f);
  FaceFrame fr;
  fr.origin = fg.barycenter;
  fr.normal = fg.normal;
  fr.h = fg.diameter;
  Vec3 d = mesh.vertex(fg.loop[1]) - mesh.vertex(fg.loop[0]);
  d -= fr.normal.dot(d) * fr.normal;
  fr.t1 = d.normalized();
  fr.t2 = fr.normal.cross(fr.t1);
  return fr;
}

FacePoly face_monomials(const Vec2& s) {
  const double x = s.x(), y = s.y();
  return {1.0, x, y, x * x, x * y, y * y};
}

CellPoly cell_monomials(const Vec3& s) {
  const double x = s.x(), y = s.y(), z = s.z();
  return {1.0, x, y, z, x * x, x * y, x * z, y * y, y * z, z * z};
}

int face_monomial_degree(int i) { return i == 0 ? 0 : (i < 3 ? 1 : 2); }
int cell_monomial_degree(int i) { return i == 0 ? 0 : (i < 4 ? 1 : 2); }

Vec3 cell_local(const PolyMesh& mesh, int c, const Vec3& x) {
  const CellGeometry& g = mesh.cell_geometry(c);
  return (x - g.barycenter) / g.diameter;
}

std::vector<QuadPoint> face_rule(const PolyMesh& mesh, int f, int degree) {
  const FaceGeometry& fg = mesh.face_geometry(f);
  const std::size_t m = fg.loop.size();
  std::vector<QuadPoint> rule;
  if (degree <= 2) {
    rule.reserve(3 * m);
    for (std::size_t k = 0; k < m; ++k) {
      const Vec3& a = fg.barycenter;
      const Vec3& b = mesh.vertex(fg.loop[k]);
      const Vec3& c = mesh.vertex(fg.loop[(k + 1) % m]);
      const double area = 0.5 * fg.normal.dot((b - a).cross(c - a));
      rule.push_back({0.5 * (a + b), area / 3.0});
      rule.push_back({0.5 * (b + c), area / 3.0});
      rule.push_back({0.5 * (c + a), area / 3.0});
    }
    return rule;
  }
  if (degree > 7) throw Error(ErrorKind::InvalidArgument, "face rule degree above 7");
  // The collapsed map adds one power of u.
  const auto gl = gauss_legendre_unit((degree + 3) / 2);
  rule.reserve(m * gl.size() * gl.size());
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& a = fg.barycenter;
    const Vec3& b = mesh.vertex(fg.loop[k]);
    const Vec3& c = mesh.vertex(fg.loop[(k + 1) % m]);
    const double area = 0.5 * fg.normal.dot((b - a).cross(c - a));
    for (const auto& [u, wu] : gl)
      for (const auto& [v, wv] : gl)
        rule.push_back({(1.0 - u) * a + u * ((1.0 - v) * b + v * c), 2.0 * area * u * wu * wv});
  }
  return rule;
}

std::vector<QuadPoint> cell_rule(const PolyMesh& mesh, int c, int degree) {
  if (degree > 9) throw Error(ErrorKind::InvalidArgument, "cell rule degree above 9");
  const CellGeometry& cg = mesh.cell_geometry(c);
  // The collapsed map adds u^2 v.
  const auto gl = gauss_legendre_unit((degree + 4) / 2);
  std::vector<QuadPoint> rule;
  for (const auto& sf : mesh.cell(c).faces) {
    const FaceGeometry& fg = mesh.face_geometry(sf.index);
    const std::size_t m = fg.loop.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec3& a = cg.barycenter;
      const Vec3& b = fg.barycenter;
      const Vec3& p = mesh.vertex(fg.loop[k]);
      const Vec3& q = mesh.vertex(fg.loop[(k + 1) % m]);
      const double vol = sf.sign * (b - a).dot((p - b).cross(q - b)) / 6.0;
      if (degree <= 2) {
        const Vec3 s = kTetB * (a + b + p + q);
        const double d = kTetA - kTetB;
        for (const Vec3* x : {&a, &b, &p, &q}) rule.push_back({s + d * *x, vol / 4.0});
        continue;
      }
      for (const auto& [u, wu] : gl)
        for (const auto& [v, wv] : gl)
          for (const auto& [w, ww] : gl) {
            const Vec3 x = (1.0 - u) * a + u * ((1.0 - v) * b + v * ((1.0 - w) * p + w * q));
            rule.push_back({x, 6.0 * vol * u * u * v * wu * wv * ww});
          }
    }
  }
  return rule;
}

std::vector<QuadPoint> edge_rule(const PolyMesh& mesh, int e, int points) {
  const Vec3& a = mesh.vertex(mesh.edge(e).tail);
  const Vec3& b = mesh.vertex(mesh.edge(e).head);
  const double len = mesh.edge_length(e);
  std::vector<QuadPoint> rule;
  for (const auto& [t, w] : gauss_legendre_unit(points)) rule.push_back({a + t * (b - a), w * len});
  return rule;
}

FacePoly face_monomial_integrals(const PolyMesh& mesh, int f) {
  check_face(mesh, f);
  const FaceFrame fr = FaceFrame::of(mesh, f);
  FacePoly out{};
  for (const auto& q : face_rule(mesh, f, 2)) {
    const FacePoly m = face_monomials(fr.local(q.x));
    for (int i = 0; i < kFaceMonomials; ++i) out[i] += q.w * m[i];
  }
  return out;
}

FacePoly face_monomial_integrals_by_divergence(const PolyMesh& mesh, int f) {
  check_face(mesh, f);
  const FaceFrame fr = FaceFrame::of(mesh, f);
  const FaceGeometry& fg = mesh.face_geometry(f);
  const std::size_t m = fg.loop.size();
  FacePoly out{};
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 a = fr.local(mesh.vertex(fg.loop[k]));
    const Vec2 b = fr.local(mesh.vertex(fg.loop[(k + 1) % m]));
    const Vec2 d = b - a;
    const double len = fr.h * d.norm();
    const Vec2 n(d.y() / d.norm(), -d.x() / d.norm());
    const double sn = fr.h * a.dot(n);  // x_f . n_e, constant along the edge
    const FacePoly fa = face_monomials(a), fm = face_monomials(0.5 * (a + b)),
                   fb = face_monomials(b);
    for (int i = 0; i < kFaceMonomials; ++i)
      out[i] += sn * simpson(fa[i], fm[i], fb[i], len) / (2.0 + face_monomial_degree(i));
  }
  return out;
}

CellPoly cell_monomial_face_integrals(const PolyMesh& mesh, int c, int f) {
  check_face(mesh, f);
  CellPoly out{};
  for (const auto& q : face_rule(mesh, f, 2)) {
    const CellPoly m = cell_monomials(cell_local(mesh, c, q.x));
    for (int i = 0; i < kCellMonomials; ++i) out[i] += q.w * m[i];
  }
  return out;
}

CellPoly cell_monomial_integrals(const PolyMesh& mesh, int c) {
  const CellGeometry& cg = mesh.cell_geometry(c);
  CellPoly out{};
  for (const auto& sf : mesh.cell(c).faces) {
    const FaceGeometry& fg = mesh.face_geometry(sf.index);
    const double lever = sf.sign * fg.normal.dot(fg.barycenter - cg.barycenter);
    const CellPoly fi = cell_monomial_face_integrals(mesh, c, sf.index);
    for (int i = 0; i < kCellMonomials; ++i)
      out[i] += lever * fi[i] / (3.0 + cell_monomial_degree(i));
  }
  return out;
}

double integrate_face(const PolyMesh& mesh, int f, const FacePoly& p) {
  const FacePoly m = face_monomial_integrals(mesh, f);
  double s = 0.0;
  for (int i = 0; i < kFaceMonomials; ++i) s += p[i] * m[i];
  return s;
}

double integrate_cell(const PolyMesh& mesh, int c, const CellPoly& p) {
  const CellPoly m = cell_monomial_integrals(mesh, c);
  double s = 0.0;
  for (int i = 0; i < kCellMonomials; ++i) s += p[i] * m[i];
  return s;
}

double integrate_edge(const PolyMesh& mesh, int e, const EdgePoly& p) {
  const double len = mesh.edge_length(e);
  double sum = 0.0;
  for (const auto& [t, w] : gauss_legendre_unit(2)) {
    const double s = t * len;
    sum += w * len * (p[0] + s * (p[1] + s * p[2]));
  }
  return sum;
}

}  // namespace magvem
