// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "magvem/localforms.hpp"
#include "magvem/mesh_generators.hpp"
#include "magvem/projections.hpp"
#include "magvem/spaces.hpp"
#include "magvem/verify.hpp"
#include "test_meshes.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace magvem;
using testing::LinearField;
using testing::LinearScalar;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Eigen::VectorXd local(const std::vector<int>& ids, const Eigen::VectorXd& global) {
  Eigen::VectorXd out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out(i) = global(ids[i]);
  return out;
}

Vec3 random_point(const PolyMesh& m, const std::vector<int>& verts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 x = Vec3::Zero();
  double w = 0.0;
  for (int v : verts) {
    const double a = u(rng);
    x += a * m.vertex(v);
    w += a;
  }
  return x / w;
}

Vec3 random_vec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Vec3(u(rng), u(rng), u(rng));
}

testing::Mat3 skew(const Vec3& b) {
  testing::Mat3 a;
  a << 0, -b.z(), b.y(), b.z(), 0, -b.x(), -b.y(), b.x(), 0;
  return a;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome exact_sequence() {
  std::vector<std::pair<std::string, PolyMesh>> meshes;
  for (int n : {2, 3, 4}) meshes.emplace_back("structured:" + std::to_string(n), generate_structured_hex(n));
  meshes.emplace_back("perturbed:4:0.2", generate_perturbed_hex(4, Box{}, 0.2, 1));
  meshes.emplace_back("hexagon", generate_extruded(honeycomb(3, 0.25), 3, 1.0));
  meshes.emplace_back("annulus", test2::mesh(1));
  Outcome o;
  double worst = 0.0;
  for (const auto& [name, m] : meshes) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = exact_sequence_audit(m);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, s);
    if (!rep.ok() || s >= 1.0) {
      o.pass = false;
      o.detail += name + " failed; ";
    }
  }
  o.detail += std::to_string(meshes.size()) + " meshes, slowest audit " + sci(worst) + " s";
  return o;
}

Outcome projection_exactness() {
  const auto& zoo = testing::mesh_zoo();
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> pick(0, zoo.size() - 1);
  double nodal = 0, edge_face = 0, edge_cell = 0, face_cell = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PolyMesh& m = zoo[pick(rng)].mesh;
    const int f = std::uniform_int_distribution<int>(0, m.num_faces() - 1)(rng);
    const int c = std::uniform_int_distribution<int>(0, m.num_cells() - 1)(rng);

    // Nodal-face: tangential gradient of a linear scalar.
    const LinearScalar q{random_vec(rng), random_vec(rng).x()};
    const auto pn = proj_nodal_face(m, f);
    const Eigen::VectorXd cq = pn.pi1 * local(pn.vertices, testing::vertex_dofs(m, q).values);
    const Vec3 xf = random_point(m, m.face_geometry(f).loop, rng);
    const Vec2 gq(q.g.dot(pn.frame.t1), q.g.dot(pn.frame.t2));
    nodal = std::max(nodal, (eval_face_p1(cq, pn.frame.local(xf)) - gq).norm() / q.g.norm());

    // Edge-face and edge-cell: Nedelec fields a + b x x.
    const Vec3 b = random_vec(rng);
    const LinearField ne{skew(b), random_vec(rng)};
    const Eigen::VectorXd ve = testing::edge_dofs(m, ne).values;
    const auto pe = proj_edge_face(m, f);
    const Eigen::VectorXd de = local(pe.edges, ve);
    const Vec3 v = ne(xf);
    const Vec2 vt(v.dot(pe.frame.t1), v.dot(pe.frame.t2));
    const double scale = 1.0 + v.norm();
    edge_face = std::max(edge_face, (eval_face_p1(pe.pi1 * de, pe.frame.local(xf)) - vt).norm() / scale);
    edge_face = std::max(edge_face, std::abs(pe.rot.dot(de) - 2.0 * b.dot(pe.frame.normal)) / (1.0 + 2.0 * b.norm()));
    const auto pc = proj_edge_cell(m, c);
    const Vec3 vb = ne(m.cell_geometry(c).barycenter);
    edge_cell = std::max(edge_cell, (pc.pi0 * local(pc.edges, ve) - vb).norm() / (1.0 + vb.norm()));

    // Face-cell: Raviart-Thomas fields a + c x.
    const LinearField rt{random_vec(rng).x() * testing::Mat3::Identity(), random_vec(rng)};
    const auto pf = proj_face_cell(m, c);
    const Eigen::VectorXd df = local(pf.faces, testing::face_dofs(m, rt).values);
    const Vec3 xc = random_point(m, m.cell_geometry(c).vertices, rng);
    const Vec3 w = rt(xc);
    face_cell = std::max(face_cell, (eval_cell_p1(pf.pi1 * df, cell_local(m, c, xc)) - w).norm() / (1.0 + w.norm()));
    const Vec3 wb = rt(m.cell_geometry(c).barycenter);
    face_cell = std::max(face_cell, (pf.pi0 * df - wb).norm() / (1.0 + wb.norm()));
    face_cell = std::max(face_cell, std::abs(pf.div.dot(df) - rt.a.trace()) / (1.0 + std::abs(rt.a.trace())));
  }
  Outcome o;
  o.pass = std::max({nodal, edge_face, edge_cell, face_cell}) <= 1e-11;
  o.detail = "500 pairs each; max error nodal-face " + sci(nodal) + ", edge-face " + sci(edge_face) +
             ", edge-cell " + sci(edge_cell) + ", face-cell " + sci(face_cell);
  return o;
}

Outcome local_form_consistency() {
  const auto& zoo = testing::mesh_zoo();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, zoo.size() - 1);
  std::normal_distribution<double> g;
  double worst = 0.0, min_eig = 1e300;
  for (int trial = 0; trial < 200; ++trial) {
    const PolyMesh& m = zoo[pick(rng)].mesh;
    const int c = std::uniform_int_distribution<int>(0, m.num_cells() - 1)(rng);
    const double vol = m.cell_geometry(c).volume;
    const LinearField p0{testing::Mat3::Zero(), random_vec(rng)};

    const auto pe = proj_edge_cell(m, c);
    const Eigen::MatrixXd me = edge_mass(m, c, pe);
    const Eigen::VectorXd pd = local(pe.edges, testing::edge_dofs(m, p0).values);
    Eigen::VectorXd v(pe.edges.size());
    for (auto& x : v) x = g(rng);
    worst = std::max(worst, std::abs(v.dot(me * pd) - vol * (pe.pi0 * v).dot(p0.b)) /
                                std::sqrt(v.dot(me * v) * pd.dot(me * pd)));

    const auto pf = proj_face_cell(m, c);
    const Eigen::MatrixXd mf = face_mass(m, c, pf);
    const Eigen::VectorXd fd = local(pf.faces, testing::face_dofs(m, p0).values);
    Eigen::VectorXd w(pf.faces.size());
    for (auto& x : w) x = g(rng);
    worst = std::max(worst, std::abs(w.dot(mf * fd) - vol * (pf.pi0 * w).dot(p0.b)) /
                                std::sqrt(w.dot(mf * w) * fd.dot(mf * fd)));

    const auto se = spectrum(me), sf = spectrum(mf);
    min_eig = std::min({min_eig, se.min_eigenvalue / se.max_eigenvalue, sf.min_eigenvalue / sf.max_eigenvalue});
  }
  Outcome o;
  o.pass = worst <= 1e-12 && min_eig > 0.0;
  o.detail = "200 cells; max scaled consistency defect " + sci(worst) + ", min lambda_min/lambda_max " + sci(min_eig);
  return o;
}

// ---------------------------------------------------------------------------

std::vector<MeshSpec> specs(const std::string& family, const std::vector<int>& levels) {
  std::vector<MeshSpec> out;
  for (int n : levels) out.push_back(parse_mesh_spec(family + ":" + std::to_string(n)));
  return out;
}

struct Studies {
  ConvergenceReport t1_structured, t1_perturbed, t2, t3;
};

Outcome curl_identity(const Studies& s) {
  double worst = 0.0;
  for (const auto* r : {&s.t1_structured, &s.t1_perturbed, &s.t2})
    for (const auto& row : r->rows) worst = std::max(worst, row.curl_identity);
  return {worst <= 1e-10, "max |C H_h - j_I|/|j_I| over test1 and test2 levels " + sci(worst)};
}

Outcome gauge(const Studies& s) {
  double structured = 0.0, perturbed = 0.0;
  for (const auto& row : s.t1_structured.rows) structured = std::max(structured, row.p_inf);
  for (const auto& row : s.t1_perturbed.rows) perturbed = std::max(perturbed, row.p_inf);
  return {structured <= 1e-10 && perturbed <= 1e-7,
          "max |p_h| structured (up to 12^3) " + sci(structured) + ", perturbed " + sci(perturbed)};
}

Outcome test1_rate(const Studies& s) {
  auto in = [](double r) { return r >= 0.8 && r <= 1.2; };
  std::ostringstream d;
  d << "rate structured " << s.t1_structured.rate << ", perturbed " << s.t1_perturbed.rate << "; err";
  for (const auto& row : s.t1_structured.rows) d << ' ' << sci(row.err_h);
  return {in(s.t1_structured.rate) && in(s.t1_perturbed.rate), d.str()};
}

Outcome test2_convergence(const Studies& s) {
  const auto& rows = s.t2.rows;
  bool monotone = true;
  std::ostringstream d;
  d << "rate " << s.t2.rate << "; energy deviations";
  for (std::size_t i = 0; i < s.t2.subdomains.size(); ++i) {
    const int k = s.t2.subdomains[i];
    d << ' ' << s.t2.subdomain_names[i] << ':';
    double prev = 1e300;
    for (const auto& row : rows) {
      const double ref = row.reference_energy.at(k);
      const double dev = std::abs(row.energy.at(k) - ref) / std::abs(ref);
      d << ' ' << sci(dev);
      if (!(dev < prev)) monotone = false;
      prev = dev;
    }
  }
  return {s.t2.rate >= 0.8 && s.t2.rate <= 1.2 && monotone && rows.size() >= 3, d.str()};
}

Outcome test3_trend(const Studies& s) {
  std::ostringstream d;
  d << "W_C deviation";
  bool ok = s.t3.rows.size() >= 3;
  double prev = 1e300;
  for (const auto& row : s.t3.rows) {
    const double ref = row.reference_energy.at(test3::kCore);
    const double dev = std::abs(row.energy.at(test3::kCore) - ref) / ref;
    d << ' ' << sci(dev);
    if (!(dev < prev)) ok = false;
    prev = dev;
  }
  return {ok, d.str()};
}

Outcome curl_error_matches_interpolation(const Studies& s) {
  double worst = 0.0;
  int cases = 0;
  for (const auto* r : {&s.t1_structured, &s.t1_perturbed, &s.t2, &s.t3})
    for (const auto& row : r->rows) {
      worst = std::max(worst, std::abs(row.err_curl - row.err_curl_interp));
      ++cases;
    }
  return {worst <= 1e-10, std::to_string(cases) + " solves; max |err_curl - err_curl_interp| " + sci(worst)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
  };

  report(1, "exact sequence", exact_sequence);
  report(2, "projection exactness", projection_exactness);
  report(3, "local form consistency and SPD", local_form_consistency);

  Studies s;
  bool solved = true;
  std::string solve_error;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.t1_structured = run_convergence(case_test1(), specs("structured", {4, 6, 8, 12}));
    s.t1_perturbed = run_convergence(case_test1(), specs("perturbed", {4, 6, 8, 12}));
    s.t2 = run_convergence(case_test2(), specs("extruded", {1, 2, 3}));
    s.t3 = run_convergence(case_test3(), specs("extruded", {1, 2, 3}));
  } catch (const std::exception& e) {
    solved = false;
    solve_error = e.what();
  }
  std::printf("# solves finished in %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  auto guarded = [&](Outcome (*f)(const Studies&)) {
    return [&, f] { return solved ? f(s) : Outcome{false, "solve failed: " + solve_error}; };
  };
  report(4, "discrete curl identity", guarded(curl_identity));
  report(5, "gauge", guarded(gauge));
  report(6, "test1 convergence rate", guarded(test1_rate));
  report(7, "test2 convergence and energies", guarded(test2_convergence));
  report(8, "test3 core energy trend", guarded(test3_trend));
  report(9, "curl error equals interpolation error", guarded(curl_error_matches_interpolation));

  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
