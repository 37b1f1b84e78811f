// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/errors.hpp"
#include "magvem/mesh_generators.hpp"
#include "magvem/quadrature.hpp"
#include "magvem/verify.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace magvem {
namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::NotImplemented;
}

// Values below were computed symbolically once and frozen.
TEST(Test1, FieldAndCurlAtSamplePoint) {
  const Vec3 x(0.3, 0.7, 0.1);
  const Vec3 h = test1::exact_field(x), c = test1::exact_curl(x);
  EXPECT_NEAR(h.x(), 0.15915494309189535, 1e-15);
  EXPECT_NEAR(h.y(), -0.15915494309189535, 1e-15);
  EXPECT_NEAR(h.z(), 0.0, 1e-15);
  EXPECT_NEAR(c.x(), -0.36327126400268045, 1e-15);
  EXPECT_NEAR(c.y(), -1.5388417685876268, 1e-15);
  EXPECT_NEAR(c.z(), 0.0, 1e-15);
}

TEST(Test1, CurlMatchesFiniteDifferences) {
  const double d = 1e-5;
  for (const Vec3& x : {Vec3(0.3, 0.7, 0.1), Vec3(0.9, 0.2, 0.55), Vec3(0.5, 0.5, 0.5)}) {
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k) * d;
      jac.col(k) = (test1::exact_field(x + e) - test1::exact_field(x - e)) / (2 * d);
    }
    const Vec3 curl(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1));
    EXPECT_LT((curl - test1::exact_curl(x)).norm(), 1e-9);
    EXPECT_NEAR(jac.trace(), 0.0, 1e-9);
  }
}

TEST(Test1, EnergyAndLineIntegrals) {
  const PolyMesh m = generate_structured_hex(4);
  double w = 0.0;
  for (int c = 0; c < m.num_cells(); ++c)
    w += integrate(cell_rule(m, c, 9), [](const Vec3& x) { return test1::exact_field(x).squaredNorm(); });
  EXPECT_NEAR(w, 0.05757997681458927, 1e-9);

  double line_x = 0.0, line_y = 0.0;
  for (const auto& [t, wt] : gauss_legendre_unit(8)) {
    line_x += wt * test1::exact_field(Vec3(t, 0.0, 0.0)).x();
    line_y += wt * test1::exact_field(Vec3(t, 0.5, 0.25)).y();
  }
  EXPECT_NEAR(line_x, 0.0, 1e-15);
  EXPECT_NEAR(line_y, 0.022436711754600974, 1e-12);
}

TEST(Test2, EnergyPerHeightMatchesRadialQuadrature) {
  using boost::math::quadrature::gauss_kronrod;
  const double radii[] = {0.0, test2::kA, test2::kB, test2::kC};
  const auto ref = test2::energy_per_height();
  for (int s = 0; s < 3; ++s) {
    const double mu = s == test2::kShell ? test2::kMuShell : 1.0;
    auto integrand = [&](double r) {
      return mu * test2::exact_field(Vec3(r, 0.0, 0.0)).squaredNorm() * 2.0 * kPi * r;
    };
    const double w = gauss_kronrod<double, 31>::integrate(integrand, radii[s], radii[s + 1]);
    EXPECT_NEAR(ref.at(s), w, 1e-10 * w);
  }
  EXPECT_NEAR(ref.at(test2::kInner), 194964805.2875718, 1e-6);
  EXPECT_NEAR(ref.at(test2::kShell), 540557220373.9964, 1e-3);
  EXPECT_NEAR(ref.at(test2::kOuter), 64648592.28617102, 1e-6);
}

TEST(Test2, FieldIsContinuousAndVanishesOutside) {
  const double eps = 1e-12;
  for (double phi : {0.0, 0.7, 2.5}) {
    const Vec3 dir(std::cos(phi), std::sin(phi), 0.0);
    EXPECT_NEAR(test2::exact_field(test2::kC * dir).norm(), 0.0, 1e-9);
    const double inside = test2::exact_field((test2::kB - eps) * dir).norm();
    const double outside = test2::exact_field((test2::kB + eps) * dir).norm();
    EXPECT_NEAR(inside, 11140.846016432673, 1e-6);
    EXPECT_NEAR(outside, 11140.846016432673, 1e-6);
    EXPECT_NEAR(test2::exact_field((test2::kA - eps) * dir).norm(),
                test2::exact_field((test2::kA + eps) * dir).norm(), 1e-6);
    EXPECT_NEAR(test2::exact_field(0.8 * dir).dot(dir), 0.0, 1e-12);  // azimuthal
  }
}

TEST(Test2, CurrentsCarryTotalCurrent) {
  using test2::kA, test2::kB, test2::kC;
  EXPECT_NEAR(test2::current(Vec3(0.1, 0, 0), test2::kInner).z() * kPi * kA * kA, test2::kCurrent, 1e-8);
  EXPECT_NEAR(test2::current(Vec3(1.1, 0, 0), test2::kOuter).z() * kPi * (kC * kC - kB * kB), -test2::kCurrent,
              1e-8);
  EXPECT_EQ(test2::current(Vec3(0.7, 0, 0), test2::kShell).norm(), 0.0);
  EXPECT_EQ(test2::subdomain_of_radius(0.3), test2::kInner);
  EXPECT_EQ(test2::subdomain_of_radius(0.9), test2::kShell);
  EXPECT_EQ(test2::subdomain_of_radius(1.2), test2::kOuter);
}

TEST(Test3, CurrentIsAzimuthalWithUnitTotal) {
  const double r = 0.5 * (test3::kCoilInner + test3::kCoilOuter);
  const Vec3 j = test3::current(Vec3(0.0, r, 0.0), test3::kCoil);
  EXPECT_NEAR(j.y(), 0.0, 1e-12);
  EXPECT_NEAR(j.z(), 0.0, 1e-12);
  const double area = (test3::kCoilOuter - test3::kCoilInner) * 2.0 * test3::kCoilHalfHeight;
  EXPECT_NEAR(j.norm() * area, 1.0, 1e-12);
  EXPECT_EQ(test3::current(Vec3(0.01, 0, 0), test3::kCore).norm(), 0.0);
  EXPECT_EQ(test3::reference_energy().size(), 3u);
}

TEST(Test3, MeshConformsToSubdomains) {
  const PolyMesh m = test3::mesh(1);
  double core = 0.0, coil = 0.0, total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double v = m.cell_geometry(c).volume;
    total += v;
    if (m.cell(c).subdomain == test3::kCore) core += v;
    if (m.cell(c).subdomain == test3::kCoil) coil += v;
  }
  // Inscribed polygons: volumes approach the cylinders from below.
  const double core_exact = kPi * std::pow(test3::kCoreRadius, 2) * 2 * test3::kCoreHalfHeight;
  const double coil_exact = kPi * (std::pow(test3::kCoilOuter, 2) - std::pow(test3::kCoilInner, 2)) * 2 *
                            test3::kCoilHalfHeight;
  EXPECT_GT(core, 0.8 * core_exact);
  EXPECT_LE(core, core_exact);
  EXPECT_GT(coil, 0.8 * coil_exact);
  EXPECT_LE(coil, coil_exact);
  EXPECT_LE(total, kPi * std::pow(test3::kAirRadius, 2) * 2 * test3::kAirHalfHeight);
}

TEST(Cases, ByNameAndUnknown) {
  EXPECT_EQ(case_by_name("test1").name, "test1");
  EXPECT_EQ(case_by_name("test2").bc, BoundaryCondition::Neumann);
  EXPECT_EQ(case_by_name("test3").reference_label, "external");
  EXPECT_EQ(kind_of([] { case_by_name("test4"); }), ErrorKind::InvalidArgument);
}

TEST(Cases, FromJson) {
  const CaseSpec s = case_from_json(R"({
    "name": "slab", "boundary": "neumann", "mu": {"0": 1.0, "1": 50.0},
    "subdomain_names": {"0": "air", "1": "iron"},
    "current": {"0": [0, 0, 2]},
    "exact_field": {"constant": [1, 0, 0], "rotation": [0, 0, 1]},
    "current_interpolation": "matched", "energy_scale": 0.5})");
  EXPECT_EQ(s.name, "slab");
  EXPECT_EQ(s.bc, BoundaryCondition::Neumann);
  EXPECT_EQ(s.mu_of(1), 50.0);
  EXPECT_EQ(s.subdomain_name(1), "iron");
  EXPECT_EQ(s.current(Vec3::Zero(), 0), Vec3(0, 0, 2));
  EXPECT_EQ(s.current(Vec3::Zero(), 1), Vec3::Zero());
  EXPECT_LT(((*s.exact_field)(Vec3(1, 2, 3)) - Vec3(-1, 1, 0)).norm(), 1e-15);
  EXPECT_EQ(s.current_interpolation, CurrentInterpolation::MatchedCirculation);
  EXPECT_EQ(s.energy_scale, 0.5);
}

TEST(Cases, FromJsonErrors) {
  for (const char* text : {"{", "[]", R"({"boundary": "periodic"})", R"({"mu": 3})", R"({"mu": {"0": "x"}})",
                           R"({"current": {"0": [1, 2]}})", R"({"formulation": "hcurl"})",
                           R"({"current_interpolation": "nodal"})"})
    EXPECT_EQ(kind_of([&] { case_from_json(text); }), ErrorKind::ParseError) << text;
  EXPECT_EQ(case_from_json(R"({"formulation": "hgrad_augmented"})").formulation, Formulation::HGradAugmented);
}

TEST(MeshSpecs, ParseAndLabel) {
  const MeshSpec p = parse_mesh_spec("perturbed:4:0.15:9");
  EXPECT_EQ(p.family, "perturbed");
  EXPECT_EQ(p.n, 4);
  EXPECT_EQ(p.amplitude, 0.15);
  EXPECT_EQ(p.seed, 9u);
  EXPECT_EQ(p.label(), "perturbed:4:0.15:9");
  EXPECT_EQ(parse_mesh_spec("structured:3").label(), "structured:3");
  EXPECT_EQ(parse_mesh_spec("file:/tmp/a:b.json").path, "/tmp/a:b.json");
  for (const char* bad : {"structured", "structured:x", "structured:0", "structured:3:1", "perturbed:2:0.1:3:4",
                          "structured:-2", "extruded:2x"})
    EXPECT_EQ(kind_of([&] { parse_mesh_spec(bad); }), ErrorKind::InvalidArgument) << bad;
}

TEST(MeshSpecs, MakeMesh) {
  EXPECT_EQ(make_mesh(parse_mesh_spec("structured:3")).num_cells(), 27);
  EXPECT_EQ(make_mesh(parse_mesh_spec("perturbed:2")).num_cells(), 8);
  const PolyMesh hex = make_mesh(parse_mesh_spec("extruded:2"));
  EXPECT_EQ(hex.num_cells(), 7 * 2);
  EXPECT_EQ(make_mesh(parse_mesh_spec("extruded:1"), "test2").num_cells(), test2::mesh(1).num_cells());
  EXPECT_EQ(kind_of([] { make_mesh(parse_mesh_spec("tetra:2")); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { make_mesh(parse_mesh_spec("file:/nonexistent/mesh.json")); }), ErrorKind::IoError);
}

TEST(Convergence, FittedRateOnSyntheticData) {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  EXPECT_NEAR(fitted_rate(h, e), 2.0, 1e-12);
  EXPECT_EQ(fitted_rate({0.5}, {1.0}), 0.0);
}

TEST(Convergence, CsvIsDeterministicWithoutTimings) {
  const std::vector<MeshSpec> levels{parse_mesh_spec("structured:2"), parse_mesh_spec("structured:3")};
  const ConvergenceReport a = run_convergence(case_test1(), levels);
  const ConvergenceReport b = run_convergence(case_test1(), levels);
  EXPECT_EQ(a.csv(true), b.csv(true));
  std::istringstream in(a.csv(true));
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "level,h,n_edge_dofs,n_vertex_dofs,err_H_L2,err_curl,p_inf,W_domain,t_assemble_s,t_solve_s");
  std::getline(in, row);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
  EXPECT_NE(row.find("e-"), std::string::npos);
  EXPECT_EQ(row.substr(row.size() - 33), "0.0000000000e+00,0.0000000000e+00");
  EXPECT_GT(a.rows[1].err_h, 0.0);
  EXPECT_LT(a.rows[1].err_h, a.rows[0].err_h);
  EXPECT_GT(a.rate, 0.0);
}

TEST(Convergence, MissingExactFieldGivesNan) {
  const CaseSpec spec = case_from_json(R"({"boundary": "neumann", "current": {"0": [0, 0, 1]}})");
  const ConvergenceReport r = run_convergence(spec, {parse_mesh_spec("structured:2")});
  EXPECT_LT(r.rows[0].err_h, 0.0);
  EXPECT_NE(r.csv(true).find(",nan,"), std::string::npos);
}

TEST(SolveCase, Test1Diagnostics) {
  const SolvedCase s = solve_case(case_test1(), generate_structured_hex(4));
  EXPECT_NEAR(s.result.err_h, 0.5175, 5e-4);
  EXPECT_LT(s.result.p_inf, 1e-10);
  EXPECT_LT(s.result.curl_identity, 1e-10);
  EXPECT_LT(s.result.gauge_residual, 1e-10);
  EXPECT_LT(std::abs(s.result.err_curl - s.result.err_curl_interp), 1e-10);
  EXPECT_EQ(s.result.n_cells, 64);
}

}  // namespace
}  // namespace magvem
