// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/verify.hpp"

#include "magvem/errors.hpp"
#include "magvem/mesh_generators.hpp"
#include "magvem/mesh_io.hpp"
#include "magvem/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace magvem {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double z_extent(const PolyMesh& mesh) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : mesh.vertices()) {
    lo = std::min(lo, v.z());
    hi = std::max(hi, v.z());
  }
  return hi - lo;
}

std::vector<double> uniform_split(double a, double b, int pieces) {
  std::vector<double> out;
  for (int i = 1; i <= pieces; ++i) out.push_back(a + (b - a) * i / pieces);
  return out;
}

Eigen::VectorXd gather(const std::vector<int>& ids, const Eigen::VectorXd& global) {
  Eigen::VectorXd out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out(i) = global(ids[i]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Test 1

namespace test1 {

Vec3 exact_field(const Vec3& x) {
  const double sx = std::sin(kPi * x.x()), sy = std::sin(kPi * x.y()), sz = std::sin(kPi * x.z());
  return Vec3(sy - sz, sz - sx, sx - sy) / kPi;
}

Vec3 exact_curl(const Vec3& x) {
  const double cx = std::cos(kPi * x.x()), cy = std::cos(kPi * x.y()), cz = std::cos(kPi * x.z());
  return -Vec3(cy + cz, cz + cx, cx + cy);
}

}  // namespace test1

CaseSpec case_test1() {
  CaseSpec s;
  s.name = "test1";
  s.mu = {{0, 1.0}};
  s.subdomain_names = {{0, "domain"}};
  s.current = [](const Vec3& x, int) { return test1::exact_curl(x); };
  s.exact_field = test1::exact_field;
  s.bc = BoundaryCondition::DirichletTangential;
  s.current_interpolation = CurrentInterpolation::MatchedCirculation;
  return s;
}

// ---------------------------------------------------------------------------
// Test 2

namespace test2 {

int subdomain_of_radius(double r) {
  if (r < kA) return kInner;
  if (r < kB) return kShell;
  return kOuter;
}

Vec3 exact_field(const Vec3& x) {
  const double r2 = x.x() * x.x() + x.y() * x.y();
  const double r = std::sqrt(r2);
  const Vec3 et(-x.y(), x.x(), 0.0);
  const double i = kCurrent;
  if (r < kA) return i / (2.0 * kPi * kA * kA) * et;
  if (r < kB) return i / (2.0 * kPi * r2) * et;
  if (r < kC) {
    const double d = kC * kC - kB * kB;
    return (-i / (2.0 * kPi * d) + (i / (2.0 * kPi) + i * kB * kB / (2.0 * kPi * d)) / r2) * et;
  }
  return Vec3::Zero();
}

Vec3 current(const Vec3&, int subdomain) {
  if (subdomain == kInner) return Vec3(0, 0, kCurrent / (kPi * kA * kA));
  if (subdomain == kOuter) return Vec3(0, 0, -kCurrent / (kPi * (kC * kC - kB * kB)));
  return Vec3::Zero();
}

std::map<int, double> energy_per_height() {
  const double i = kCurrent;
  const double d = kC * kC - kB * kB;
  const double alpha = -i / (2.0 * kPi * d);
  const double beta = i * kC * kC / (2.0 * kPi * d);
  return {
      {kInner, i * i / (8.0 * kPi)},
      {kShell, kMuShell * i * i / (2.0 * kPi) * std::log(kB / kA)},
      {kOuter, 2.0 * kPi *
                   (alpha * alpha * (std::pow(kC, 4) - std::pow(kB, 4)) / 4.0 +
                    alpha * beta * d + beta * beta * std::log(kC / kB))},
  };
}

PolyMesh mesh(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "refinement level must be >= 1");
  const std::vector<double> radii = uniform_split(0.0, kC, 5 * n);
  const PolygonMesh2D disk = polar_disk(radii, 6 * n, 1.5);
  return generate_extruded(disk, 2 * n, 0.5, [](const Vec3& c, int) {
    return subdomain_of_radius(std::hypot(c.x(), c.y()));
  });
}

}  // namespace test2

CaseSpec case_test2() {
  CaseSpec s;
  s.name = "test2";
  s.mu = {{test2::kInner, 1.0}, {test2::kShell, test2::kMuShell}, {test2::kOuter, 1.0}};
  s.subdomain_names = {{test2::kInner, "S1"}, {test2::kShell, "M"}, {test2::kOuter, "S2"}};
  s.current = test2::current;
  s.exact_field = test2::exact_field;
  s.bc = BoundaryCondition::Neumann;
  s.current_interpolation = CurrentInterpolation::FaceQuadrature;
  s.reference_energy = [](const PolyMesh& m) {
    auto w = test2::energy_per_height();
    const double height = z_extent(m);
    for (auto& [k, v] : w) v *= height;
    return w;
  };
  s.reference_label = "analytic";
  return s;
}

// ---------------------------------------------------------------------------
// Test 3

namespace test3 {

std::map<int, double> reference_energy() {
  return {{kAir, 9.09e-07}, {kCore, 4.73e-10}, {kCoil, 3.61e-08}};
}

Vec3 current(const Vec3& x, int subdomain) {
  if (subdomain != kCoil) return Vec3::Zero();
  const Vec3 et(-x.y(), x.x(), 0.0);
  const double area = (kCoilOuter - kCoilInner) * 2.0 * kCoilHalfHeight;
  return et / (area * et.norm());
}

PolyMesh mesh(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "refinement level must be >= 1");
  std::vector<double> radii;
  auto rings = [&](double a, double b, int k) {
    for (double r : uniform_split(a, b, k)) radii.push_back(r);
  };
  rings(0.0, kCoreRadius, n);
  rings(kCoreRadius, kCoilInner, n);
  rings(kCoilInner, kCoilOuter, n);
  rings(kCoilOuter, kAirRadius, 2 * n);
  std::vector<double> z{-kAirHalfHeight};
  auto layers = [&](double a, double b, int k) {
    for (double v : uniform_split(a, b, k)) z.push_back(v);
  };
  layers(-kAirHalfHeight, -kCoreHalfHeight, n);
  layers(-kCoreHalfHeight, -kCoilHalfHeight, n);
  layers(-kCoilHalfHeight, kCoilHalfHeight, 2 * n);
  layers(kCoilHalfHeight, kCoreHalfHeight, n);
  layers(kCoreHalfHeight, kAirHalfHeight, n);
  const PolygonMesh2D disk = polar_disk(radii, 6 * n, 3.0);
  return generate_extruded(disk, z, [](const Vec3& c, int) {
    const double r = std::hypot(c.x(), c.y());
    const double az = std::abs(c.z());
    if (r < kCoreRadius && az < kCoreHalfHeight) return kCore;
    if (r > kCoilInner && r < kCoilOuter && az < kCoilHalfHeight) return kCoil;
    return kAir;
  });
}

}  // namespace test3

CaseSpec case_test3() {
  CaseSpec s;
  s.name = "test3";
  s.mu = {{test3::kAir, 1.0}, {test3::kCore, test3::kMuCore}, {test3::kCoil, 1.0}};
  s.subdomain_names = {{test3::kAir, "A"}, {test3::kCore, "C"}, {test3::kCoil, "T"}};
  s.current = test3::current;
  s.bc = BoundaryCondition::Neumann;
  s.current_interpolation = CurrentInterpolation::FaceQuadrature;
  s.energy_scale = test3::kMu0;
  s.reference_energy = [](const PolyMesh&) { return test3::reference_energy(); };
  s.reference_label = "external";
  return s;
}

CaseSpec case_by_name(const std::string& name) {
  if (name == "test1") return case_test1();
  if (name == "test2") return case_test2();
  if (name == "test3") return case_test3();
  throw Error(ErrorKind::InvalidArgument, "unknown case \"" + name + "\"");
}

CaseSpec case_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("case file: ") + e.what());
  }
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ParseError, "case file: " + what); };
  auto vec3 = [&](const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
      fail(where + " must be [x, y, z]");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  };
  if (!j.is_object()) fail("expected an object");
  CaseSpec s;
  s.name = j.value("name", std::string("from-file"));
  const std::string bc = j.value("boundary", std::string("dirichlet"));
  if (bc == "dirichlet") s.bc = BoundaryCondition::DirichletTangential;
  else if (bc == "neumann") s.bc = BoundaryCondition::Neumann;
  else fail("boundary must be \"dirichlet\" or \"neumann\"");
  if (j.contains("mu")) {
    if (!j["mu"].is_object()) fail("mu must map subdomain ids to values");
    for (const auto& [k, v] : j["mu"].items()) {
      if (!v.is_number()) fail("mu/" + k + " must be a number");
      s.mu[std::stoi(k)] = v.get<double>();
    }
  }
  if (j.contains("subdomain_names"))
    for (const auto& [k, v] : j["subdomain_names"].items()) s.subdomain_names[std::stoi(k)] = v.get<std::string>();
  std::map<int, Vec3> pieces;
  if (j.contains("current")) {
    if (!j["current"].is_object()) fail("current must map subdomain ids to vectors");
    for (const auto& [k, v] : j["current"].items()) pieces[std::stoi(k)] = vec3(v, "current/" + k);
  }
  s.current = [pieces](const Vec3&, int sub) {
    auto it = pieces.find(sub);
    return it == pieces.end() ? Vec3::Zero().eval() : it->second;
  };
  if (j.contains("exact_field")) {
    const json& h = j["exact_field"];
    const Vec3 c = h.contains("constant") ? vec3(h["constant"], "exact_field/constant") : Vec3::Zero().eval();
    const Vec3 b = h.contains("rotation") ? vec3(h["rotation"], "exact_field/rotation") : Vec3::Zero().eval();
    s.exact_field = [c, b](const Vec3& x) { return (c + b.cross(x)).eval(); };
  }
  const std::string interp = j.value("current_interpolation", std::string("face_quadrature"));
  if (interp == "matched") s.current_interpolation = CurrentInterpolation::MatchedCirculation;
  else if (interp != "face_quadrature") fail("current_interpolation must be \"face_quadrature\" or \"matched\"");
  s.energy_scale = j.value("energy_scale", 1.0);
  const std::string form = j.value("formulation", std::string("kikuchi"));
  if (form == "hgrad_augmented") s.formulation = Formulation::HGradAugmented;
  else if (form != "kikuchi") fail("unknown formulation \"" + form + "\"");
  return s;
}

// ---------------------------------------------------------------------------
// Meshes

std::string MeshSpec::label() const {
  std::ostringstream os;
  if (family == "file") return "file:" + path;
  os << family << ':' << n;
  if (family == "perturbed") os << ':' << amplitude << ':' << seed;
  return os.str();
}

MeshSpec parse_mesh_spec(const std::string& text) {
  MeshSpec m;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::InvalidArgument, "mesh spec \"" + text + "\" needs FAMILY:ARGS");
  m.family = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (m.family == "file") {
    m.path = rest;
    return m;
  }
  std::vector<std::string> parts;
  std::stringstream ss(rest);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto bad = [&] { throw Error(ErrorKind::InvalidArgument, "malformed mesh spec \"" + text + "\""); };
  try {
    if (parts.empty()) bad();
    std::size_t used = 0;
    m.n = std::stoi(parts[0], &used);
    if (used != parts[0].size()) bad();
    if (m.family == "perturbed") {
      if (parts.size() > 1) m.amplitude = std::stod(parts[1]);
      if (parts.size() > 2) m.seed = std::stoull(parts[2]);
      if (parts.size() > 3) bad();
    } else if (parts.size() != 1) {
      bad();
    }
  } catch (const std::logic_error&) {
    bad();
  }
  if (m.family != "structured" && m.family != "perturbed" && m.family != "extruded" &&
      m.family != "hexagon")
    throw Error(ErrorKind::InvalidArgument, "unknown mesh family \"" + m.family + "\"");
  if (m.n < 1) throw Error(ErrorKind::InvalidArgument, "mesh level must be >= 1");
  return m;
}

PolyMesh make_mesh(const MeshSpec& spec, const std::string& case_name) {
  if (spec.family == "file") return load_mesh(spec.path);
  if (spec.family == "structured") return generate_structured_hex(spec.n);
  if (spec.family == "perturbed") return generate_perturbed_hex(spec.n, Box{}, spec.amplitude, spec.seed);
  if (spec.family == "extruded") {
    if (case_name == "test2") return test2::mesh(spec.n);
    if (case_name == "test3") return test3::mesh(spec.n);
  }
  if (spec.family == "extruded" || spec.family == "hexagon")
    return generate_extruded(honeycomb(spec.n, 0.5 / spec.n), spec.n, 1.0);
  throw Error(ErrorKind::InvalidArgument, "unknown mesh family \"" + spec.family + "\"");
}

// ---------------------------------------------------------------------------
// Post-processing

std::vector<Vec3> cell_averages(const std::vector<LocalElementOps>& ops, const EdgeField& h) {
  std::vector<Vec3> out(ops.size());
  for (std::size_t c = 0; c < ops.size(); ++c) out[c] = ops[c].pi0_edge * gather(ops[c].edges, h.values);
  return out;
}

std::vector<Vec3> cell_averages(const std::vector<LocalElementOps>& ops, const FaceField& psi) {
  std::vector<Vec3> out(ops.size());
  for (std::size_t c = 0; c < ops.size(); ++c) out[c] = ops[c].pi0_face * gather(ops[c].faces, psi.values);
  return out;
}

double error_L2(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops, const EdgeField& h,
                const FieldFunction& exact) {
  const auto avg = cell_averages(ops, h);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto rule = cell_rule(mesh, c, 6);
    const double mu = ops[c].mu;
    num += mu * integrate(rule, [&](const Vec3& x) { return (exact(x) - avg[c]).squaredNorm(); });
    den += mu * integrate(rule, [&](const Vec3& x) { return exact(x).squaredNorm(); });
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double curl_error(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops,
                  const FaceField& psi, const CurrentFunction& j) {
  const auto avg = cell_averages(ops, psi);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto rule = cell_rule(mesh, c, 6);
    const int sub = mesh.cell(c).subdomain;
    num += integrate(rule, [&](const Vec3& x) { return (j(x, sub) - avg[c]).squaredNorm(); });
    den += integrate(rule, [&](const Vec3& x) { return j(x, sub).squaredNorm(); });
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::map<int, double> energies(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops,
                               const EdgeField& h, double energy_scale) {
  const auto avg = cell_averages(ops, h);
  std::map<int, double> w;
  for (int c = 0; c < mesh.num_cells(); ++c)
    w[mesh.cell(c).subdomain] +=
        energy_scale * ops[c].mu * mesh.cell_geometry(c).volume * avg[c].squaredNorm();
  return w;
}

SolvedCase solve_case(const CaseSpec& spec, const PolyMesh& mesh, const SolverOptions& options) {
  SolvedCase out;
  const auto t0 = std::chrono::steady_clock::now();
  out.ops = build_local_ops(mesh, spec);
  out.system = assemble(spec, mesh, out.ops);
  const double t_ops =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.solution = solve(out.system, options);

  RunResult& r = out.result;
  const SaddleSystem& sys = out.system;
  const Solution& sol = out.solution;
  r.h = mesh.mean_cell_diameter();
  r.n_edge_dofs = mesh.num_edges();
  r.n_vertex_dofs = mesh.num_vertices();
  r.n_cells = mesh.num_cells();
  r.p_inf = max_abs(sol.p.values);
  r.h_scale = max_abs(sol.h.values);
  r.residual = sol.stats.relative_residual;
  r.t_assemble = t_ops;
  r.t_solve = sol.stats.solve_seconds;

  const FaceField curl_h = apply_curl(sys.curl, sol.h);
  const double j_inf = max_abs(sys.j_interp.values);
  const double diff = max_abs(curl_h.values - sys.j_interp.values);
  r.curl_identity = j_inf > 0 ? diff / j_inf : diff;

  const Eigen::VectorXd g = sys.bt.transpose() * sol.h.values;
  double g_inf = 0.0;
  for (int v : sys.vertex_unknowns) g_inf = std::max(g_inf, std::abs(g(v)));
  double bt_scale = 0.0;
  for (int k = 0; k < sys.bt.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.bt, k); it; ++it) col += std::abs(it.value());
    bt_scale = std::max(bt_scale, col);
  }
  r.gauge_residual = bt_scale * r.h_scale > 0 ? g_inf / (bt_scale * r.h_scale) : g_inf;

  if (spec.exact_field) r.err_h = error_L2(mesh, out.ops, sol.h, *spec.exact_field);
  if (spec.current) {
    r.err_curl = curl_error(mesh, out.ops, curl_h, spec.current);
    r.err_curl_interp = curl_error(mesh, out.ops, sys.j_interp, spec.current);
  }
  r.energy = energies(mesh, out.ops, sol.h, spec.energy_scale);
  for (const auto& [k, name] : spec.subdomain_names) r.energy.try_emplace(k, 0.0);
  if (spec.reference_energy) r.reference_energy = spec.reference_energy(mesh);
  return out;
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = std::min(h.size(), err.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double d = n * sxx - sx * sx;
  return d != 0.0 ? (n * sxy - sx * sy) / d : 0.0;
}

ConvergenceReport run_convergence(const CaseSpec& spec, const std::vector<MeshSpec>& levels,
                                  const SolverOptions& options) {
  ConvergenceReport rep;
  rep.case_name = spec.name;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const PolyMesh mesh = make_mesh(levels[i], spec.name);
    SolvedCase sc = solve_case(spec, mesh, options);
    sc.result.level = static_cast<int>(i);
    sc.result.mesh_label = levels[i].label();
    rep.rows.push_back(std::move(sc.result));
  }
  std::map<int, bool> subs;
  for (const auto& [k, name] : spec.subdomain_names) subs[k] = true;
  for (const auto& row : rep.rows)
    for (const auto& [k, w] : row.energy) subs[k] = true;
  for (const auto& [k, unused] : subs) {
    rep.subdomains.push_back(k);
    rep.subdomain_names.push_back(spec.subdomain_name(k));
  }
  std::vector<double> hs, es;
  for (const auto& row : rep.rows)
    if (row.err_h > 0) {
      hs.push_back(row.h);
      es.push_back(row.err_h);
    }
  rep.rate = fitted_rate(hs, es);
  return rep;
}

std::string ConvergenceReport::csv(bool omit_timings) const {
  std::ostringstream os;
  os << "level,h,n_edge_dofs,n_vertex_dofs,err_H_L2,err_curl,p_inf";
  for (const auto& name : subdomain_names) os << ",W_" << name;
  os << ",t_assemble_s,t_solve_s\n";
  os << std::scientific << std::setprecision(10);
  auto num = [&](double v) {
    if (v < 0) os << "nan";
    else os << v;
  };
  for (const auto& r : rows) {
    os << r.level << ',';
    num(r.h);
    os << ',' << r.n_edge_dofs << ',' << r.n_vertex_dofs << ',';
    num(r.err_h);
    os << ',';
    num(r.err_curl);
    os << ',';
    num(r.p_inf);
    for (int k : subdomains) {
      auto it = r.energy.find(k);
      os << ',';
      num(it == r.energy.end() ? 0.0 : it->second);
    }
    os << ',';
    num(omit_timings ? 0.0 : r.t_assemble);
    os << ',';
    num(omit_timings ? 0.0 : r.t_solve);
    os << '\n';
  }
  return os.str();
}

}  // namespace magvem
