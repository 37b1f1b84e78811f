// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// magvem: mesh tooling, single solves and convergence studies.

#include "magvem/errors.hpp"
#include "magvem/mesh.hpp"
#include "magvem/mesh_generators.hpp"
#include "magvem/mesh_io.hpp"
#include "magvem/spaces.hpp"
#include "magvem/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using magvem::Error;
using magvem::ErrorKind;
using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kInvalidArgument = 3,
  kIo = 4,
  kParse = 5,
  kTopology = 6,
  kGeometry = 7,
  kSolverBreakdown = 8,
  kToleranceNotReached = 9,
  kUnsupported = 10,
  kAcceptance = 11,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::PerturbationRejected:
    case ErrorKind::InvalidPolygon2D:
    case ErrorKind::NonPositivePermeability:
      return kInvalidArgument;
    case ErrorKind::IoError:
      return kIo;
    case ErrorKind::ParseError:
      return kParse;
    case ErrorKind::TopologyError:
      return kTopology;
    case ErrorKind::NonPlanarFace:
    case ErrorKind::DegenerateFace:
    case ErrorKind::DegenerateCell:
    case ErrorKind::NotSPD:
      return kGeometry;
    case ErrorKind::SolverBreakdown:
      return kSolverBreakdown;
    case ErrorKind::ToleranceNotReached:
      return kToleranceNotReached;
    case ErrorKind::EmptyInterior:
    case ErrorKind::NotImplemented:
      return kUnsupported;
  }
  return kInternal;
}

int fail(const std::string& kind, const std::string& message, int code) {
  json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

std::string resolve(const std::string& dir, const std::string& path) {
  if (path.empty() || dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / path).string();
}

// Mesh argument: an existing file, or a generator spec such as "structured:4".
magvem::PolyMesh mesh_from_argument(const std::string& arg, const std::string& case_name = "") {
  if (std::filesystem::exists(arg)) return magvem::load_mesh(arg, false);
  return magvem::make_mesh(magvem::parse_mesh_spec(arg), case_name);
}

json validation_json(const magvem::ValidationReport& rep) {
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"invariant", x.invariant}, {"detail", x.detail}});
  double min_edge = 1.0, max_planarity = 0.0;
  int star = 0;
  for (const auto& c : rep.cells) {
    min_edge = std::min(min_edge, c.min_edge_ratio);
    max_planarity = std::max(max_planarity, c.max_planarity_residual);
    star += c.star_shaped_heuristic ? 1 : 0;
  }
  return {{"ok", rep.ok()},
          {"violations", v},
          {"max_closure_residual", rep.max_closure_residual},
          {"min_edge_ratio", min_edge},
          {"max_planarity_residual", max_planarity},
          {"star_shaped_cells", star},
          {"cells", rep.cells.size()}};
}

json mesh_summary(const magvem::PolyMesh& m) {
  return {{"vertices", m.num_vertices()},
          {"edges", m.num_edges()},
          {"faces", m.num_faces()},
          {"cells", m.num_cells()}};
}

// ---------------------------------------------------------------------------
// mesh

struct MeshGenArgs {
  int structured = 0, perturbed = 0, extruded = 0, hexagon = 0;
  double amplitude = 0.2;
  std::uint64_t seed = 1;
  std::string case_name;
  std::string output;
};

magvem::MeshSpec mesh_spec(const std::string& family, int n, double amplitude, std::uint64_t seed) {
  magvem::MeshSpec spec;
  spec.family = family;
  spec.n = n;
  spec.amplitude = amplitude;
  spec.seed = seed;
  return spec;
}

int cmd_mesh_gen(const MeshGenArgs& a) {
  magvem::MeshSpec spec;
  int chosen = 0;
  for (const auto& [family, n] : {std::pair{"structured", a.structured}, {"perturbed", a.perturbed},
                                  {"extruded", a.extruded}, {"hexagon", a.hexagon}})
    if (n) {
      spec = mesh_spec(family, n, a.amplitude, a.seed);
      ++chosen;
    }
  if (chosen != 1)
    return fail("InvalidArgument",
                "choose exactly one of --structured, --perturbed, --extruded, --hexagon", kUsage);
  const magvem::PolyMesh mesh = magvem::make_mesh(spec, a.case_name);
  const auto rep = magvem::validate(mesh);
  if (!rep.ok()) {
    const auto& v = rep.violations.front();
    return fail("TopologyError", v.invariant + ": " + v.detail, kTopology);
  }
  magvem::save_mesh(mesh, a.output);
  json out{{"written", a.output}, {"mesh", spec.label()}, {"summary", mesh_summary(mesh)}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_mesh_validate(const std::string& path) {
  const magvem::PolyMesh mesh = magvem::load_mesh(path, false);
  const auto rep = magvem::validate(mesh);
  json out{{"mesh", path}, {"summary", mesh_summary(mesh)}, {"validation", validation_json(rep)}};
  std::cout << out.dump(2) << '\n';
  if (!rep.ok()) {
    const auto& v = rep.violations.front();
    return fail("TopologyError", v.invariant + ": " + v.detail, kTopology);
  }
  return kOk;
}

int cmd_mesh_convert(const std::string& in, const std::string& out) {
  const magvem::PolyMesh mesh = magvem::load_mesh(in);
  magvem::save_mesh(mesh, out);
  std::cout << json{{"written", out}, {"summary", mesh_summary(mesh)}}.dump(2) << '\n';
  return kOk;
}

int cmd_mesh_audit(const std::string& arg) {
  const magvem::PolyMesh mesh = mesh_from_argument(arg);
  const auto rep = magvem::exact_sequence_audit(mesh);
  json out{{"mesh", arg},
           {"summary", mesh_summary(mesh)},
           {"CG_zero", rep.cg_zero},
           {"DC_zero", rep.dc_zero},
           {"euler_failures", rep.euler_failures},
           {"rank_checked", rep.rank_checked},
           {"ok", rep.ok()}};
  if (rep.rank_checked) {
    out["rank_G"] = rep.rank_grad;
    out["rank_C"] = rep.rank_curl;
  }
  std::cout << out.dump(2) << '\n';
  if (!rep.ok()) return fail("TopologyError", "exact-sequence audit failed", kTopology);
  return kOk;
}

// ---------------------------------------------------------------------------
// solve / convergence

struct CaseArgs {
  std::string case_name = "test1";
  std::string case_file;
  std::string solver = "direct";
  double tolerance = 1e-12;
  std::string output_dir;
};

magvem::CaseSpec load_case(const CaseArgs& a) {
  if (a.case_name == "from-file") {
    if (a.case_file.empty())
      throw Error(ErrorKind::InvalidArgument, "--case from-file needs --case-file");
    return magvem::case_from_json(magvem::read_text_file(a.case_file));
  }
  return magvem::case_by_name(a.case_name);
}

magvem::SolverOptions solver_options(const CaseArgs& a) {
  magvem::SolverOptions o;
  if (a.solver == "direct") o.kind = magvem::SolverKind::Direct;
  else if (a.solver == "minres") o.kind = magvem::SolverKind::Minres;
  else throw Error(ErrorKind::InvalidArgument, "unknown solver \"" + a.solver + "\"");
  if (!(a.tolerance > 0)) throw Error(ErrorKind::InvalidArgument, "--tol must be positive");
  o.tolerance = a.tolerance;
  return o;
}

json result_json(const magvem::CaseSpec& spec, const magvem::RunResult& r) {
  auto opt = [](double v) { return v < 0 ? json(nullptr) : json(v); };
  json energies = json::object();
  for (const auto& [k, w] : r.energy) {
    json e{{"computed", w}};
    auto it = r.reference_energy.find(k);
    if (it != r.reference_energy.end()) {
      e["reference"] = it->second;
      e["relative_deviation"] = std::abs(w - it->second) / std::abs(it->second);
    }
    energies[spec.subdomain_name(k)] = e;
  }
  return {{"case", spec.name},
          {"mesh", r.mesh_label},
          {"h", r.h},
          {"cells", r.n_cells},
          {"n_edge_dofs", r.n_edge_dofs},
          {"n_vertex_dofs", r.n_vertex_dofs},
          {"err_H_L2", opt(r.err_h)},
          {"err_curl", opt(r.err_curl)},
          {"err_curl_interpolation", opt(r.err_curl_interp)},
          {"curl_identity", r.curl_identity},
          {"gauge_residual", r.gauge_residual},
          {"p_inf", r.p_inf},
          {"relative_residual", r.residual},
          {"energies", energies},
          {"reference_label", spec.reference_label},
          {"t_assemble_s", r.t_assemble},
          {"t_solve_s", r.t_solve}};
}

int cmd_solve(const CaseArgs& a, const std::string& mesh_arg, const std::string& vtk_path,
              const std::string& report_path) {
  const magvem::CaseSpec spec = load_case(a);
  const magvem::SolverOptions options = solver_options(a);
  const magvem::PolyMesh mesh = mesh_from_argument(mesh_arg, spec.name);
  auto solved = magvem::solve_case(spec, mesh, options);
  solved.result.mesh_label = mesh_arg;
  const json out = result_json(spec, solved.result);
  std::cout << out.dump(2) << '\n';

  if (!report_path.empty()) magvem::write_text_file(resolve(a.output_dir, report_path), out.dump(2) + "\n");
  if (!vtk_path.empty()) {
    const auto h = magvem::cell_averages(solved.ops, solved.solution.h);
    magvem::VtkCellData data;
    std::vector<magvem::Vec3> b(h.size());
    std::vector<double> bmag(h.size());
    for (std::size_t c = 0; c < h.size(); ++c) {
      b[c] = spec.energy_scale * solved.ops[c].mu * h[c];
      bmag[c] = b[c].norm();
    }
    data.vectors["H"] = h;
    data.vectors["B"] = b;
    data.scalars["B_magnitude"] = bmag;
    magvem::write_text_file(resolve(a.output_dir, vtk_path), magvem::to_vtk(mesh, data));
  }
  return kOk;
}

struct ConvergenceArgs {
  std::string family = "structured";
  std::vector<int> levels{4, 6, 8};
  double amplitude = 0.2;
  std::uint64_t seed = 1;
  std::string csv;
  bool omit_timings = false;
  bool assert_rate = false;
  double rate_min = 0.8, rate_max = 1.2;
};

int cmd_convergence(const CaseArgs& a, const ConvergenceArgs& c) {
  const magvem::CaseSpec spec = load_case(a);
  const magvem::SolverOptions options = solver_options(a);
  std::vector<magvem::MeshSpec> levels;
  for (int n : c.levels) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "levels must be >= 1");
    levels.push_back(mesh_spec(c.family, n, c.amplitude, c.seed));
  }
  const auto rep = magvem::run_convergence(spec, levels, options);
  const std::string csv = rep.csv(c.omit_timings);
  if (!c.csv.empty()) magvem::write_text_file(resolve(a.output_dir, c.csv), csv);
  std::cout << csv;
  const bool has_rate = rep.rows.size() >= 2 && spec.exact_field.has_value();
  if (has_rate) std::cout << "# rate " << std::setprecision(6) << rep.rate << '\n';
  for (const auto& r : rep.rows)
    for (const auto& [k, ref] : r.reference_energy) {
      const double w = r.energy.count(k) ? r.energy.at(k) : 0.0;
      std::cout << "# level " << r.level << " W_" << spec.subdomain_name(k) << " deviation "
                << std::setprecision(6) << std::abs(w - ref) / std::abs(ref) << " ("
                << spec.reference_label << ")\n";
    }
  if (c.assert_rate) {
    if (!has_rate) return fail("AcceptanceFailure", "no convergence rate available", kAcceptance);
    if (!(rep.rate >= c.rate_min && rep.rate <= c.rate_max)) {
      std::ostringstream os;
      os << "fitted rate " << rep.rate << " outside [" << c.rate_min << ", " << c.rate_max << "]";
      return fail("AcceptanceFailure", os.str(), kAcceptance);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest-order virtual element magnetostatics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option defaults (flags take precedence)");

  auto* mesh = app.add_subcommand("mesh", "Generate, validate, convert or audit meshes");
  mesh->require_subcommand(1);

  MeshGenArgs gen;
  auto* gen_cmd = mesh->add_subcommand("gen", "Generate a mesh file");
  gen_cmd->add_option("--structured", gen.structured, "N x N x N hexahedra on the unit cube");
  gen_cmd->add_option("--perturbed", gen.perturbed, "Perturbed N^3 hexahedra");
  gen_cmd->add_option("--extruded", gen.extruded, "Extruded prisms (depends on --case)");
  gen_cmd->add_option("--hexagon", gen.hexagon, "Honeycomb prisms with N rings");
  gen_cmd->add_option("--amplitude", gen.amplitude, "Perturbation amplitude (fraction of h)");
  gen_cmd->add_option("--seed", gen.seed, "Perturbation seed");
  gen_cmd->add_option("--case", gen.case_name, "Case the extruded geometry belongs to");
  gen_cmd->add_option("-o,--output", gen.output, "Output file (.json or .vtk)")->required();

  std::string validate_path;
  auto* val_cmd = mesh->add_subcommand("validate", "Check mesh invariants");
  val_cmd->add_option("mesh", validate_path, "Mesh file")->required();

  std::string conv_in, conv_out;
  auto* convert_cmd = mesh->add_subcommand("convert", "Convert between mesh formats");
  convert_cmd->add_option("input", conv_in, "Input mesh file")->required();
  convert_cmd->add_option("output", conv_out, "Output mesh file")->required();

  std::string audit_arg;
  auto* audit_cmd = mesh->add_subcommand("audit", "Exact-sequence audit of the incidence matrices");
  audit_cmd->add_option("mesh", audit_arg, "Mesh file or generator spec")->required();

  auto add_case_options = [](CLI::App* cmd, CaseArgs& a) {
    cmd->add_option("--case", a.case_name, "test1, test2, test3 or from-file")
        ->check(CLI::IsMember({"test1", "test2", "test3", "from-file"}));
    cmd->add_option("--case-file", a.case_file, "JSON case description for --case from-file");
    cmd->add_option("--solver", a.solver, "direct or minres")->check(CLI::IsMember({"direct", "minres"}));
    cmd->add_option("--tol", a.tolerance, "Relative residual tolerance");
    cmd->add_option("--output-dir", a.output_dir, "Directory for relative output paths");
  };

  CaseArgs solve_args;
  std::string mesh_arg, vtk_path, report_path;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one case on one mesh");
  add_case_options(solve_cmd, solve_args);
  solve_cmd->add_option("--mesh", mesh_arg, "Mesh file or spec (structured:N, perturbed:N[:amp[:seed]], extruded:N, hexagon:N)")
      ->required();
  solve_cmd->add_option("--export-vtk", vtk_path, "Write cell fields H, B and |B|");
  solve_cmd->add_option("--report-json", report_path, "Write the run report");

  CaseArgs conv_args;
  ConvergenceArgs conv;
  auto* conv_cmd = app.add_subcommand("convergence", "Refinement study with rate fit");
  add_case_options(conv_cmd, conv_args);
  conv_cmd->add_option("--family", conv.family, "structured, perturbed, extruded or hexagon")
      ->check(CLI::IsMember({"structured", "perturbed", "extruded", "hexagon"}));
  conv_cmd->add_option("--levels", conv.levels, "Comma-separated refinement levels")->delimiter(',');
  conv_cmd->add_option("--amplitude", conv.amplitude, "Perturbation amplitude");
  conv_cmd->add_option("--seed", conv.seed, "Perturbation seed");
  conv_cmd->add_option("--csv", conv.csv, "Write the table to this file");
  conv_cmd->add_flag("--omit-timings", conv.omit_timings, "Write zero timings (reproducible output)");
  conv_cmd->add_flag("--assert-rate", conv.assert_rate, "Fail unless the fitted rate is in range");
  conv_cmd->add_option("--rate-min", conv.rate_min, "Lower bound for --assert-rate");
  conv_cmd->add_option("--rate-max", conv.rate_max, "Upper bound for --assert-rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), kUsage);
  }

  try {
    if (*gen_cmd) return cmd_mesh_gen(gen);
    if (*val_cmd) return cmd_mesh_validate(validate_path);
    if (*convert_cmd) return cmd_mesh_convert(conv_in, conv_out);
    if (*audit_cmd) return cmd_mesh_audit(audit_arg);
    if (*solve_cmd) return cmd_solve(solve_args, mesh_arg, vtk_path, report_path);
    if (*conv_cmd) return cmd_convergence(conv_args, conv);
  } catch (const Error& e) {
    return fail(std::string(magvem::to_string(e.kind())), e.what(), exit_code(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("IoError", e.what(), kIo);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), kInternal);
  }
  return fail("UsageError", "no command given", kUsage);
}
