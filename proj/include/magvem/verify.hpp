// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MAGVEM_VERIFY_HPP
#define MAGVEM_VERIFY_HPP

#include "magvem/mesh.hpp"
#include "magvem/system.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace magvem {

// ---------------------------------------------------------------------------
// Cases

/// H = (1/pi)(sin pi y - sin pi z, sin pi z - sin pi x, sin pi x - sin pi y)
/// on the unit cube, mu = 1, Dirichlet data from the edge interpolant of H.
CaseSpec case_test1();

/// Coaxial conductor: inner conductor S1 (r < a), magnetic shell M
/// (a < r < b, mu = 1000), return conductor S2 (b < r < c); total current I
/// along +z in S1 and -z in S2; natural boundary conditions.
CaseSpec case_test2();

/// Electromagnet: ferromagnetic core (mu = 10000) inside a rectangular
/// toroidal coil carrying 1 A, in a cylinder of air; natural conditions.
CaseSpec case_test3();

/// Case by name: "test1", "test2", "test3".
CaseSpec case_by_name(const std::string& name);

/// Case read from a JSON description (see README).
CaseSpec case_from_json(const std::string& text);

namespace test1 {
Vec3 exact_field(const Vec3& x);
Vec3 exact_curl(const Vec3& x);
}  // namespace test1

namespace test2 {
inline constexpr double kCurrent = 70000.0;
inline constexpr double kA = 0.5;
inline constexpr double kB = 1.0;
inline constexpr double kC = 1.25;
inline constexpr double kMuShell = 1000.0;
inline constexpr int kInner = 0, kShell = 1, kOuter = 2;
int subdomain_of_radius(double r);
Vec3 exact_field(const Vec3& x);
Vec3 current(const Vec3& x, int subdomain);
/// Energy per unit height, integral of mu |H|^2 over each annulus.
std::map<int, double> energy_per_height();
/// Polar-sector prisms: rings of width 0.25/n up to r = c, 6n sectors at
/// the centre (doubled outward as needed), height 0.5 split into 2n layers.
PolyMesh mesh(int n);
}  // namespace test2

namespace test3 {
inline constexpr double kCoreRadius = 0.05;
inline constexpr double kCoreHalfHeight = 0.1;
inline constexpr double kCoilInner = 0.07;
inline constexpr double kCoilOuter = 0.1;
inline constexpr double kCoilHalfHeight = 0.05;
inline constexpr double kAirRadius = 0.3;
inline constexpr double kAirHalfHeight = 0.3;
inline constexpr double kMuCore = 10000.0;
inline constexpr double kMu0 = 4e-7 * 3.14159265358979323846;
inline constexpr int kAir = 0, kCore = 1, kCoil = 2;
/// Reference energies (J) for the air, core and coil.
std::map<int, double> reference_energy();
Vec3 current(const Vec3& x, int subdomain);
/// Polar-sector prisms conforming to the core, coil and air boundaries;
/// every radial, axial and angular spacing shrinks like 1/n.
PolyMesh mesh(int n);
}  // namespace test3

// ---------------------------------------------------------------------------
// Meshes

/// "structured:N", "perturbed:N[:amplitude[:seed]]", "extruded:N",
/// "hexagon:N" or "file:PATH".
struct MeshSpec {
  std::string family;
  int n = 0;
  double amplitude = 0.2;
  std::uint64_t seed = 1;
  std::string path;

  std::string label() const;
};

MeshSpec parse_mesh_spec(const std::string& text);

/// Builds the mesh for a case. "extruded" depends on the case (coaxial
/// cylinder for test2, electromagnet for test3, honeycomb prisms otherwise).
PolyMesh make_mesh(const MeshSpec& spec, const std::string& case_name = "");

// ---------------------------------------------------------------------------
// Post-processing

/// Pi_0 of an edge field / face field, per cell.
std::vector<Vec3> cell_averages(const std::vector<LocalElementOps>& ops, const EdgeField& h);
std::vector<Vec3> cell_averages(const std::vector<LocalElementOps>& ops, const FaceField& psi);

/// sqrt(sum_P mu_P int_P |H - Pi0 H_h|^2) / sqrt(sum_P mu_P int_P |H|^2),
/// degree-6 cell rule.
double error_L2(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops, const EdgeField& h,
                const FieldFunction& exact);

/// sqrt(sum_P int_P |j - Pi0 psi|^2) / sqrt(sum_P int_P |j|^2). With psi =
/// C H_h this is the solution-side curl error; with psi = j_I it is the
/// interpolation error of the current.
double curl_error(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops,
                  const FaceField& psi, const CurrentFunction& j);

/// energy_scale * sum_{P in s} mu_P |P| |Pi0 H_h|^2 per subdomain s.
std::map<int, double> energies(const PolyMesh& mesh, const std::vector<LocalElementOps>& ops,
                               const EdgeField& h, double energy_scale);

struct RunResult {
  int level = 0;
  std::string mesh_label;
  double h = 0.0;  ///< mean cell diameter
  int n_edge_dofs = 0;
  int n_vertex_dofs = 0;
  int n_cells = 0;
  double err_h = -1.0;  ///< negative when no exact field
  double err_curl = -1.0;
  double err_curl_interp = -1.0;
  double p_inf = 0.0;
  double h_scale = 0.0;        ///< max |dof(H_h)|
  double curl_identity = 0.0;  ///< |C H_h - j_I|_inf / |j_I|_inf
  double gauge_residual = 0.0; ///< |G^T M H_h|_inf over free vertices, relative
  double residual = 0.0;
  std::map<int, double> energy;
  std::map<int, double> reference_energy;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

struct SolvedCase {
  RunResult result;
  std::vector<LocalElementOps> ops;
  SaddleSystem system;
  Solution solution;
};

SolvedCase solve_case(const CaseSpec& spec, const PolyMesh& mesh, const SolverOptions& options = {});

struct ConvergenceReport {
  std::string case_name;
  std::vector<RunResult> rows;
  std::vector<int> subdomains;
  std::vector<std::string> subdomain_names;
  double rate = 0.0;  ///< least-squares slope of log err_h against log h

  /// Columns: level, h, n_edge_dofs, n_vertex_dofs, err_H_L2, err_curl,
  /// p_inf, W_<subdomain>..., t_assemble_s, t_solve_s.
  std::string csv(bool omit_timings = false) const;
};

/// Least-squares slope of log(err) against log(h).
double fitted_rate(const std::vector<double>& h, const std::vector<double>& err);

ConvergenceReport run_convergence(const CaseSpec& spec, const std::vector<MeshSpec>& levels,
                                  const SolverOptions& options = {});

}  // namespace magvem

#endif  // MAGVEM_VERIFY_HPP
