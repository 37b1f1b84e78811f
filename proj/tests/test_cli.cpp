// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the magvem executable as a subprocess.

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("magvem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args) const {
    const std::string err_file = path("stderr.txt");
    const std::string cmd = std::string(MAGVEM_CLI_PATH) + " " + args + " 2>" + err_file;
    Outcome r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.err = ss.str();
    return r;
  }

  static json error_of(const Outcome& r) {
    const auto nl = r.err.find_last_of('\n', r.err.size() >= 2 ? r.err.size() - 2 : 0);
    return json::parse(nl == std::string::npos ? r.err : r.err.substr(nl + 1));
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  const Outcome bad = run("solve --case test7 --mesh structured:2");
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, GenerateValidateConvertAudit) {
  const Outcome gen = run("mesh gen --perturbed 3 --amplitude 0.15 --seed 4 -o " + path("m.json"));
  ASSERT_EQ(gen.code, 0) << gen.err;
  const Outcome val = run("mesh validate " + path("m.json"));
  ASSERT_EQ(val.code, 0) << val.err;
  const json v = json::parse(val.out);
  EXPECT_EQ(v["summary"]["cells"], 27);
  EXPECT_TRUE(v["validation"]["ok"].get<bool>());
  ASSERT_EQ(run("mesh convert " + path("m.json") + " " + path("m.vtk")).code, 0);
  EXPECT_EQ(run("mesh validate " + path("m.vtk")).code, 0);
  const Outcome audit = run("mesh audit " + path("m.json"));
  ASSERT_EQ(audit.code, 0) << audit.err;
  const json a = json::parse(audit.out);
  EXPECT_TRUE(a["CG_zero"].get<bool>());
  EXPECT_TRUE(a["DC_zero"].get<bool>());
  EXPECT_TRUE(a["ok"].get<bool>());
  EXPECT_EQ(run("mesh audit extruded:2").code, 0);
}

TEST_F(Cli, GeneratorErrorsAreReported) {
  const Outcome r = run("mesh gen --perturbed 3 --amplitude 0.7 -o " + path("m.json"));
  EXPECT_EQ(r.code, 3);
  const json e = error_of(r);
  EXPECT_EQ(e["error"], "PerturbationRejected");
  EXPECT_EQ(e["exit_code"], 3);
  EXPECT_FALSE(fs::exists(path("m.json")));
  EXPECT_EQ(run("mesh gen -o " + path("m.json")).code, 2);
}

TEST_F(Cli, MalformedFilesMapToExitCodes) {
  write("bad.json", "{\n  \"vertices\": [[0, 0, 0]],\n  oops\n}\n");
  Outcome r = run("mesh validate " + path("bad.json"));
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(error_of(r)["error"], "ParseError");
  r = run("mesh validate " + path("missing.json"));
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(error_of(r)["error"], "IoError");
  ASSERT_EQ(run("mesh gen --structured 2 -o " + path("good.json")).code, 0);
  std::ifstream good(path("good.json"));
  json mesh = json::parse(good);
  mesh["cells"][1]["faces"].erase(0);
  write("open.json", mesh.dump());
  r = run("mesh validate " + path("open.json"));
  EXPECT_EQ(r.code, 6) << r.err;
  EXPECT_EQ(error_of(r)["error"], "TopologyError");
}

TEST_F(Cli, SolveWritesReportAndVtk) {
  const Outcome r = run("solve --case test1 --mesh structured:3 --report-json " + path("r.json") + " --export-vtk " +
                    path("h.vtk"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json out = json::parse(r.out);
  EXPECT_LT(out["p_inf"].get<double>(), 1e-10);
  EXPECT_GT(out["err_H_L2"].get<double>(), 0.0);
  EXPECT_TRUE(out.contains("energies"));
  std::ifstream rep(path("r.json"));
  EXPECT_EQ(json::parse(rep)["case"], out["case"]);
  std::ifstream vtk(path("h.vtk"));
  std::stringstream ss;
  ss << vtk.rdbuf();
  EXPECT_NE(ss.str().find("VECTORS H"), std::string::npos);
  EXPECT_NE(ss.str().find("B_magnitude"), std::string::npos);
  EXPECT_EQ(run("mesh validate " + path("h.vtk")).code, 0);
}

TEST_F(Cli, SolveCaseFromFile) {
  write("case.json", R"({"boundary": "dirichlet", "exact_field": {"constant": [1, 2, 3]}})");
  const Outcome r = run("solve --case from-file --case-file " + path("case.json") + " --mesh perturbed:2 --solver minres");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(json::parse(r.out)["curl_identity"].get<double>(), 1e-10);
  write("bad_case.json", R"({"boundary": "robin"})");
  EXPECT_EQ(run("solve --case from-file --case-file " + path("bad_case.json") + " --mesh structured:2").code, 5);
  write("res.json", R"({"formulation": "hgrad_augmented"})");
  EXPECT_EQ(run("solve --case from-file --case-file " + path("res.json") + " --mesh structured:2").code, 10);
}

TEST_F(Cli, SolverFailuresMapToExitCodes) {
  EXPECT_EQ(run("solve --case test1 --mesh structured:1").code, 10);
  const Outcome r = run("solve --case test1 --mesh structured:3 --solver minres --tol 1e-30");
  EXPECT_EQ(r.code, 9) << r.err;
  EXPECT_EQ(error_of(r)["error"], "ToleranceNotReached");
}

TEST_F(Cli, ConvergenceIsReproducible) {
  const std::string args = "convergence --case test1 --family structured --levels 2,3,4 --omit-timings --csv ";
  const Outcome a = run(args + path("a.csv"));
  const Outcome b = run(args + path("b.csv"));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::ifstream fa(path("a.csv")), fb(path("b.csv"));
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().rfind("level,h,", 0), 0u);
  EXPECT_NE(a.out.find("# rate"), std::string::npos);
}

TEST_F(Cli, AssertRateAndConfigPrecedence) {
  write("cfg.ini", "[convergence]\nrate-min=5.0\nrate-max=6.0\n");
  const std::string base = "--config " + path("cfg.ini") + " convergence --case test1 --family structured --levels 2,3 --assert-rate";
  const Outcome fail = run(base);
  EXPECT_EQ(fail.code, 11) << fail.err;
  const Outcome pass = run(base + " --rate-min 0.1 --rate-max 3");
  EXPECT_EQ(pass.code, 0) << pass.err;
}

}  // namespace
