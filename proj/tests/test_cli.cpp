// Copyright 2026 The uinv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uinv/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace uinv;
using namespace uinv::cli;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Simulate, StandardModePasses) {
  const auto r = cmd_simulate({100, 7, SimulateMode::kStandard, CgBuild::kGate});
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_GE(r.payload["summary"]["min_fidelity"].get<double>(), 1 - 1e-10);
  EXPECT_EQ(r.payload["fidelities"].size(), 100u);
  EXPECT_TRUE(r.payload["pass"].get<bool>());
  EXPECT_TRUE(r.files.count("simulate.json"));
}

TEST(Simulate, CatalyticModeReportsCatalyst) {
  const auto r = cmd_simulate({1, 0, SimulateMode::kCatalytic, CgBuild::kGate});
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_GE(r.payload["catalyst_summary"]["min_fidelity"].get<double>(), 1 - 1e-10);
  EXPECT_GE(r.payload["catalyst_fidelities"][0].get<double>(), 1 - 1e-10);
}

TEST(Simulate, AdversarialModeReportsWithoutFailing) {
  const auto r = cmd_simulate({10, 3, SimulateMode::kAdversarial, CgBuild::kGate});
  EXPECT_EQ(r.exit_code, kOk);
  for (const auto& f : r.payload["fidelities"]) EXPECT_LT(f.get<double>(), 1.0);
  EXPECT_TRUE(r.payload["summary"].contains("trials_below_1e-3"));
}

TEST(Simulate, MatrixBuild) {
  const auto r = cmd_simulate({20, 5, SimulateMode::kStandard, CgBuild::kMatrix});
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_EQ(r.payload["build"], "matrix");
}

TEST(Simulate, RejectsZeroTrials) {
  EXPECT_THROW(cmd_simulate({0, 0, SimulateMode::kStandard, CgBuild::kGate}), std::invalid_argument);
}

TEST(Simulate, PayloadIsByteReproducible) {
  const SimulateOptions o{25, 11, SimulateMode::kCatalytic, CgBuild::kGate};
  EXPECT_EQ(cmd_simulate(o).payload.dump(), cmd_simulate(o).payload.dump());
  EXPECT_EQ(cmd_simulate(o).files.at("simulate.json"), cmd_simulate(o).files.at("simulate.json"));
}

TEST(Solve, SequentialCell) {
  SolveOptions o;
  o.d = 2;
  o.n = 4;
  o.mode = SolveMode::kSequential;
  o.check_reference = true;
  const auto r = cmd_solve(o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_NEAR(r.payload["optimal_fidelity"].get<double>(), 1.0, 1e-4);
  for (const char* key : {"gap", "residual", "block_census", "status", "reference"}) EXPECT_TRUE(r.payload.contains(key));
}

TEST(Solve, ParallelCell) {
  SolveOptions o;
  o.d = 2;
  o.n = 2;
  o.mode = SolveMode::kParallel;
  const auto r = cmd_solve(o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_NEAR(r.payload["optimal_fidelity"].get<double>(), 0.6545, 1e-3);
}

TEST(Solve, FullAndReducedAgree) {
  SolveOptions o;
  o.d = 2;
  o.n = 1;
  o.mode = SolveMode::kFullSequential;
  const double full = cmd_solve(o).payload["optimal_fidelity"].get<double>();
  o.mode = SolveMode::kSequential;
  const double reduced = cmd_solve(o).payload["optimal_fidelity"].get<double>();
  EXPECT_NEAR(full, reduced, 1e-5);
}

TEST(Solve, SizeCapHasDistinctExitCode) {
  SolveOptions o;
  o.d = 3;
  o.n = 5;
  const auto r = cmd_solve(o);
  EXPECT_EQ(r.exit_code, kSizeCap);
  EXPECT_NE(r.exit_code, kSolverFailure);
  EXPECT_TRUE(r.payload.contains("error"));
}

TEST(Solve, SolverFailureExitCode) {
  SolveOptions o;
  o.d = 2;
  o.n = 3;
  o.solver.max_iterations = 2;
  EXPECT_EQ(cmd_solve(o).exit_code, kSolverFailure);
}

TEST(Solve, ImportedInstance) {
  const auto dir = std::filesystem::temp_directory_path() / "uinv_test_instance";
  std::filesystem::remove_all(dir);
  const auto ex = cmd_export(2, 2, SolveMode::kParallel, {});
  ASSERT_EQ(ex.exit_code, kOk);
  write_outputs(dir, ex, {"export", {}, 0, {}, 0});
  SolveOptions o;
  o.instance_path = (dir / "instance.json").string();
  const auto r = cmd_solve(o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_NEAR(r.payload["optimal_fidelity"].get<double>(), 0.6545, 1e-3);
  EXPECT_EQ(r.payload["mode"], "par");
  std::filesystem::remove_all(dir);
  o.instance_path = (dir / "missing.json").string();
  EXPECT_THROW(cmd_solve(o), std::invalid_argument);
}

TEST(Export, SizeCap) { EXPECT_EQ(cmd_export(3, 5, SolveMode::kSequential, {}).exit_code, kSizeCap); }

TEST(Tables, SmallRangeMatchesReference) {
  TablesOptions o;
  o.d_min = 2;
  o.d_max = 4;
  o.n_min = 1;
  o.n_max = 2;
  o.jobs = 2;
  const auto r = cmd_tables(o);
  EXPECT_EQ(r.exit_code, kOk);
  const auto& seq = r.files.at("table_sequential.csv");
  EXPECT_EQ(seq.substr(0, seq.find('\n')), "d,n=1,n=2");
  EXPECT_NE(seq.find("4,0.125000,0.187500"), std::string::npos);
  const auto& dev = r.files.at("deviations.csv");
  EXPECT_EQ(dev.substr(0, dev.find('\n')), "mode,d,n,computed,reference,deviation,tolerance,status");
  EXPECT_EQ(dev.find("FAIL"), std::string::npos);
  EXPECT_TRUE(r.files.count("table_parallel.csv"));
}

TEST(Tables, SixthDimensionFirstCell) {
  TablesOptions o;
  o.d_min = o.d_max = 6;
  o.n_min = o.n_max = 1;
  o.parallel = false;
  const auto r = cmd_tables(o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_NEAR(r.payload["cells"][0]["computed"].get<double>(), 2.0 / 36.0, 2e-4);
  EXPECT_FALSE(r.files.count("table_parallel.csv"));
}

TEST(Tables, CappedCellsAreSkipped) {
  TablesOptions o;
  o.d_min = o.d_max = 2;
  o.n_min = 1;
  o.n_max = 3;
  o.parallel = false;
  o.limits.max_variables = 100;
  const auto r = cmd_tables(o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_NE(r.files.at("table_sequential.csv").find("SKIPPED"), std::string::npos);
  EXPECT_NE(r.files.at("deviations.csv").find(",SKIPPED"), std::string::npos);
}

TEST(Tables, BreachSetsExitCode) {
  TablesOptions o;
  o.d_min = o.d_max = 2;
  o.n_min = o.n_max = 2;
  o.parallel = false;
  o.solver.max_iterations = 1;
  EXPECT_EQ(cmd_tables(o).exit_code, kToleranceBreach);
}

TEST(Tables, RejectsEmptyRange) {
  TablesOptions o;
  o.d_max = 1;
  EXPECT_THROW(cmd_tables(o), std::invalid_argument);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, ListsEveryFileWithDigest) {
  const auto dir = std::filesystem::temp_directory_path() / "uinv_test_manifest";
  std::filesystem::remove_all(dir);
  const auto r = cmd_simulate({5, 1, SimulateMode::kStandard, CgBuild::kGate});
  const auto m = write_outputs(dir, r, {"simulate", {{"trials", 5}}, 1, {}, 0.25});
  const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  for (const char* key : {"command", "parameters", "seed", "artifacts", "wall_time"}) EXPECT_TRUE(j.contains(key));
  ASSERT_EQ(j["artifacts"].size(), r.files.size());
  for (const auto& [name, content] : r.files) {
    EXPECT_EQ(j["artifacts"][name], sha256_hex(read_file(dir / name)));
    EXPECT_EQ(m.artifacts.at(name), sha256_hex(content));
  }
  std::filesystem::remove_all(dir);
}

TEST(Irreps, DimensionsAndGenerators) {
  const auto r = cmd_irreps(3, 2);
  const auto& irreps = r.payload["irreps"];
  ASSERT_EQ(irreps.size(), 2u);
  EXPECT_EQ(irreps[0]["shape"], std::vector<int>({3}));
  EXPECT_EQ(irreps[1]["d_mu"], 2);
  EXPECT_EQ(irreps[1]["m_mu"]["2"], 2);
  EXPECT_EQ(irreps[1]["generators"].size(), 2u);
  EXPECT_EQ(irreps[1]["generators"][0].size(), 4u);
  EXPECT_THROW(cmd_irreps(0, 2), std::invalid_argument);
}

TEST(ModeParsing, Aliases) {
  EXPECT_EQ(parse_solve_mode("seq"), SolveMode::kSequential);
  EXPECT_EQ(parse_solve_mode("parallel"), SolveMode::kParallel);
  EXPECT_EQ(parse_solve_mode("full-par"), SolveMode::kFullParallel);
  EXPECT_FALSE(parse_solve_mode("bogus").has_value());
  EXPECT_EQ(parse_simulate_mode("adversarial"), SimulateMode::kAdversarial);
  EXPECT_FALSE(parse_simulate_mode("x").has_value());
}
