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

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

using namespace uinv;
using namespace uinv::cli;

struct Common {
  std::string out_dir;
  bool json = false;
};

int emit(const CommandResult& r, const Common& c, RunManifest m, double seconds) {
  if (c.json) {
    std::cout << r.payload.dump(2) << "\n";
  } else {
    std::cout << r.text;
  }
  if (!c.out_dir.empty()) {
    m.wall_time = seconds;
    write_outputs(c.out_dir, r, std::move(m));
  }
  return r.exit_code;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out_dir, "Directory for result files and manifest.json");
  app->add_flag("--json", c.json, "Print the JSON payload instead of the text summary");
}

void add_solver_flags(CLI::App* app, SolverConfig& cfg) {
  app->add_option("--tol-gap", cfg.gap_tol, "Duality gap tolerance")->check(CLI::PositiveNumber);
  app->add_option("--tol-feas", cfg.feasibility_tol, "Primal/dual feasibility tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", cfg.max_iterations, "Interior-point iteration limit")->check(CLI::PositiveNumber);
}

void add_limit_flags(CLI::App* app, SizeLimits& lim) {
  app->add_option("--max-vars", lim.max_variables, "Cap on reduced SDP scalar variables");
  app->add_option("--full-cap", lim.full_dimension_cap, "Cap on the full-space Choi dimension");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary inversion: protocol simulation and comb SDPs"};
  app.require_subcommand(1);
  Common common;

  SimulateOptions sim;
  std::string sim_mode = "standard", sim_build = "gate";
  bool catalytic_flag = false, adversarial_flag = false;
  auto* simulate = app.add_subcommand("simulate", "Simulate the 7-qubit inversion circuit on Haar-random inputs");
  simulate->add_option("--trials", sim.trials, "Number of random (U, phi) pairs")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--mode", sim_mode, "standard | catalytic | adversarial")
      ->check(CLI::IsMember({"standard", "catalytic", "adversarial"}));
  simulate->add_option("--build", sim_build, "Coupling transforms from gates or from the defining relations")
      ->check(CLI::IsMember({"gate", "matrix"}));
  simulate->add_flag("--catalytic", catalytic_flag, "Same as --mode catalytic");
  simulate->add_flag("--adversarial-catalyst", adversarial_flag, "Same as --mode adversarial");
  add_common(simulate, common);

  SolveOptions sol;
  std::string solve_mode = "seq";
  auto* solve_cmd = app.add_subcommand("solve", "Solve one optimal-fidelity SDP");
  solve_cmd->add_option("--d", sol.d, "Local dimension")->check(CLI::Range(2, 64));
  solve_cmd->add_option("--n", sol.n, "Number of calls")->check(CLI::Range(1, 64));
  solve_cmd->add_option("--mode", solve_mode, "seq | par | full-seq | full-par")
      ->check(CLI::IsMember({"seq", "par", "full-seq", "full-par", "sequential", "parallel"}));
  solve_cmd->add_option("--instance", sol.instance_path, "Solve an exported instance JSON instead of building one");
  solve_cmd->add_flag("--check-reference", sol.check_reference, "Compare against the published table value");
  add_solver_flags(solve_cmd, sol.solver);
  add_limit_flags(solve_cmd, sol.limits);
  add_common(solve_cmd, common);

  int ex_d = 2, ex_n = 1;
  std::string ex_mode = "seq";
  SizeLimits ex_lim;
  auto* export_cmd = app.add_subcommand("export", "Write an SDP instance as JSON (instance.json)");
  export_cmd->add_option("--d", ex_d, "Local dimension")->check(CLI::Range(2, 64));
  export_cmd->add_option("--n", ex_n, "Number of calls")->check(CLI::Range(1, 64));
  export_cmd->add_option("--mode", ex_mode, "seq | par | full-seq | full-par")
      ->check(CLI::IsMember({"seq", "par", "full-seq", "full-par", "sequential", "parallel"}));
  add_limit_flags(export_cmd, ex_lim);
  add_common(export_cmd, common);

  TablesOptions tab;
  std::string tab_mode = "both";
  auto* tables = app.add_subcommand("tables", "Recompute the sequential/parallel fidelity tables");
  tables->add_option("--d-min", tab.d_min, "Smallest d");
  tables->add_option("--d-max", tab.d_max, "Largest d");
  tables->add_option("--n-min", tab.n_min, "Smallest n");
  tables->add_option("--n-max", tab.n_max, "Largest n");
  tables->add_option("--mode", tab_mode, "seq | par | both")->check(CLI::IsMember({"seq", "par", "both"}));
  tables->add_option("--jobs", tab.jobs, "Cells solved concurrently")->check(CLI::PositiveNumber);
  add_solver_flags(tables, tab.solver);
  add_limit_flags(tables, tab.limits);
  add_common(tables, common);

  int ir_n = 3, ir_d = 2;
  auto* irreps = app.add_subcommand("irreps", "Dump symmetric-group irreps (dimensions and generators) as JSON");
  irreps->add_option("--n", ir_n, "Number of boxes")->check(CLI::Range(1, 10));
  irreps->add_option("--d", ir_d, "Depth bound / local dimension")->check(CLI::Range(1, 10));
  add_common(irreps, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    if (*simulate) {
      if (catalytic_flag) sim_mode = "catalytic";
      if (adversarial_flag) sim_mode = "adversarial";
      sim.mode = *parse_simulate_mode(sim_mode);
      sim.build = sim_build == "gate" ? CgBuild::kGate : CgBuild::kMatrix;
      auto r = cmd_simulate(sim);
      return emit(r, common,
                  {"simulate", {{"trials", sim.trials}, {"mode", sim_mode}, {"build", sim_build}}, sim.seed, {}, 0},
                  elapsed());
    }
    if (*solve_cmd) {
      sol.mode = *parse_solve_mode(solve_mode);
      auto r = cmd_solve(sol);
      nlohmann::json params = {{"d", sol.d},
                               {"n", sol.n},
                               {"mode", solve_mode_name(sol.mode)},
                               {"tol_gap", sol.solver.gap_tol},
                               {"tol_feas", sol.solver.feasibility_tol},
                               {"instance", sol.instance_path}};
      return emit(r, common, {"solve", params, sol.solver.seed, {}, 0}, elapsed());
    }
    if (*export_cmd) {
      auto r = cmd_export(ex_d, ex_n, *parse_solve_mode(ex_mode), ex_lim);
      if (common.out_dir.empty() && r.exit_code == kOk) {
        std::cout << r.files["instance.json"];
        return kOk;
      }
      Common quiet = common;
      quiet.json = false;
      return emit(r, quiet, {"export", {{"d", ex_d}, {"n", ex_n}, {"mode", ex_mode}}, 0, {}, 0}, elapsed());
    }
    if (*tables) {
      tab.sequential = tab_mode != "par";
      tab.parallel = tab_mode != "seq";
      auto r = cmd_tables(tab);
      nlohmann::json params = {{"d_min", tab.d_min}, {"d_max", tab.d_max}, {"n_min", tab.n_min},
                               {"n_max", tab.n_max}, {"mode", tab_mode},    {"max_vars", tab.limits.max_variables}};
      return emit(r, common, {"tables", params, 0, {}, 0}, elapsed());
    }
    if (*irreps) {
      auto r = cmd_irreps(ir_n, ir_d);
      Common c = common;
      c.json = false;
      return emit(r, c, {"irreps", {{"n", ir_n}, {"d", ir_d}}, 0, {}, 0}, elapsed());
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}
