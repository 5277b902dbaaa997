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

#pragma once

#include "uinv/cg_protocol.hpp"
#include "uinv/comb_sdp.hpp"
#include "uinv/reference_tables.hpp"
#include "uinv/sdp.hpp"
#include "uinv/sdp_io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace uinv::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kToleranceBreach = 2,
  kSizeCap = 3,
  kSolverFailure = 4,
};

/// Result of one command: exit code, JSON payload, and any files written
/// (path relative to the output directory -> content).
struct CommandResult {
  int exit_code = kOk;
  nlohmann::json payload;
  std::string text;
  std::map<std::string, std::string> files;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return os.str();
}

struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifacts;  // file -> sha256
  double wall_time = 0;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"parameters", parameters},
            {"seed", seed},
            {"artifacts", artifacts},
            {"wall_time", wall_time}};
  }
};

/// Writes result files plus manifest.json into `dir`.
inline RunManifest write_outputs(const std::filesystem::path& dir, const CommandResult& r, RunManifest m) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : r.files) {
    std::ofstream(dir / name, std::ios::binary) << content;
    m.artifacts[name] = sha256_hex(content);
  }
  std::ofstream(dir / "manifest.json", std::ios::binary) << m.to_json().dump(2) << "\n";
  return m;
}

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// simulate

enum class SimulateMode { kStandard, kCatalytic, kAdversarial };

inline std::optional<SimulateMode> parse_simulate_mode(const std::string& s) {
  if (s == "standard") return SimulateMode::kStandard;
  if (s == "catalytic") return SimulateMode::kCatalytic;
  if (s == "adversarial") return SimulateMode::kAdversarial;
  return std::nullopt;
}

struct SimulateOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  SimulateMode mode = SimulateMode::kStandard;
  CgBuild build = CgBuild::kGate;
};

inline CommandResult cmd_simulate(const SimulateOptions& o) {
  if (o.trials < 1) throw std::invalid_argument("--trials must be at least 1");
  const ProtocolCircuit pc = build_protocol(o.build);
  std::mt19937_64 rng(o.seed);
  std::vector<double> fid, cat;
  for (int t = 0; t < o.trials; ++t) {
    const DenseUnitary u = haar_unitary(2, rng);
    const Statevector phi = random_state({2}, rng);
    if (o.mode == SimulateMode::kStandard) {
      fid.push_back(run_inversion(pc, u, phi).fidelity);
      continue;
    }
    DenseUnitary source = u;
    if (o.mode == SimulateMode::kAdversarial) source = haar_unitary(2, rng);
    const Statevector catalyst = apply_to_subsystems(singlet(), source, {0});
    const auto r = run_catalytic(pc, u, phi, catalyst);
    fid.push_back(r.target_fidelity);
    cat.push_back(r.catalyst_fidelity);
  }
  auto summarize = [](const std::vector<double>& v) {
    double lo = v.front(), hi = v.front(), sum = 0;
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
    }
    return nlohmann::json{{"min_fidelity", lo}, {"mean_fidelity", sum / v.size()}, {"max_fidelity", hi}};
  };
  const char* mode_name = o.mode == SimulateMode::kStandard    ? "standard"
                          : o.mode == SimulateMode::kCatalytic ? "catalytic"
                                                               : "adversarial";
  CommandResult r;
  r.payload = {{"command", "simulate"},
               {"mode", mode_name},
               {"build", o.build == CgBuild::kGate ? "gate" : "matrix"},
               {"seed", o.seed},
               {"trials", o.trials},
               {"fidelities", fid},
               {"summary", summarize(fid)}};
  double worst = r.payload["summary"]["min_fidelity"].get<double>();
  if (!cat.empty()) {
    r.payload["catalyst_fidelities"] = cat;
    r.payload["catalyst_summary"] = summarize(cat);
    if (o.mode == SimulateMode::kCatalytic) worst = std::min(worst, r.payload["catalyst_summary"]["min_fidelity"].get<double>());
  }
  if (o.mode == SimulateMode::kAdversarial) {
    int below = 0;
    for (double f : fid) below += f < 1 - 1e-3;
    r.payload["summary"]["trials_below_1e-3"] = below;
  }
  const bool pass = o.mode == SimulateMode::kAdversarial || worst >= 1 - tol::kPhysics;
  r.payload["pass"] = pass;
  r.exit_code = pass ? kOk : kToleranceBreach;
  std::ostringstream os;
  os << "simulate " << mode_name << ": trials=" << o.trials << " seed=" << o.seed
     << " min_fidelity=" << std::setprecision(17) << r.payload["summary"]["min_fidelity"].get<double>();
  if (!cat.empty()) os << " min_catalyst_fidelity=" << r.payload["catalyst_summary"]["min_fidelity"].get<double>();
  os << (pass ? "" : "  [BREACH]") << "\n";
  r.text = os.str();
  r.files["simulate.json"] = r.payload.dump(2) + "\n";
  return r;
}

// ---------------------------------------------------------------------------
// solve / export

enum class SolveMode { kSequential, kParallel, kFullSequential, kFullParallel };

inline std::optional<SolveMode> parse_solve_mode(const std::string& s) {
  if (s == "seq" || s == "sequential") return SolveMode::kSequential;
  if (s == "par" || s == "parallel") return SolveMode::kParallel;
  if (s == "full-seq") return SolveMode::kFullSequential;
  if (s == "full-par") return SolveMode::kFullParallel;
  return std::nullopt;
}

inline std::string solve_mode_name(SolveMode m) {
  switch (m) {
    case SolveMode::kSequential: return "seq";
    case SolveMode::kParallel: return "par";
    case SolveMode::kFullSequential: return "full-seq";
    case SolveMode::kFullParallel: return "full-par";
  }
  return "?";
}

inline CombMode comb_mode(SolveMode m) {
  return m == SolveMode::kSequential || m == SolveMode::kFullSequential ? CombMode::kSequential : CombMode::kParallel;
}

inline bool is_full(SolveMode m) { return m == SolveMode::kFullSequential || m == SolveMode::kFullParallel; }

inline SdpProblem build_instance(int d, int n, SolveMode m, const SizeLimits& lim) {
  return is_full(m) ? build_full_sdp(d, n, comb_mode(m), lim) : build_reduced_sdp(d, n, comb_mode(m), lim);
}

struct SolveOptions {
  int d = 2;
  int n = 1;
  SolveMode mode = SolveMode::kSequential;
  SolverConfig solver;
  SizeLimits limits;
  bool check_reference = false;
  std::string instance_path;  // solver-only run on an imported instance when set
};

inline nlohmann::json census_json(const SdpProblem& p) {
  long vars = 0;
  for (int s : p.block_dims) vars += long(s) * (s + 1) / 2;
  return {{"block_dims", p.block_dims}, {"variables", vars}, {"constraints", p.constraints.size()}};
}

inline CommandResult cmd_solve(const SolveOptions& o) {
  CommandResult r;
  SdpProblem p;
  InstanceInfo info{o.d, o.n, solve_mode_name(o.mode)};
  if (!o.instance_path.empty()) {
    std::ifstream in(o.instance_path);
    if (!in) throw std::invalid_argument("cannot open instance " + o.instance_path);
    p = instance_from_json(nlohmann::json::parse(in), &info);
  } else {
    try {
      p = build_instance(o.d, o.n, o.mode, o.limits);
    } catch (const SizeLimitExceeded& e) {
      r.exit_code = kSizeCap;
      r.payload = {{"command", "solve"}, {"d", o.d}, {"n", o.n}, {"mode", info.mode}, {"error", e.what()}};
      r.text = std::string("size cap: ") + e.what() + "\n";
      return r;
    }
  }
  const SdpSolution s = solve(p, o.solver);
  const VerifyReport v = verify(p, s);
  r.payload = solution_to_json(s);
  r.payload["command"] = "solve";
  r.payload["d"] = info.d;
  r.payload["n"] = info.n;
  r.payload["mode"] = info.mode;
  r.payload["optimal_fidelity"] = s.objective_value;
  r.payload["block_census"] = census_json(p);
  r.payload["verify"] = {{"max_constraint_violation", v.max_constraint_violation},
                         {"gap", v.gap},
                         {"dual_min_eigenvalue", v.dual_min_eigenvalue}};
  r.exit_code = s.status == SolverStatus::kOptimal ? kOk : kSolverFailure;
  std::ostringstream os;
  os << "d=" << info.d << " n=" << info.n << " mode=" << info.mode << "  optimal_fidelity=" << fmt(s.objective_value, 6)
     << "  gap=" << s.gap << "  residual=" << s.primal_residual << "  status=" << to_string(s.status) << "\n";
  if (o.check_reference && o.instance_path.empty()) {
    if (auto ref = reference_cell(o.d, o.n, comb_mode(o.mode))) {
      const double dev = std::abs(s.objective_value - ref->value);
      r.payload["reference"] = {{"value", ref->value}, {"deviation", dev}, {"tolerance", ref->tolerance}};
      os << "reference=" << fmt(ref->value) << " deviation=" << dev << (dev <= ref->tolerance ? "" : "  [BREACH]") << "\n";
      if (dev > ref->tolerance && r.exit_code == kOk) r.exit_code = kToleranceBreach;
    }
  }
  r.text = os.str();
  r.files["solve.json"] = r.payload.dump(2) + "\n";
  return r;
}

inline CommandResult cmd_export(int d, int n, SolveMode mode, const SizeLimits& lim) {
  CommandResult r;
  try {
    const SdpProblem p = build_instance(d, n, mode, lim);
    r.payload = instance_to_json(p, {d, n, solve_mode_name(mode)});
  } catch (const SizeLimitExceeded& e) {
    r.exit_code = kSizeCap;
    r.text = std::string("size cap: ") + e.what() + "\n";
    return r;
  }
  r.files["instance.json"] = r.payload.dump() + "\n";
  r.text = "exported d=" + std::to_string(d) + " n=" + std::to_string(n) + " mode=" + solve_mode_name(mode) + "\n";
  return r;
}

// ---------------------------------------------------------------------------
// tables

struct TablesOptions {
  int d_min = 2, d_max = 6;
  int n_min = 1, n_max = 5;
  bool sequential = true;
  bool parallel = true;
  SolverConfig solver;
  SizeLimits limits;
  int jobs = 1;
};

struct CellResult {
  int d = 0, n = 0;
  CombMode mode = CombMode::kSequential;
  bool skipped = false;
  std::string note;
  double value = 0;
  double gap = 0;
  SolverStatus status = SolverStatus::kMaxIter;
};

inline CellResult solve_cell(int d, int n, CombMode mode, const SolverConfig& cfg, const SizeLimits& lim) {
  CellResult c{d, n, mode};
  try {
    const SdpSolution s = solve(build_reduced_sdp(d, n, mode, lim), cfg);
    c.value = s.objective_value;
    c.gap = s.gap;
    c.status = s.status;
  } catch (const SizeLimitExceeded& e) {
    c.skipped = true;
    c.note = "size cap";
  }
  return c;
}

inline std::vector<CellResult> solve_cells(const std::vector<std::tuple<int, int, CombMode>>& cells,
                                           const SolverConfig& cfg, const SizeLimits& lim, int jobs) {
  std::vector<CellResult> out(cells.size());
  jobs = std::max(1, jobs);
  for (std::size_t start = 0; start < cells.size(); start += jobs) {
    std::vector<std::future<CellResult>> batch;
    for (std::size_t k = start; k < std::min(cells.size(), start + jobs); ++k) {
      auto [d, n, m] = cells[k];
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, solve_cell, d, n, m, cfg, lim));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) out[start + k] = batch[k].get();
  }
  return out;
}

inline CommandResult cmd_tables(const TablesOptions& o) {
  if (o.d_min < 2 || o.n_min < 1 || o.d_max < o.d_min || o.n_max < o.n_min) {
    throw std::invalid_argument("tables: empty or invalid range");
  }
  std::vector<CombMode> modes;
  if (o.sequential) modes.push_back(CombMode::kSequential);
  if (o.parallel) modes.push_back(CombMode::kParallel);
  std::vector<std::tuple<int, int, CombMode>> cells;
  for (auto m : modes)
    for (int d = o.d_min; d <= o.d_max; ++d)
      for (int n = o.n_min; n <= o.n_max; ++n) cells.emplace_back(d, n, m);
  const auto results = solve_cells(cells, o.solver, o.limits, o.jobs);

  CommandResult r;
  r.payload = {{"command", "tables"}, {"cells", nlohmann::json::array()}};
  std::ostringstream dev_csv, text;
  dev_csv << "mode,d,n,computed,reference,deviation,tolerance,status\n";
  bool breach = false;
  for (auto m : modes) {
    std::ostringstream grid;
    grid << "d";
    for (int n = o.n_min; n <= o.n_max; ++n) grid << ",n=" << n;
    grid << "\n";
    text << to_string(m) << "\n";
    for (int d = o.d_min; d <= o.d_max; ++d) {
      grid << d;
      text << "  d=" << d;
      for (int n = o.n_min; n <= o.n_max; ++n) {
        const auto& c = *std::find_if(results.begin(), results.end(),
                                      [&](const CellResult& x) { return x.d == d && x.n == n && x.mode == m; });
        const auto ref = reference_cell(d, n, m);
        nlohmann::json jc = {{"mode", to_string(m)}, {"d", d}, {"n", n}};
        std::string status;
        if (c.skipped) {
          status = "SKIPPED";
          grid << ",SKIPPED";
          text << "  SKIPPED";
        } else {
          grid << "," << fmt(c.value, 6);
          text << "  " << fmt(c.value);
          jc["computed"] = c.value;
          jc["gap"] = c.gap;
          jc["solver_status"] = to_string(c.status);
          if (c.status != SolverStatus::kOptimal) {
            status = "SOLVER_FAILURE";
            breach = true;
          } else if (ref) {
            const double dev = std::abs(c.value - ref->value);
            status = dev <= ref->tolerance ? "PASS" : "FAIL";
            breach = breach || status == "FAIL";
            jc["deviation"] = dev;
          } else {
            status = "NO_REFERENCE";
          }
        }
        if (ref) {
          jc["reference"] = ref->value;
          jc["tolerance"] = ref->tolerance;
        }
        jc["status"] = status;
        dev_csv << to_string(m) << "," << d << "," << n << "," << (c.skipped ? "" : fmt(c.value, 6)) << ","
                << (ref ? fmt(ref->value) : "") << ","
                << (jc.contains("deviation") ? fmt(jc["deviation"].get<double>(), 6) : "") << ","
                << (ref ? fmt(ref->tolerance, 4) : "") << "," << status << "\n";
        r.payload["cells"].push_back(jc);
      }
      grid << "\n";
      text << "\n";
    }
    r.files["table_" + to_string(m) + ".csv"] = grid.str();
  }
  r.files["deviations.csv"] = dev_csv.str();
  r.payload["pass"] = !breach;
  r.exit_code = breach ? kToleranceBreach : kOk;
  r.text = text.str();
  return r;
}

// ---------------------------------------------------------------------------
// irreps

inline CommandResult cmd_irreps(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("irreps: need n >= 1, d >= 1");
  CommandResult r;
  r.payload = {{"command", "irreps"}, {"n", n}, {"d", d}, {"irreps", nlohmann::json::array()}};
  for (const auto& mu : young_diagrams(n, d)) {
    nlohmann::json m_mu = nlohmann::json::object();
    for (int dd = 1; dd <= d; ++dd) m_mu[std::to_string(dd)] = su_dim(mu, dd);
    nlohmann::json gens = nlohmann::json::array();
    for (int k = 1; k < n; ++k) {
      const RMatrix g = generator_matrix(mu, k);
      std::vector<double> flat;
      for (Eigen::Index a = 0; a < g.rows(); ++a)
        for (Eigen::Index b = 0; b < g.cols(); ++b) flat.push_back(g(a, b));
      gens.push_back(flat);
    }
    r.payload["irreps"].push_back({{"shape", mu.rows}, {"d_mu", irrep_dim(mu)}, {"m_mu", m_mu}, {"generators", gens}});
  }
  r.files["irreps.json"] = r.payload.dump(2) + "\n";
  r.text = r.payload.dump(2) + "\n";
  return r;
}

}  // namespace uinv::cli
