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

#include "uinv/sdp.hpp"

#include <json.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace uinv {

/// Metadata carried alongside an exported instance.
struct InstanceInfo {
  int d = 0;
  int n = 0;
  std::string mode;  // "sequential", "parallel", "full-sequential", "full-parallel" or free text
};

namespace detail {

inline std::vector<double> upper_triangle(const RMatrix& m) {
  std::vector<double> out;
  out.reserve(std::size_t(m.rows()) * (m.rows() + 1) / 2);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = r; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

inline RMatrix from_upper_triangle(const std::vector<double>& v, int s) {
  if (v.size() != std::size_t(s) * (s + 1) / 2) throw std::invalid_argument("upper triangle has wrong length");
  RMatrix m(s, s);
  std::size_t k = 0;
  for (int r = 0; r < s; ++r)
    for (int c = r; c < s; ++c) m(r, c) = m(c, r) = v[k++];
  return m;
}

}  // namespace detail

/// Instance schema:
///   {d, n, mode, block_dims[], objective[][],
///    constraints[{blocks[{index, coeff_upper_triangle[]}], rhs}]}
/// Triangles are row-major over r <= c of the symmetric coefficient matrix,
/// so Tr(A X) = sum over r,c of A[r][c] X[r][c].
inline nlohmann::json instance_to_json(const SdpProblem& p, const InstanceInfo& info = {}) {
  p.validate();
  nlohmann::json j;
  j["d"] = info.d;
  j["n"] = info.n;
  j["mode"] = info.mode;
  j["block_dims"] = p.block_dims;
  j["objective"] = nlohmann::json::array();
  for (const auto& c : p.objective) j["objective"].push_back(detail::upper_triangle(c));
  j["constraints"] = nlohmann::json::array();
  for (const auto& con : p.constraints) {
    std::map<int, RMatrix> dense;
    for (const auto& e : con.entries) {
      auto it = dense.find(e.block);
      if (it == dense.end()) {
        const int s = p.block_dims[e.block];
        it = dense.emplace(e.block, RMatrix::Zero(s, s)).first;
      }
      it->second(e.row, e.col) += e.value;
      if (e.row != e.col) it->second(e.col, e.row) += e.value;
    }
    nlohmann::json jc;
    jc["rhs"] = con.rhs;
    jc["blocks"] = nlohmann::json::array();
    for (const auto& [b, m] : dense) {
      jc["blocks"].push_back({{"index", b}, {"coeff_upper_triangle", detail::upper_triangle(m)}});
    }
    j["constraints"].push_back(std::move(jc));
  }
  return j;
}

inline SdpProblem instance_from_json(const nlohmann::json& j, InstanceInfo* info = nullptr) {
  SdpProblem p;
  p.block_dims = j.at("block_dims").get<std::vector<int>>();
  const auto& obj = j.at("objective");
  if (obj.size() != p.block_dims.size()) throw std::invalid_argument("objective count does not match block_dims");
  for (std::size_t b = 0; b < obj.size(); ++b) {
    p.objective.push_back(detail::from_upper_triangle(obj[b].get<std::vector<double>>(), p.block_dims[b]));
  }
  for (const auto& jc : j.at("constraints")) {
    Constraint c;
    c.rhs = jc.at("rhs").get<double>();
    for (const auto& jb : jc.at("blocks")) {
      const int b = jb.at("index").get<int>();
      if (b < 0 || b >= static_cast<int>(p.block_dims.size())) throw std::invalid_argument("constraint block index out of range");
      const auto tri = jb.at("coeff_upper_triangle").get<std::vector<double>>();
      const int s = p.block_dims[b];
      if (tri.size() != std::size_t(s) * (s + 1) / 2) throw std::invalid_argument("upper triangle has wrong length");
      std::size_t k = 0;
      for (int r = 0; r < s; ++r) {
        for (int col = r; col < s; ++col, ++k) {
          if (tri[k] != 0.0) c.entries.push_back({b, r, col, tri[k]});
        }
      }
    }
    p.constraints.push_back(std::move(c));
  }
  if (info) {
    info->d = j.value("d", 0);
    info->n = j.value("n", 0);
    info->mode = j.value("mode", std::string());
  }
  p.validate();
  return p;
}

/// Solution schema: {objective, dual_objective, gap, residual, dual_residual,
/// iterations, dropped_constraints, status, min_eigenvalues[]}.
inline nlohmann::json solution_to_json(const SdpSolution& s) {
  nlohmann::json j;
  j["objective"] = s.objective_value;
  j["dual_objective"] = s.dual_objective;
  j["gap"] = s.gap;
  j["residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["iterations"] = s.iterations;
  j["dropped_constraints"] = s.dropped_constraints;
  j["status"] = to_string(s.status);
  std::vector<double> mins;
  for (const auto& b : s.blocks) {
    mins.push_back(b.rows() == 0 ? 0.0
                                 : Eigen::SelfAdjointEigenSolver<RMatrix>(b, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
  }
  j["min_eigenvalues"] = mins;
  return j;
}

}  // namespace uinv
