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

#include "uinv/tensor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace uinv {

/// One stored coefficient of a symmetric constraint matrix: A[row][col] =
/// A[col][row] = value, with row <= col.
struct SparseEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0;
};

/// sum_b Tr(A_b X_b) = rhs.
struct Constraint {
  std::vector<SparseEntry> entries;
  double rhs = 0;
};

/// maximize sum_b Tr(C_b X_b) subject to the constraints and X_b PSD.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<RMatrix> objective;
  std::vector<Constraint> constraints;

  int num_blocks() const { return static_cast<int>(block_dims.size()); }

  void validate() const {
    if (objective.size() != block_dims.size()) throw std::invalid_argument("SdpProblem: objective/block count mismatch");
    for (size_t b = 0; b < block_dims.size(); ++b) {
      if (block_dims[b] <= 0) throw std::invalid_argument("SdpProblem: nonpositive block size");
      const auto& c = objective[b];
      if (c.rows() != block_dims[b] || c.cols() != block_dims[b]) {
        throw std::invalid_argument("SdpProblem: objective block has wrong size");
      }
      if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("SdpProblem: objective block not symmetric");
      }
    }
    for (const auto& con : constraints) {
      if (!std::isfinite(con.rhs)) throw std::invalid_argument("SdpProblem: non-finite rhs");
      for (const auto& e : con.entries) {
        if (e.block < 0 || e.block >= num_blocks() || e.row < 0 || e.row > e.col || e.col >= block_dims[e.block] ||
            !std::isfinite(e.value)) {
          throw std::invalid_argument("SdpProblem: malformed constraint entry");
        }
      }
    }
  }
};

struct SolverConfig {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-6;
  int max_iterations = 200;
  double initial_point_scale = 1.0;
  std::uint64_t seed = 0;
  double rank_threshold = 1e-10;
  double step_fraction = 0.98;
  std::function<void(int, double, double, double)> on_iteration;  // (iter, mu, pinf, gap)
};

enum class SolverStatus { kOptimal, kMaxIter, kInfeasibleDetected };

inline std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kOptimal: return "optimal";
    case SolverStatus::kMaxIter: return "max_iter";
    case SolverStatus::kInfeasibleDetected: return "infeasible_detected";
  }
  return "unknown";
}

struct SdpSolution {
  std::vector<RMatrix> blocks;
  RVector dual;
  double objective_value = 0;
  double dual_objective = 0;
  double gap = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  int iterations = 0;
  int dropped_constraints = 0;
  SolverStatus status = SolverStatus::kMaxIter;
  std::vector<double> mu_history;
};

namespace detail {

inline double constraint_value(const Constraint& c, const std::vector<RMatrix>& x) {
  double v = 0;
  for (const auto& e : c.entries) v += (e.row == e.col ? 1.0 : 2.0) * e.value * x[e.block](e.row, e.col);
  return v;
}

inline double frob_dot(const std::vector<RMatrix>& a, const std::vector<RMatrix>& b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

inline double functional_norm(const Constraint& c) {
  double s = 0;
  for (const auto& e : c.entries) {
    const double w = (e.row == e.col ? 1.0 : 2.0) * e.value;
    s += w * w;
  }
  return std::sqrt(s);
}

// Largest alpha <= 1/fraction with X + alpha dX PSD, given chol(X) = L L^T.
inline double max_step(const RMatrix& x, const RMatrix& dx) {
  Eigen::LLT<RMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMatrix l_inv_dx = llt.matrixL().solve(dx);
  RMatrix s = llt.matrixL().solve(l_inv_dx.transpose()).transpose();
  s = 0.5 * (s + s.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<RMatrix>(s, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

inline bool is_pd(const std::vector<RMatrix>& x) {
  for (const auto& b : x) {
    if (Eigen::LLT<RMatrix>(b).info() != Eigen::Success) return false;
  }
  return true;
}

}  // namespace detail

/// Primal-dual interior point method (HKM direction, Mehrotra correction,
/// infeasible start) on the rank-reduced, row-normalized problem.
inline SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg = {}) {
  problem.validate();
  if (cfg.feasibility_tol <= 0 || cfg.gap_tol <= 0 || cfg.max_iterations < 1) {
    throw std::invalid_argument("SolverConfig: tolerances must be positive and max_iterations >= 1");
  }
  const int nb = problem.num_blocks();
  const int m_all = static_cast<int>(problem.constraints.size());
  SdpSolution sol;

  // Row normalization and removal of dependent rows.
  std::vector<double> row_norm(m_all);
  std::vector<int> nonzero_rows;
  for (int i = 0; i < m_all; ++i) {
    row_norm[i] = detail::functional_norm(problem.constraints[i]);
    if (row_norm[i] > 0) {
      nonzero_rows.push_back(i);
    } else if (std::abs(problem.constraints[i].rhs) > cfg.rank_threshold) {
      sol.status = SolverStatus::kInfeasibleDetected;
      return sol;
    }
  }
  std::vector<int> kept;
  {
    // Gram matrix of normalized rows over the upper-triangle coordinates.
    const int mz = static_cast<int>(nonzero_rows.size());
    std::vector<std::vector<std::pair<std::int64_t, double>>> rows(mz);
    std::vector<std::int64_t> offset(nb + 1, 0);
    for (int b = 0; b < nb; ++b) offset[b + 1] = offset[b] + std::int64_t(problem.block_dims[b]) * problem.block_dims[b];
    for (int q = 0; q < mz; ++q) {
      const auto& c = problem.constraints[nonzero_rows[q]];
      auto& r = rows[q];
      for (const auto& e : c.entries) {
        r.emplace_back(offset[e.block] + std::int64_t(e.row) * problem.block_dims[e.block] + e.col,
                       (e.row == e.col ? 1.0 : 2.0) * e.value / row_norm[nonzero_rows[q]]);
      }
      std::sort(r.begin(), r.end());
      std::vector<std::pair<std::int64_t, double>> merged;
      for (auto& kv : r) {
        if (!merged.empty() && merged.back().first == kv.first) merged.back().second += kv.second;
        else merged.push_back(kv);
      }
      r.swap(merged);
    }
    RMatrix gram = RMatrix::Zero(mz, mz);
    std::unordered_map<std::int64_t, std::vector<std::pair<int, double>>> by_coord;
    for (int q = 0; q < mz; ++q) {
      for (auto [k, v] : rows[q]) by_coord[k].emplace_back(q, v);
    }
    for (auto& [k, list] : by_coord) {
      for (auto [p, vp] : list) {
        for (auto [q, vq] : list) gram(p, q) += vp * vq;
      }
    }
    RVector bn(mz);
    for (int q = 0; q < mz; ++q) bn(q) = problem.constraints[nonzero_rows[q]].rhs / row_norm[nonzero_rows[q]];
    Eigen::ColPivHouseholderQR<RMatrix> qr(gram);
    qr.setThreshold(cfg.rank_threshold);
    const int rank = static_cast<int>(qr.rank());
    Eigen::ColPivHouseholderQR<RMatrix> qr_aug(gram + bn * bn.transpose());
    qr_aug.setThreshold(cfg.rank_threshold);
    if (qr_aug.rank() > rank) {
      sol.status = SolverStatus::kInfeasibleDetected;
      return sol;
    }
    for (int q = 0; q < rank; ++q) kept.push_back(nonzero_rows[qr.colsPermutation().indices()(q)]);
    std::sort(kept.begin(), kept.end());
  }
  const int m = static_cast<int>(kept.size());
  sol.dropped_constraints = m_all - m;

  // Scaled data.
  double c_norm = 0;
  for (const auto& c : problem.objective) c_norm += c.squaredNorm();
  c_norm = std::sqrt(c_norm);
  if (c_norm == 0) c_norm = 1;
  std::vector<RMatrix> cs(nb);
  for (int b = 0; b < nb; ++b) cs[b] = problem.objective[b] / c_norm;
  std::vector<Constraint> a(m);
  RVector bvec(m);
  std::vector<double> scale(m);
  for (int q = 0; q < m; ++q) {
    const auto& src = problem.constraints[kept[q]];
    scale[q] = row_norm[kept[q]];
    a[q].rhs = src.rhs / scale[q];
    for (auto e : src.entries) {
      e.value /= scale[q];
      a[q].entries.push_back(e);
    }
    bvec(q) = a[q].rhs;
  }
  // Constraints touching each block, with entries grouped per block.
  struct BlockPart {
    int con;
    std::vector<SparseEntry> entries;
  };
  std::vector<std::vector<BlockPart>> parts(nb);
  for (int q = 0; q < m; ++q) {
    std::map<int, std::vector<SparseEntry>> grouped;
    for (const auto& e : a[q].entries) grouped[e.block].push_back(e);
    for (auto& [b, es] : grouped) parts[b].push_back({q, std::move(es)});
  }

  auto apply_a = [&](const std::vector<RMatrix>& x) {
    RVector out(m);
    for (int q = 0; q < m; ++q) out(q) = detail::constraint_value(a[q], x);
    return out;
  };
  auto apply_at = [&](const RVector& y) {
    std::vector<RMatrix> out(nb);
    for (int b = 0; b < nb; ++b) out[b] = RMatrix::Zero(problem.block_dims[b], problem.block_dims[b]);
    for (int q = 0; q < m; ++q) {
      for (const auto& e : a[q].entries) {
        out[e.block](e.row, e.col) += y(q) * e.value;
        if (e.row != e.col) out[e.block](e.col, e.row) += y(q) * e.value;
      }
    }
    return out;
  };
  auto sym = [](const RMatrix& x) -> RMatrix { return 0.5 * (x + x.transpose()); };

  int ntotal = 0;
  for (int s : problem.block_dims) ntotal += s;
  double xi = std::max(10.0, std::sqrt(double(ntotal)));
  double eta = std::max(10.0, std::sqrt(double(ntotal)));
  for (int q = 0; q < m; ++q) xi = std::max(xi, ntotal * (1 + std::abs(bvec(q))) / 2.0);
  xi *= cfg.initial_point_scale;
  eta *= cfg.initial_point_scale;
  std::vector<RMatrix> x(nb), z(nb);
  for (int b = 0; b < nb; ++b) {
    x[b] = xi * RMatrix::Identity(problem.block_dims[b], problem.block_dims[b]);
    z[b] = eta * RMatrix::Identity(problem.block_dims[b], problem.block_dims[b]);
  }
  RVector y = RVector::Zero(m);

  auto unscaled_dual = [&](const RVector& yy) {
    RVector full = RVector::Zero(m_all);
    for (int q = 0; q < m; ++q) full(kept[q]) = c_norm * yy(q) / scale[q];
    return full;
  };
  auto primal_residual_of = [&](const std::vector<RMatrix>& xx) {
    double r = 0;
    for (const auto& con : problem.constraints) r = std::max(r, std::abs(detail::constraint_value(con, xx) - con.rhs));
    return r;
  };

  double best_merit = std::numeric_limits<double>::infinity();
  SdpSolution best;
  auto record = [&](int iter, double gap, double pres, double dres) {
    SdpSolution s;
    s.blocks = x;
    s.dual = unscaled_dual(y);
    s.objective_value = 0;
    for (int b = 0; b < nb; ++b) s.objective_value += problem.objective[b].cwiseProduct(x[b]).sum();
    s.dual_objective = 0;
    for (int i = 0; i < m_all; ++i) s.dual_objective += problem.constraints[i].rhs * s.dual(i);
    s.gap = gap;
    s.primal_residual = pres;
    s.dual_residual = dres;
    s.iterations = iter;
    s.dropped_constraints = m_all - m;
    return s;
  };

  std::vector<RMatrix> zinv(nb);
  for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
    RVector rp = bvec - apply_a(x);
    std::vector<RMatrix> aty = apply_at(y);
    std::vector<RMatrix> rd(nb);
    double rd_norm = 0;
    for (int b = 0; b < nb; ++b) {
      rd[b] = cs[b] - aty[b] + z[b];
      rd_norm += rd[b].squaredNorm();
    }
    rd_norm = std::sqrt(rd_norm);
    const double mu = detail::frob_dot(x, z) / ntotal;
    sol.mu_history.push_back(mu);
    const double pobj = detail::frob_dot(cs, x), dobj = bvec.dot(y);
    const double gap = c_norm * std::abs(pobj - dobj);
    const double pres = primal_residual_of(x);
    const double dres = rd_norm;
    if (cfg.on_iteration) cfg.on_iteration(iter, mu, pres, gap);
    const double merit = std::max({pres / cfg.feasibility_tol, dres / cfg.feasibility_tol, gap / cfg.gap_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best = record(iter, gap, pres, dres);
    }
    if (pres <= cfg.feasibility_tol && dres <= cfg.feasibility_tol && gap <= cfg.gap_tol) {
      best = record(iter, gap, pres, dres);
      best.status = SolverStatus::kOptimal;
      best.mu_history = sol.mu_history;
      return best;
    }
    // Farkas certificate for primal infeasibility: A^T y >= 0 with b^T y < 0.
    if (dobj < -1e6) {
      RVector yhat = y / std::abs(dobj);
      auto aty_hat = apply_at(yhat);
      double lmin = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nb; ++b) {
        lmin = std::min(lmin, Eigen::SelfAdjointEigenSolver<RMatrix>(sym(aty_hat[b]), Eigen::EigenvaluesOnly)
                                  .eigenvalues()
                                  .minCoeff());
      }
      if (lmin > -1e-8) {
        best = record(iter, gap, pres, dres);
        best.status = SolverStatus::kInfeasibleDetected;
        best.mu_history = sol.mu_history;
        return best;
      }
    }
    if (iter == cfg.max_iterations) break;

    for (int b = 0; b < nb; ++b) {
      Eigen::LLT<RMatrix> llt(z[b]);
      zinv[b] = llt.solve(RMatrix::Identity(z[b].rows(), z[b].cols()));
      zinv[b] = sym(zinv[b]);
    }
    // Schur complement M_pq = Tr(A_p X A_q Z^-1).
    RMatrix schur = RMatrix::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      const int s = problem.block_dims[b];
      RMatrix xa(s, s);
      for (const auto& part_p : parts[b]) {
        xa.setZero();
        std::vector<int> cols;
        for (const auto& e : part_p.entries) {
          xa.col(e.col) += e.value * x[b].col(e.row);
          cols.push_back(e.col);
          if (e.row != e.col) {
            xa.col(e.row) += e.value * x[b].col(e.col);
            cols.push_back(e.row);
          }
        }
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        RMatrix g = RMatrix::Zero(s, s);
        for (int c : cols) g.noalias() += xa.col(c) * zinv[b].row(c);
        for (const auto& part_q : parts[b]) {
          double v = 0;
          for (const auto& e : part_q.entries) {
            v += e.row == e.col ? e.value * g(e.row, e.row) : e.value * (g(e.row, e.col) + g(e.col, e.row));
          }
          schur(part_p.con, part_q.con) += v;
        }
      }
    }
    schur = sym(schur);
    Eigen::LLT<RMatrix> schur_llt(schur);
    bool schur_ok = schur_llt.info() == Eigen::Success;
    Eigen::LDLT<RMatrix> schur_ldlt;
    if (!schur_ok) schur_ldlt.compute(schur);
    auto solve_schur = [&](const RVector& r) -> RVector {
      return schur_ok ? RVector(schur_llt.solve(r)) : RVector(schur_ldlt.solve(r));
    };

    // Direction for complementarity target sigma*mu with second-order term.
    auto direction = [&](double target, const std::vector<RMatrix>* corr, std::vector<RMatrix>& dx, RVector& dy,
                         std::vector<RMatrix>& dz) {
      std::vector<RMatrix> t(nb);
      for (int b = 0; b < nb; ++b) {
        t[b] = target * zinv[b] - x[b] + x[b] * rd[b] * zinv[b];
        if (corr) t[b] -= (*corr)[b];
        t[b] = sym(t[b]);
      }
      dy = solve_schur(apply_a(t) - rp);
      auto atdy = apply_at(dy);
      dx.resize(nb);
      dz.resize(nb);
      for (int b = 0; b < nb; ++b) {
        dz[b] = atdy[b] - rd[b];
        RMatrix d = target * zinv[b] - x[b] - x[b] * dz[b] * zinv[b];
        if (corr) d -= (*corr)[b];
        dx[b] = sym(d);
      }
    };
    auto step_lengths = [&](const std::vector<RMatrix>& dx, const std::vector<RMatrix>& dz) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, detail::max_step(x[b], dx[b]));
        ad = std::min(ad, detail::max_step(z[b], dz[b]));
      }
      return std::make_pair(std::min(1.0, cfg.step_fraction * ap), std::min(1.0, cfg.step_fraction * ad));
    };

    std::vector<RMatrix> dx, dz;
    RVector dy;
    direction(0.0, nullptr, dx, dy, dz);
    auto [ap_aff, ad_aff] = step_lengths(dx, dz);
    double mu_aff = 0;
    for (int b = 0; b < nb; ++b) mu_aff += (x[b] + ap_aff * dx[b]).cwiseProduct(z[b] + ad_aff * dz[b]).sum();
    mu_aff /= ntotal;
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);
    std::vector<RMatrix> corr(nb);
    for (int b = 0; b < nb; ++b) corr[b] = dx[b] * dz[b] * zinv[b];
    direction(sigma * mu, &corr, dx, dy, dz);
    auto [ap, ad] = step_lengths(dx, dz);

    // Step halving on Cholesky failure.
    for (int tries = 0; tries < 30; ++tries) {
      std::vector<RMatrix> xn(nb), zn(nb);
      for (int b = 0; b < nb; ++b) {
        xn[b] = x[b] + ap * dx[b];
        zn[b] = z[b] + ad * dz[b];
      }
      if (detail::is_pd(xn) && detail::is_pd(zn)) {
        x = std::move(xn);
        z = std::move(zn);
        y += ad * dy;
        break;
      }
      ap *= 0.5;
      ad *= 0.5;
    }
  }
  best.status = SolverStatus::kMaxIter;
  best.mu_history = sol.mu_history;
  return best;
}

struct VerifyReport {
  double max_constraint_violation = 0;
  std::vector<double> min_eigenvalues;
  double objective = 0;
  bool has_dual = false;
  double dual_objective = 0;
  double gap = 0;
  double dual_min_eigenvalue = 0;  // of sum_i y_i A_i - C
};

/// Recomputes certificate quantities from dense copies of the data.
inline VerifyReport verify(const SdpProblem& p, const SdpSolution& s) {
  if (s.blocks.size() != p.block_dims.size()) throw std::invalid_argument("verify: block count mismatch");
  for (size_t b = 0; b < s.blocks.size(); ++b) {
    if (s.blocks[b].rows() != p.block_dims[b] || s.blocks[b].cols() != p.block_dims[b]) {
      throw std::invalid_argument("verify: block shape mismatch");
    }
  }
  VerifyReport r;
  std::vector<RMatrix> dual_slack(p.block_dims.size());
  for (size_t b = 0; b < p.block_dims.size(); ++b) dual_slack[b] = -p.objective[b];
  const bool has_dual = s.dual.size() == static_cast<Eigen::Index>(p.constraints.size());
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    std::map<int, RMatrix> dense;
    for (const auto& e : p.constraints[i].entries) {
      auto it = dense.find(e.block);
      if (it == dense.end()) it = dense.emplace(e.block, RMatrix::Zero(p.block_dims[e.block], p.block_dims[e.block])).first;
      it->second(e.row, e.col) += e.value;
      if (e.row != e.col) it->second(e.col, e.row) += e.value;
    }
    double lhs = 0;
    for (auto& [b, mat] : dense) {
      lhs += (mat * s.blocks[b]).trace();
      if (has_dual) dual_slack[b] += s.dual(i) * mat;
    }
    r.max_constraint_violation = std::max(r.max_constraint_violation, std::abs(lhs - p.constraints[i].rhs));
  }
  r.dual_min_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < p.block_dims.size(); ++b) {
    RMatrix xs = 0.5 * (s.blocks[b] + s.blocks[b].transpose());
    r.min_eigenvalues.push_back(Eigen::SelfAdjointEigenSolver<RMatrix>(xs, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
    r.objective += (p.objective[b] * s.blocks[b]).trace();
    if (has_dual) {
      RMatrix zs = 0.5 * (dual_slack[b] + dual_slack[b].transpose());
      r.dual_min_eigenvalue = std::min(
          r.dual_min_eigenvalue, Eigen::SelfAdjointEigenSolver<RMatrix>(zs, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
    }
  }
  if (has_dual) {
    r.has_dual = true;
    for (size_t i = 0; i < p.constraints.size(); ++i) r.dual_objective += p.constraints[i].rhs * s.dual(i);
    r.gap = std::abs(r.objective - r.dual_objective);
  }
  return r;
}

}  // namespace uinv
