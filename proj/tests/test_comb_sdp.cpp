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

#include "uinv/comb_sdp.hpp"
#include "uinv/reference_tables.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace uinv;

namespace {

double max_abs(const RMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double optimum(int d, int n, CombMode mode) {
  static std::map<std::tuple<int, int, int>, double> cache;
  auto key = std::make_tuple(d, n, int(mode));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const auto s = solve(build_reduced_sdp(d, n, mode));
  EXPECT_EQ(s.status, SolverStatus::kOptimal) << "d=" << d << " n=" << n;
  return cache[key] = s.objective_value;
}

double max_residual(const SdpProblem& p, const std::vector<RMatrix>& x) {
  double r = 0;
  for (const auto& c : p.constraints) r = std::max(r, std::abs(detail::constraint_value(c, x) - c.rhs));
  return r;
}

ReducedComb random_reduced(int d, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ReducedComb c = zero_reduced_comb(d, n);
  for (auto& b : c.blocks) {
    for (int r = 0; r < b.rows(); ++r)
      for (int k = r; k < b.cols(); ++k) b(r, k) = b(k, r) = g(rng);
  }
  return c;
}

// (1/d^2) |U^-1>><<U^-1|_{PF} ⊗ (|conj U>><<conj U|)^{⊗n} on (I,O) pairs, in
// the interleaved order (P, I1, O1, ..., In, On, F).
CMatrix per_unitary_performance(const CMatrix& u, int n) {
  const int d = static_cast<int>(u.rows());
  auto vec = [&](const CMatrix& v) {
    CVector x(d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) x(i * d + j) = v(j, i);
    return x;
  };
  const CVector io = vec(u).conjugate();
  const CVector pf = vec(u.adjoint());
  CVector mid = CVector::Ones(1);
  for (int k = 0; k < n; ++k) mid = kron(mid, io);
  const long half = mid.size();
  CVector full(d * half * d);
  for (int p = 0; p < d; ++p)
    for (int f = 0; f < d; ++f)
      for (long m = 0; m < half; ++m) full((p * half + m) * d + f) = pf(p * d + f) * mid(m);
  return full * full.adjoint() / double(d * d);
}

}  // namespace

TEST(PerformanceBlocks, RankOneWithExpectedTrace) {
  for (int d : {2, 3, 4}) {
    for (int n = 1; n <= 4; ++n) {
      const auto p = performance_blocks(d, n);
      ASSERT_EQ(p.omega.size(), young_diagrams(n + 1, d).size());
      for (size_t k = 0; k < p.shapes.size(); ++k) {
        const auto& om = p.omega[k];
        const double dm = irrep_dim(p.shapes[k]);
        EXPECT_NEAR(om.trace(), dm / (double(d) * d * double(su_dim(p.shapes[k], d))), 1e-12);
        Eigen::SelfAdjointEigenSolver<RMatrix> es(om);
        const auto ev = es.eigenvalues();
        EXPECT_GE(ev.minCoeff(), -1e-10);
        EXPECT_NEAR(ev.maxCoeff(), om.trace(), 1e-10);
      }
    }
  }
}

TEST(PerformanceBlocks, SingleRowBlock) {
  const auto p = performance_blocks(3, 2);
  ASSERT_EQ(p.shapes.front().rows, std::vector<int>{3});
  ASSERT_EQ(p.omega.front().rows(), 1);
  EXPECT_NEAR(p.omega.front()(0, 0), 1.0 / (9.0 * double(su_dim(p.shapes.front(), 3))), 1e-15);
}

TEST(PerformanceBlocks, RejectsBadArguments) {
  EXPECT_THROW(performance_blocks(1, 2), std::invalid_argument);
  EXPECT_THROW(performance_blocks(2, 0), std::invalid_argument);
}

TEST(SequentialSdp, TableCells) {
  EXPECT_NEAR(optimum(2, 1, CombMode::kSequential), 0.5, 1e-4);
  EXPECT_NEAR(optimum(2, 4, CombMode::kSequential), 1.0, 1e-4);
  EXPECT_NEAR(optimum(3, 2, CombMode::kSequential), 1.0 / 3.0, 1e-4);
}

TEST(ParallelSdp, TableCells) {
  EXPECT_NEAR(optimum(2, 2, CombMode::kParallel), 0.6545, 1e-4);
  EXPECT_NEAR(optimum(2, 3, CombMode::kParallel), 0.75, 1e-4);
  EXPECT_NEAR(optimum(3, 3, CombMode::kParallel), 0.4310, 1e-4);
}

TEST(SdpAssembly, ProblemsAreWellFormed) {
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    for (int n = 1; n <= 3; ++n) {
      const auto p = build_reduced_sdp(2, n, mode);
      EXPECT_NO_THROW(p.validate());
      EXPECT_EQ(p.block_dims.size(), young_diagrams(n + 1, 2).size() * young_diagrams(n + 1, 2).size());
    }
  }
}

TEST(SdpAssembly, SizeCapThrows) {
  EXPECT_THROW(build_reduced_sdp(3, 5, CombMode::kSequential), SizeLimitExceeded);
  EXPECT_THROW(build_full_sdp(3, 3, CombMode::kParallel), SizeLimitExceeded);
  SizeLimits tight;
  tight.max_variables = 10;
  EXPECT_THROW(build_reduced_sdp(2, 3, CombMode::kParallel, tight), SizeLimitExceeded);
  try {
    build_reduced_sdp(3, 5, CombMode::kSequential);
  } catch (const SizeLimitExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("variables"), std::string::npos);
  }
}

TEST(ReduceComb, IdentityGivesDepolarizingStructure) {
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
    const long dim = full_dimension(d, n);
    const auto c = reduce_comb(RMatrix::Identity(dim, dim), d, n);
    const auto dep = depolarizing_reduced_comb(d, n);
    for (size_t b = 0; b < c.blocks.size(); ++b) {
      EXPECT_LT(max_abs(c.blocks[b] - ipow(d, n + 1) * dep.blocks[b]), 1e-10);
    }
    EXPECT_LT(max_abs(expand_comb(dep) - RMatrix::Identity(dim, dim) / ipow(d, n + 1)), 1e-12);
  }
}

TEST(ReduceComb, RoundTripOnCommutant) {
  std::mt19937_64 rng(3);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
    const auto c = random_reduced(d, n, rng);
    const RMatrix x = expand_comb(c);
    const auto back = reduce_comb(x, d, n);
    for (size_t b = 0; b < c.blocks.size(); ++b) EXPECT_LT(max_abs(back.blocks[b] - c.blocks[b]), 1e-8);
    EXPECT_LT(max_abs(expand_comb(back) - x), 1e-8);
  }
}

TEST(ReduceComb, RejectsNonCommutingInput) {
  RMatrix x = RMatrix::Zero(16, 16);
  x(0, 0) = 1;
  EXPECT_THROW(reduce_comb(x, 2, 1), std::invalid_argument);
  EXPECT_THROW(reduce_comb(RMatrix::Identity(8, 8), 2, 1), std::invalid_argument);
}

TEST(ReduceComb, PerformanceOperatorReducesToBlocks) {
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
    const auto r = reduce_comb(full_performance_operator(d, n), d, n);
    const auto p = performance_blocks(d, n);
    for (int mu = 0; mu < r.num_shapes(); ++mu) {
      for (int nu = 0; nu < r.num_shapes(); ++nu) {
        const RMatrix& b = r.block(mu, nu);
        const double m2 = double(su_dim(r.shapes[mu], d)) * double(su_dim(r.shapes[mu], d));
        if (mu == nu) {
          // Pairing with E ⊗ E picks up m_mu^2 from the traces of the units.
          EXPECT_LT(max_abs(b - m2 * p.omega[mu]), 1e-10) << r.shapes[mu].str();
        } else {
          EXPECT_LT(max_abs(b), 1e-10);
        }
      }
    }
  }
}

TEST(FullPerformanceOperator, PsdWithConsistentTrace) {
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
    const RMatrix om = full_performance_operator(d, n);
    EXPECT_LT(max_abs(om - om.transpose()), 1e-12);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(om, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    const auto p = performance_blocks(d, n);
    double expect = 0;
    for (size_t k = 0; k < p.shapes.size(); ++k) {
      const double m = double(su_dim(p.shapes[k], d));
      expect += m * m * p.omega[k].trace();
    }
    EXPECT_NEAR(om.trace(), expect, 1e-10);
    EXPECT_NEAR(om.trace(), ipow(d, n - 1), 1e-10);
  }
}

TEST(PerUnitaryOracle, OptimalCombIsCovariant) {
  std::mt19937_64 rng(4);
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
      const auto s = solve(build_reduced_sdp(d, n, mode));
      ASSERT_EQ(s.status, SolverStatus::kOptimal);
      const RMatrix c = expand_comb(reduced_from_blocks(d, n, s.blocks));
      EXPECT_NEAR((c * full_performance_operator(d, n)).trace(), s.objective_value, 1e-6);
      for (int t = 0; t < 3; ++t) {
        const auto u = haar_unitary(d, rng);
        const double f = (c.cast<cplx>() * per_unitary_performance(u.entries, n)).trace().real();
        EXPECT_NEAR(f, s.objective_value, 1e-6) << "d=" << d << " n=" << n;
      }
    }
  }
}

TEST(ConstraintConsistency, DepolarizingCombIsFeasible) {
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 2}}) {
      const auto p = build_reduced_sdp(d, n, mode);
      EXPECT_LE(max_residual(p, depolarizing_reduced_comb(d, n).blocks), 1e-8) << "d=" << d << " n=" << n;
    }
  }
}

TEST(ConstraintConsistency, ReductionOfFullFeasibleComb) {
  // The measure-and-discard comb 1/d^{n+1} in the full space.
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    const auto full = build_full_sdp(2, 1, mode);
    const RMatrix c = RMatrix::Identity(16, 16) / 4.0;
    EXPECT_LE(max_residual(full, {c}), 1e-10);
    const auto red = reduce_comb(c, 2, 1);
    EXPECT_LE(max_residual(build_reduced_sdp(2, 1, mode), red.blocks), 1e-8);
  }
}

TEST(FullSdp, FeasibleCombTrace) {
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    const auto s = solve(build_full_sdp(2, 1, mode));
    ASSERT_EQ(s.status, SolverStatus::kOptimal);
    EXPECT_NEAR(s.blocks[0].trace(), 4.0, 1e-6);
    EXPECT_NEAR(s.objective_value, 0.5, 1e-5);
  }
}

TEST(EvaluateFidelity, ZeroComb) {
  EXPECT_EQ(evaluate_fidelity(zero_reduced_comb(2, 2), performance_blocks(2, 2)), 0.0);
}

TEST(EvaluateFidelity, MatchesSolverAndIgnoresOffDiagonal) {
  const auto s = solve(build_reduced_sdp(2, 3, CombMode::kSequential));
  auto c = reduced_from_blocks(2, 3, s.blocks);
  const auto p = performance_blocks(2, 3);
  const double f = evaluate_fidelity(c, p);
  EXPECT_NEAR(f, 0.9330, 1e-3);
  EXPECT_NEAR(f, s.objective_value, 1e-10);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int mu = 0; mu < c.num_shapes(); ++mu)
    for (int nu = 0; nu < c.num_shapes(); ++nu)
      if (mu != nu) c.block(mu, nu) = c.block(mu, nu).unaryExpr([&](double x) { return x + g(rng); });
  EXPECT_EQ(evaluate_fidelity(c, p), f);
}

TEST(EvaluateFidelity, ShapeMismatch) {
  EXPECT_THROW(evaluate_fidelity(zero_reduced_comb(2, 2), performance_blocks(2, 3)), std::invalid_argument);
  EXPECT_THROW(reduced_from_blocks(2, 2, {}), std::invalid_argument);
}

TEST(OracleEquivalence, FullAndReducedAgree) {
  for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}}) {
      const auto full = solve(build_full_sdp(d, n, mode));
      ASSERT_EQ(full.status, SolverStatus::kOptimal);
      EXPECT_NEAR(full.objective_value, optimum(d, n, mode), 1e-5) << to_string(mode) << " d=" << d << " n=" << n;
    }
  }
}

class SmallTable : public ::testing::Test {
 protected:
  static std::vector<std::pair<int, int>> cells() {
    return {{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}, {4, 1}, {4, 2}, {4, 3}};
  }
};

TEST_F(SmallTable, SequentialDominatesParallel) {
  for (auto [d, n] : cells()) {
    EXPECT_GE(optimum(d, n, CombMode::kSequential), optimum(d, n, CombMode::kParallel) - 1e-6);
  }
}

TEST_F(SmallTable, SequentialNonDecreasingInN) {
  for (auto [d, n] : cells()) {
    if (n > 1) EXPECT_GE(optimum(d, n, CombMode::kSequential), optimum(d, n - 1, CombMode::kSequential) - 1e-6);
  }
}

TEST_F(SmallTable, CoincidenceForFewCalls) {
  for (auto [d, n] : cells()) {
    if (n <= d - 1) {
      EXPECT_NEAR(optimum(d, n, CombMode::kSequential), optimum(d, n, CombMode::kParallel), 2e-4);
    }
  }
}

TEST_F(SmallTable, LinearPatternForLargeDimension) {
  for (auto [d, n] : cells()) {
    if (d >= n + 1) {
      for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
        EXPECT_NEAR(optimum(d, n, mode), (n + 1.0) / (d * d), 2e-4);
      }
    }
  }
}

TEST_F(SmallTable, MatchesReferenceValues) {
  for (auto [d, n] : cells()) {
    for (auto mode : {CombMode::kSequential, CombMode::kParallel}) {
      const auto ref = reference_cell(d, n, mode);
      ASSERT_TRUE(ref.has_value());
      EXPECT_NEAR(optimum(d, n, mode), ref->value, ref->tolerance);
    }
  }
}
