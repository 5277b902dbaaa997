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

#include "uinv/cg_protocol.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace uinv;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_unitary(const CMatrix& u, double tol) {
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) <= tol;
}

CVector basis(int dim, int index) {
  CVector v = CVector::Zero(dim);
  v(index) = 1;
  return v;
}

const ProtocolCircuit& gate_protocol() {
  static const ProtocolCircuit pc = build_protocol(CgBuild::kGate);
  return pc;
}

const ProtocolCircuit& matrix_protocol() {
  static const ProtocolCircuit pc = build_protocol(CgBuild::kMatrix);
  return pc;
}

// exp(-i pi X / 2) = -i X, determinant 1.
DenseUnitary minus_i_not() {
  CMatrix u(2, 2);
  u << 0, cplx(0, -1), cplx(0, -1), 0;
  return DenseUnitary(u);
}

}  // namespace

TEST(CgAngle, Examples) {
  EXPECT_NEAR(std::cos(cg_angle(2, 1).theta), std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(std::cos(cg_angle(2, -1).theta), std::sqrt(1.0 / 3.0), 1e-14);
  EXPECT_NEAR(std::cos(cg_angle(1, 0).theta), std::sqrt(0.5), 1e-14);
  EXPECT_DOUBLE_EQ(cg_angle(2, 1).j, 1.0);
  EXPECT_DOUBLE_EQ(cg_angle(2, -1).m_prime, -0.5);
}

TEST(CgAngle, RangeAndValidity) {
  for (int two_j = 0; two_j <= 8; ++two_j) {
    for (int two_m = -two_j - 1; two_m <= two_j + 1; two_m += 2) {
      const auto a = cg_angle(two_j, two_m);
      EXPECT_GE(a.theta, 0.0);
      EXPECT_LE(a.theta, M_PI / 2 + 1e-15);
      EXPECT_NEAR(std::cos(a.theta), std::sqrt((a.j + a.m_prime + 0.5) / (2 * a.j + 1)), 1e-14);
    }
  }
  EXPECT_THROW(cg_angle(2, 0), std::invalid_argument);
  EXPECT_THROW(cg_angle(2, 5), std::invalid_argument);
  EXPECT_THROW(cg_angle(-1, 0), std::invalid_argument);
}

TEST(Ry, MatchesRotationMatrix) {
  const CMatrix r = ry(0.7);
  EXPECT_NEAR(r(0, 0).real(), std::cos(0.35), 1e-15);
  EXPECT_NEAR(r(0, 1).real(), -std::sin(0.35), 1e-15);
  EXPECT_NEAR(r(1, 0).real(), std::sin(0.35), 1e-15);
  EXPECT_LT(max_abs(ry(M_PI) * ry(M_PI) + CMatrix::Identity(2, 2)), 1e-15);
}

// Wires (j, m1, m2): the j bit stores floor(j), the m bits store m + j, and
// computational |0> carries spin -1/2.
TEST(Vcg2, LabelsTwoSpins) {
  for (const CMatrix& v : {build_vcg2(), build_vcg2_matrix()}) {
    EXPECT_TRUE(is_unitary(v, 1e-12));
    CVector singlet0 = (basis(8, 0b010) - basis(8, 0b100)) / std::sqrt(2.0);
    EXPECT_LT((v * singlet0 + basis(8, 0b000)).norm(), 1e-12);  // j=0, up to the sign -1
    EXPECT_LT((v * basis(8, 0b000) - basis(8, 0b100)).norm(), 1e-12);  // (j=1, m=-1)
    EXPECT_LT((v * basis(8, 0b110) - basis(8, 0b110)).norm(), 1e-12);  // (j=1, m=+1)
    CVector triplet0 = (basis(8, 0b010) + basis(8, 0b100)) / std::sqrt(2.0);
    EXPECT_LT((v * triplet0 - basis(8, 0b101)).norm(), 1e-12);  // (j=1, m=0)
  }
}

TEST(Vcg3, DefiningRelations) {
  for (const CMatrix& v : {build_vcg3(), build_vcg3_matrix()}) {
    EXPECT_TRUE(is_unitary(v, 1e-12));
    const CMatrix vd = v.adjoint();
    // Wires (j', m'1, m'2, p'3); j' = 1/2 so the m' register holds m' + 1/2.
    for (int two_m : {-1, 1}) {
      const int mreg = (two_m + 1) / 2;
      const int m_plus = (two_m + 1) / 2 + 1;   // m' + 1/2 + j with j = 1
      const int m_minus = (two_m - 1) / 2 + 1;  // m' - 1/2 + j
      const auto a = cg_angle(2, two_m);
      CVector expect = std::cos(a.theta) * basis(16, 0b1000 | (m_plus << 1)) -
                       std::sin(a.theta) * basis(16, 0b1000 | (m_minus << 1) | 1);
      EXPECT_LT((vd * basis(16, (mreg << 1)) - expect).norm(), 1e-12) << "m'=" << two_m << "/2";
      EXPECT_LT((vd * basis(16, (mreg << 1) | 1) - basis(16, mreg)).norm(), 1e-12) << "m'=" << two_m << "/2";
    }
  }
}

TEST(Protocol, FixedUnitaries) {
  for (const auto* pc : {&gate_protocol(), &matrix_protocol()}) {
    EXPECT_EQ(pc->v1.dim(), 128);
    EXPECT_TRUE(is_unitary(pc->v1.entries, 1e-12));
    EXPECT_TRUE(is_unitary(pc->v2.entries, 1e-12));
  }
  // Rebuilding gives the same matrices: they do not depend on any input.
  EXPECT_EQ(build_protocol(CgBuild::kGate).v1.entries, gate_protocol().v1.entries);
}

TEST(Protocol, IdentityInput) {
  std::mt19937_64 rng(1);
  const auto phi = random_state({2}, rng);
  const DenseUnitary id(CMatrix::Identity(2, 2));
  const auto r = run_inversion(gate_protocol(), id, phi);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  Statevector expect = tensor(tensor(singlet(), phi), zero_ancillas());
  EXPECT_LT((r.output.amplitudes + expect.amplitudes).norm(), 1e-12);
}

TEST(Protocol, ExactForHaarInputs) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto u = haar_unitary(2, rng);
    const auto phi = random_state({2}, rng);
    EXPECT_GE(run_inversion(gate_protocol(), u, phi).fidelity, 1 - 1e-10);
    EXPECT_GE(run_inversion(matrix_protocol(), u, phi).fidelity, 1 - 1e-10);
  }
}

TEST(Protocol, AncillasRestored) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto r = run_inversion(gate_protocol(), haar_unitary(2, rng), random_state({2}, rng));
    const CMatrix rho = reduced_state(r.output, {3, 4, 5, 6}).entries;
    EXPECT_GE(rho(0, 0).real(), 1 - 1e-10);
  }
}

TEST(Protocol, GlobalPhaseIsMinusOne) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto r = run_inversion(gate_protocol(), haar_unitary(2, rng), random_state({2}, rng));
    // The expected state already carries the -1, so the overlap is +1.
    EXPECT_LT(std::abs(r.overlap - 1.0), 1e-10);
  }
}

TEST(Protocol, NotGateClosedForm) {
  const auto u = minus_i_not();
  const auto phi = Statevector::qubits("0");
  const auto r = run_inversion(gate_protocol(), u, phi);
  const CMatrix rho = reduced_state(r.output, {2}).entries;
  const CVector target = u.entries.adjoint() * phi.amplitudes;  // i|1>
  EXPECT_NEAR(std::real(target.dot(rho * target)), 1.0, 1e-10);
  EXPECT_NEAR(rho(1, 1).real(), 1.0, 1e-10);
}

TEST(Protocol, RejectsNonSpecialUnitary) {
  CMatrix u = CMatrix::Identity(2, 2) * cplx(0, 1);
  EXPECT_THROW(run_inversion(gate_protocol(), DenseUnitary(u), Statevector::qubits("0")), std::invalid_argument);
  const auto fixed = project_to_special(DenseUnitary(u));
  EXPECT_NO_THROW(run_inversion(gate_protocol(), fixed, Statevector::qubits("0")));
}

TEST(Protocol, GateAndMatrixBuildsAgree) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto u = haar_unitary(2, rng);
    const auto phi = random_state({2}, rng);
    EXPECT_NEAR(run_inversion(gate_protocol(), u, phi).fidelity, run_inversion(matrix_protocol(), u, phi).fidelity,
                1e-10);
  }
}

TEST(Catalyst, HonestCatalystIsReturned) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto u = haar_unitary(2, rng);
    const auto phi = random_state({2}, rng);
    const auto catalyst = apply_to_subsystems(singlet(), u, {0});
    const auto r = run_catalytic(gate_protocol(), u, phi, catalyst);
    EXPECT_GE(r.target_fidelity, 1 - 1e-10);
    EXPECT_GE(r.catalyst_fidelity, 1 - 1e-10);
  }
}

TEST(Catalyst, ExtraCallErasesUnitary) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto u = haar_unitary(2, rng);
    auto s = apply_to_subsystems(apply_to_subsystems(singlet(), u, {0}), u, {1});
    EXPECT_LT((s.amplitudes - singlet().amplitudes).norm(), 1e-12);
  }
}

TEST(Catalyst, MismatchedCatalystFails) {
  std::mt19937_64 rng(8);
  int below = 0;
  for (int t = 0; t < 100; ++t) {
    const auto u = haar_unitary(2, rng);
    const auto v = haar_unitary(2, rng);
    const auto phi = random_state({2}, rng);
    const auto r = run_catalytic(gate_protocol(), u, phi, apply_to_subsystems(singlet(), v, {0}));
    below += r.target_fidelity < 1 - 1e-3;
  }
  EXPECT_GE(below, 95);
}

TEST(Catalyst, RejectsMalformedCatalyst) {
  EXPECT_THROW(run_catalytic(gate_protocol(), DenseUnitary(CMatrix::Identity(2, 2)), Statevector::qubits("0"),
                             Statevector::qubits("0")),
               std::invalid_argument);
}

TEST(TransferMatrix, MatchesClosedForm) {
  Eigen::Matrix2cd g;
  const double s3 = std::sqrt(3.0);
  g << -1 / s3, -1 / s3, 1 / s3, -2 / s3;
  std::mt19937_64 rng(9);
  std::vector<Eigen::Matrix2cd> seen;
  for (int a = 0; a < 20; ++a) {
    const auto u = haar_unitary(2, rng);
    for (int b = 0; b < 20; ++b) {
      const auto phi = random_state({2}, rng);
      const auto m = g_transfer_matrix(gate_protocol(), u, phi);
      EXPECT_LT((m - g).cwiseAbs().maxCoeff(), 1e-10);
      if (b == 0) seen.push_back(m);
    }
  }
  for (size_t k = 1; k < seen.size(); ++k) EXPECT_LT((seen[k] - seen[0]).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TransferMatrix, SquareSendsVToMinusW) {
  Eigen::Matrix2d g;
  const double s3 = std::sqrt(3.0);
  g << -1 / s3, -1 / s3, 1 / s3, -2 / s3;
  const Eigen::Vector2d out = g * g * Eigen::Vector2d(1, 0);
  EXPECT_NEAR(out(0), 0.0, 1e-15);
  EXPECT_NEAR(out(1), -1.0, 1e-15);
}
