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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace uinv {

/// Coupling angle for spin j plus spin 1/2 into total z-component m'.
/// Spins are passed doubled (two_j = 2j, two_m = 2m') to stay integral.
struct CgAngle {
  double j = 0;
  double m_prime = 0;
  double theta = 0;
};

inline CgAngle cg_angle(int two_j, int two_m) {
  if (two_j < 0 || (two_j + two_m) % 2 == 0 || std::abs(two_m) > two_j + 1) {
    throw std::invalid_argument("cg_angle: invalid (j, m') pair");
  }
  const double j = two_j / 2.0, m = two_m / 2.0;
  const double c = std::sqrt((j + m + 0.5) / (2 * j + 1));
  return {j, m, std::acos(std::clamp(c, 0.0, 1.0))};
}

inline CMatrix ry(double theta) {
  CMatrix r(2, 2);
  r << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
  return r;
}

inline CMatrix pauli_x() {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline CMatrix swap_gate() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1;
  return s;
}

/// Gate acting on `targets`, conditioned on each control qubit holding the
/// matching entry of `control_values` (1 for a filled dot, 0 for an open one).
struct Gate {
  CMatrix u;
  std::vector<int> targets;
  std::vector<int> controls;
  std::vector<int> control_values;
};

inline Gate controlled(CMatrix u, std::vector<int> targets, std::vector<int> controls = {},
                       std::vector<int> values = {}) {
  if (values.empty()) values.assign(controls.size(), 1);
  return Gate{std::move(u), std::move(targets), std::move(controls), std::move(values)};
}

/// Ordered gate list on `num_qubits` qubits; wires are 0-based.
struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  void add(Gate g) { gates.push_back(std::move(g)); }
  void add_swap(int a, int b) { add(controlled(swap_gate(), {a, b})); }
  void add_cnot(int control, int target, int value = 1) { add(controlled(pauli_x(), {target}, {control}, {value})); }

  /// Places a block unitary acting on `wires` (in that order).
  void add_block(const CMatrix& u, std::vector<int> wires) { add(controlled(u, std::move(wires))); }

  Statevector apply(Statevector s) const {
    for (const auto& g : gates) s = apply_gate(s, g);
    return s;
  }

  CMatrix unitary() const {
    const std::int64_t dim = std::int64_t{1} << num_qubits;
    std::vector<int> dims(num_qubits, 2);
    CMatrix out(dim, dim);
    for (std::int64_t c = 0; c < dim; ++c) out.col(c) = apply(Statevector::basis(dims, c)).amplitudes;
    return out;
  }

  static Statevector apply_gate(const Statevector& s, const Gate& g) {
    std::vector<int> wires = g.controls;
    wires.insert(wires.end(), g.targets.begin(), g.targets.end());
    const std::int64_t tdim = g.u.rows();
    const std::int64_t total = tdim << g.controls.size();
    CMatrix full = CMatrix::Identity(total, total);
    std::int64_t active = 0;
    for (int v : g.control_values) active = 2 * active + v;
    full.block(active * tdim, active * tdim, tdim, tdim) = g.u;
    return apply_to_subsystems(s, full, wires);
  }
};

/// Two-qubit coupling circuit: wires (i1, i2, ancilla) -> (j, m1, m2).
inline Circuit vcg2_circuit() {
  Circuit c{3, {}};
  c.add(controlled(pauli_x(), {2}, {0, 1}));
  c.add_cnot(1, 0);
  c.add(controlled(ry(M_PI / 2), {1}, {2}, {0}));
  c.add(controlled(ry(M_PI / 2), {1}, {0, 2}, {0, 0}));
  c.add_cnot(1, 0, 0);
  c.add_swap(0, 1);
  c.add_swap(1, 2);
  return c;
}

/// Three-qubit coupling circuit: wires (j, m1, m2, i3) -> (j', m1', m2', p3').
inline Circuit vcg3_circuit() {
  const double theta = 2 * std::acos(std::sqrt(2.0 / 3.0));
  Circuit c{4, {}};
  c.add_cnot(0, 2, 0);
  c.add(controlled(pauli_x(), {1}, {2, 3}));
  c.add_cnot(3, 2);
  c.add_cnot(1, 2);
  c.add(controlled(ry(M_PI), {3}, {1}, {0}));
  c.add(controlled(ry(-theta), {3}, {0, 1, 2}, {1, 0, 1}));
  c.add(controlled(ry(theta), {3}, {0, 1, 2}, {1, 1, 1}));
  c.add_cnot(3, 0);
  c.add_block(pauli_x(), {0});
  c.add_swap(1, 2);
  c.add_block(pauli_x(), {1});
  c.add_cnot(0, 1);
  c.add(controlled(swap_gate(), {1, 2}, {0}));
  c.add(controlled(pauli_x(), {2}, {0, 1}));
  return c;
}

inline CMatrix build_vcg2() { return DenseUnitary::checked(vcg2_circuit().unitary()).entries; }
inline CMatrix build_vcg3() { return DenseUnitary::checked(vcg3_circuit().unitary()).entries; }

namespace detail {

// Completes a partial isometry given column-wise on the domain basis states
// `domain` into a unitary: remaining domain states map to the remaining
// image basis states in increasing order.
inline CMatrix complete_isometry(const CMatrix& partial, const std::vector<std::int64_t>& domain,
                                 const std::vector<std::int64_t>& image) {
  const std::int64_t dim = partial.rows();
  CMatrix u = partial;
  std::vector<bool> in_domain(dim, false), in_image(dim, false);
  for (auto k : domain) in_domain[k] = true;
  for (auto k : image) in_image[k] = true;
  std::vector<std::int64_t> free_in, free_out;
  for (std::int64_t k = 0; k < dim; ++k) {
    if (!in_domain[k]) free_in.push_back(k);
    if (!in_image[k]) free_out.push_back(k);
  }
  if (free_in.size() != free_out.size()) throw std::logic_error("complete_isometry: dimension mismatch");
  for (size_t q = 0; q < free_in.size(); ++q) u(free_out[q], free_in[q]) = 1.0;
  return u;
}

}  // namespace detail

/// Coupling transforms built directly from the defining Clebsch-Gordan
/// relations on valid labels, completed to unitaries off that domain.
/// Label encoding: j register holds floor(j), m register holds m + j, and a
/// computational |1> is spin +1/2.
inline CMatrix build_vcg2_matrix() {
  // Input: (i1, i2, ancilla=0). Output: (j, m1, m2).
  CMatrix v = CMatrix::Zero(8, 8);
  std::vector<std::int64_t> domain, image;
  for (int two_jp : {0, 2}) {
    for (int two_m = -two_jp; two_m <= two_jp; two_m += 2) {
      const std::int64_t out = (two_jp / 2) * 4 + (two_m + two_jp) / 2;
      const auto ang = cg_angle(1, two_m);
      const double c = std::cos(ang.theta), s = std::sin(ang.theta);
      // spin-1/2 label m+1/2 in {0,1}; partner qubit |0> or |1>.
      auto add = [&](int two_m1, int qubit, double amp) {
        if (std::abs(two_m1) > 1 || amp == 0.0) return;
        const std::int64_t in = ((two_m1 + 1) / 2) * 4 + qubit * 2;
        v(out, in) += amp;
      };
      if (two_jp == 0) {
        add(two_m + 1, 0, c);
        add(two_m - 1, 1, -s);
      } else {
        add(two_m + 1, 0, s);
        add(two_m - 1, 1, c);
      }
      image.push_back(out);
    }
  }
  for (std::int64_t in : {0, 2, 4, 6}) domain.push_back(in);
  return DenseUnitary::checked(detail::complete_isometry(v, domain, image)).entries;
}

inline CMatrix build_vcg3_matrix() {
  // Input: (j, m1 m2, i3) with j in {0, 1}. Output: (j', m1' m2', p3').
  CMatrix v = CMatrix::Zero(16, 16);
  std::vector<std::int64_t> domain, image;
  auto in_index = [](int two_j, int two_m, int qubit) -> std::int64_t {
    return (two_j / 2) * 8 + ((two_m + two_j) / 2) * 2 + qubit;
  };
  for (int two_j : {0, 2}) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      for (int q : {0, 1}) domain.push_back(in_index(two_j, two_m, q));
    }
  }
  for (int two_j : {0, 2}) {
    for (int p : {0, 1}) {
      const int two_jp = p == 0 ? two_j - 1 : two_j + 1;
      if (two_jp < 0) continue;
      for (int two_m = -two_jp; two_m <= two_jp; two_m += 2) {
        const std::int64_t out = (two_jp / 2) * 8 + ((two_m + two_jp) / 2) * 2 + p;
        const auto ang = cg_angle(two_j, two_m);
        const double c = std::cos(ang.theta), s = std::sin(ang.theta);
        auto add = [&](int two_m1, int qubit, double amp) {
          if (std::abs(two_m1) > two_j || amp == 0.0) return;
          v(out, in_index(two_j, two_m1, qubit)) += amp;
        };
        if (p == 0) {
          add(two_m + 1, 0, c);
          add(two_m - 1, 1, -s);
        } else {
          add(two_m + 1, 0, s);
          add(two_m - 1, 1, c);
        }
        image.push_back(out);
      }
    }
  }
  return DenseUnitary::checked(detail::complete_isometry(v, domain, image)).entries;
}

enum class CgBuild { kGate, kMatrix };

/// The two fixed 7-qubit unitaries of the inversion protocol.
/// Wires: 0 input, 1-2 singlet pair, 3-6 ancillas.
struct ProtocolCircuit {
  DenseUnitary v1;
  DenseUnitary v2;
};

inline Circuit v1_circuit(const CMatrix& vcg2, const CMatrix& vcg3) {
  Circuit c{7, {}};
  c.add_swap(2, 5);
  c.add_block(vcg2, {0, 1, 2});
  c.add_cnot(0, 6);
  c.add_block(vcg3.adjoint(), {3, 4, 5, 6});
  c.add_swap(3, 6);
  c.add_swap(1, 3);
  return c;
}

inline Circuit v2_circuit(const CMatrix& vcg2, const CMatrix& vcg3) {
  Circuit c{7, {}};
  c.add_swap(1, 3);
  c.add_block(vcg3, {0, 1, 2, 3});
  c.add_swap(4, 6);
  c.add_cnot(4, 3);
  c.add_swap(5, 6);
  c.add_block(vcg2.adjoint(), {4, 5, 6});
  c.add_swap(2, 4);
  c.add_swap(1, 5);
  c.add_swap(0, 4);
  return c;
}

inline ProtocolCircuit build_protocol(CgBuild path = CgBuild::kGate) {
  const CMatrix vcg2 = path == CgBuild::kGate ? build_vcg2() : build_vcg2_matrix();
  const CMatrix vcg3 = path == CgBuild::kGate ? build_vcg3() : build_vcg3_matrix();
  return {DenseUnitary::checked(v1_circuit(vcg2, vcg3).unitary()),
          DenseUnitary::checked(v2_circuit(vcg2, vcg3).unitary())};
}

inline void require_special_unitary(const DenseUnitary& u, int d = 2) {
  if (u.dim() != d) throw std::invalid_argument("expected a " + std::to_string(d) + "x" + std::to_string(d) + " unitary");
  DenseUnitary::checked(u.entries, tol::kPhysics);
  if (std::abs(u.entries.determinant() - 1.0) > tol::kPhysics) {
    throw std::invalid_argument("expected a special unitary (det = 1)");
  }
}

/// Divides out a determinant root. Never applied implicitly.
inline DenseUnitary project_to_special(const DenseUnitary& u) {
  return DenseUnitary(u.entries / std::pow(u.entries.determinant(), 1.0 / u.dim()));
}

/// (|01> - |10>)/sqrt(2).
inline Statevector singlet() {
  CVector v = CVector::Zero(4);
  v(1) = 1 / std::sqrt(2.0);
  v(2) = -1 / std::sqrt(2.0);
  return Statevector(v, {2, 2});
}

/// One round f_U = V2 U_1 V1 U_1 (U on wire 1, 0-based).
inline Statevector apply_f(const ProtocolCircuit& pc, const DenseUnitary& u, Statevector s) {
  s = apply_to_subsystems(s, u, {1});
  s.amplitudes = pc.v1.entries * s.amplitudes;
  s = apply_to_subsystems(s, u, {1});
  s.amplitudes = pc.v2.entries * s.amplitudes;
  return s;
}

inline Statevector zero_ancillas() { return Statevector::qubits("0000"); }

struct InversionResult {
  Statevector output;
  Statevector expected;
  double fidelity = 0;
  cplx overlap = 0;
};

/// Four calls of u: f_U^2 applied to |phi>|psi->|0000>.
inline InversionResult run_inversion(const ProtocolCircuit& pc, const DenseUnitary& u, const Statevector& phi) {
  require_special_unitary(u);
  if (phi.amplitudes.size() != 2) throw std::invalid_argument("run_inversion: phi must be one qubit");
  Statevector in = tensor(tensor(phi, singlet()), zero_ancillas());
  Statevector out = apply_f(pc, u, apply_f(pc, u, in));
  Statevector first = apply_to_subsystems(singlet(), u, {0});
  Statevector target(u.entries.adjoint() * phi.amplitudes, {2});
  Statevector expected = tensor(tensor(first, target), zero_ancillas());
  expected.amplitudes *= -1.0;
  cplx ov = expected.amplitudes.dot(out.amplitudes);
  return {out, expected, std::norm(ov), ov};
}

struct CatalyticResult {
  Statevector output;
  double catalyst_fidelity = 0;
  double target_fidelity = 0;
};

/// Three calls of u with the catalyst preloaded on wires 1-2 (0-based) in
/// place of the first call's output.
inline CatalyticResult run_catalytic(const ProtocolCircuit& pc, const DenseUnitary& u, const Statevector& phi,
                                     const Statevector& catalyst) {
  require_special_unitary(u);
  if (catalyst.amplitudes.size() != 4) throw std::invalid_argument("run_catalytic: catalyst must be two qubits");
  if (phi.amplitudes.size() != 2) throw std::invalid_argument("run_catalytic: phi must be one qubit");
  Statevector s = tensor(tensor(phi, Statevector(catalyst.amplitudes, {2, 2})), zero_ancillas());
  s.amplitudes = pc.v1.entries * s.amplitudes;
  s = apply_to_subsystems(s, u, {1});
  s.amplitudes = pc.v2.entries * s.amplitudes;
  s = apply_f(pc, u, s);
  auto rho_cat = reduced_state(s, {0, 1}).entries;
  auto rho_tgt = reduced_state(s, {2}).entries;
  CVector target = u.entries.adjoint() * phi.amplitudes;
  double fc = std::real(catalyst.amplitudes.dot(rho_cat * catalyst.amplitudes));
  double ft = std::real(target.dot(rho_tgt * target));
  return {s, fc, ft};
}

/// Transfer matrix G with g_U (v, w) = (v, w) G, where g_U = U_0^† f_U U_0,
/// v = |phi>|psi->|0>, w = |psi->|phi>|0>.
inline Eigen::Matrix2cd g_transfer_matrix(const ProtocolCircuit& pc, const DenseUnitary& u, const Statevector& phi) {
  const Statevector zeros = zero_ancillas();
  Statevector v = tensor(tensor(phi, singlet()), zeros);
  Statevector w = tensor(tensor(singlet(), phi), zeros);
  auto g = [&](Statevector s) {
    s = apply_to_subsystems(s, u, {0});
    s = apply_f(pc, u, s);
    return apply_to_subsystems(s, u.adjoint(), {0});
  };
  Eigen::Matrix<cplx, Eigen::Dynamic, 2> basis(v.amplitudes.size(), 2);
  basis.col(0) = v.amplitudes;
  basis.col(1) = w.amplitudes;
  Eigen::Matrix<cplx, Eigen::Dynamic, 2> images(v.amplitudes.size(), 2);
  images.col(0) = g(v).amplitudes;
  images.col(1) = g(w).amplitudes;
  Eigen::Matrix2cd gram = basis.adjoint() * basis;
  return gram.ldlt().solve(basis.adjoint() * images);
}

}  // namespace uinv
