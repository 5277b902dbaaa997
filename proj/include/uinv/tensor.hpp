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

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace uinv {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kConstruction = 1e-12;
inline constexpr double kPhysics = 1e-10;
inline constexpr double kSolver = 1e-4;
}  // namespace tol

inline std::int64_t product_of(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) p *= d;
  return p;
}

/// Pure state on a register of subsystems. Subsystem 0 is the leftmost
/// tensor factor and the most significant digit of the basis label.
struct Statevector {
  CVector amplitudes;
  std::vector<int> dims;

  Statevector() = default;
  Statevector(CVector amps, std::vector<int> ds) : amplitudes(std::move(amps)), dims(std::move(ds)) {
    if (amplitudes.size() != product_of(dims)) {
      throw std::invalid_argument("Statevector: amplitude count does not match dims");
    }
  }

  static Statevector basis(const std::vector<int>& dims, std::int64_t index) {
    CVector v = CVector::Zero(product_of(dims));
    v(index) = 1.0;
    return Statevector(std::move(v), dims);
  }

  /// Computational basis state of qubits given as a bit string, e.g. "0110".
  static Statevector qubits(const std::string& bits) {
    std::int64_t index = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("Statevector::qubits: expected 0/1");
      index = 2 * index + (c - '0');
    }
    return basis(std::vector<int>(bits.size(), 2), index);
  }

  int num_subsystems() const { return static_cast<int>(dims.size()); }
  double norm() const { return amplitudes.norm(); }
};

/// Square complex matrix, checked unitary on construction through `checked`.
struct DenseUnitary {
  CMatrix entries;

  DenseUnitary() = default;
  explicit DenseUnitary(CMatrix m) : entries(std::move(m)) {}

  static DenseUnitary checked(CMatrix m, double tolerance = tol::kConstruction) {
    if (m.rows() != m.cols()) throw std::invalid_argument("DenseUnitary: matrix not square");
    double err = (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (err > tolerance) {
      throw std::invalid_argument("DenseUnitary: not unitary (deviation " + std::to_string(err) + ")");
    }
    return DenseUnitary(std::move(m));
  }

  int dim() const { return static_cast<int>(entries.rows()); }
  DenseUnitary adjoint() const { return DenseUnitary(entries.adjoint()); }
};

/// Operator on a labeled tensor factorization (density, Choi or performance operator).
struct OperatorMatrix {
  CMatrix entries;
  std::vector<int> dims;

  OperatorMatrix() = default;
  OperatorMatrix(CMatrix m, std::vector<int> ds) : entries(std::move(m)), dims(std::move(ds)) {
    if (entries.rows() != entries.cols() || entries.rows() != product_of(dims)) {
      throw std::invalid_argument("OperatorMatrix: size does not match dims");
    }
  }

  bool is_hermitian(double tolerance = tol::kConstruction) const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
  }
};

namespace detail {

inline std::vector<std::int64_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::int64_t> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

inline void check_targets(const std::vector<int>& dims, const std::vector<int>& targets) {
  std::vector<bool> seen(dims.size(), false);
  for (int t : targets) {
    if (t < 0 || t >= static_cast<int>(dims.size())) throw std::out_of_range("target index out of range");
    if (seen[t]) throw std::invalid_argument("duplicate target index");
    seen[t] = true;
  }
}

// Offsets of the target sub-block (in target order) and of the remaining
// subsystems, so that full index = rest_offset[r] + target_offset[t].
struct SplitIndex {
  std::vector<std::int64_t> target_offset;
  std::vector<std::int64_t> rest_offset;
};

inline SplitIndex split_index(const std::vector<int>& dims, const std::vector<int>& targets) {
  auto strides = strides_of(dims);
  std::vector<int> rest;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) rest.push_back(k);
  }
  auto offsets = [&](const std::vector<int>& systems) {
    std::int64_t count = 1;
    for (int s : systems) count *= dims[s];
    std::vector<std::int64_t> out(count, 0);
    std::vector<int> digit(systems.size(), 0);
    for (std::int64_t idx = 0; idx < count; ++idx) {
      std::int64_t off = 0;
      for (size_t q = 0; q < systems.size(); ++q) off += digit[q] * strides[systems[q]];
      out[idx] = off;
      for (int q = static_cast<int>(systems.size()) - 1; q >= 0; --q) {
        if (++digit[q] < dims[systems[q]]) break;
        digit[q] = 0;
      }
    }
    return out;
  };
  return {offsets(targets), offsets(rest)};
}

}  // namespace detail

/// Applies `u` to the listed subsystems (in the listed order), leaving the
/// others untouched.
inline Statevector apply_to_subsystems(const Statevector& state, const CMatrix& u,
                                       const std::vector<int>& targets) {
  detail::check_targets(state.dims, targets);
  std::int64_t block = 1;
  for (int t : targets) block *= state.dims[t];
  if (u.rows() != block || u.cols() != block) {
    throw std::invalid_argument("apply_to_subsystems: operator dimension mismatch");
  }
  auto split = detail::split_index(state.dims, targets);
  Statevector out = state;
  CVector local(block);
  for (std::int64_t r : split.rest_offset) {
    for (std::int64_t t = 0; t < block; ++t) local(t) = state.amplitudes(r + split.target_offset[t]);
    CVector mapped = u * local;
    for (std::int64_t t = 0; t < block; ++t) out.amplitudes(r + split.target_offset[t]) = mapped(t);
  }
  return out;
}

inline Statevector apply_to_subsystems(const Statevector& state, const DenseUnitary& u,
                                       const std::vector<int>& targets) {
  return apply_to_subsystems(state, u.entries, targets);
}

/// Left-multiplies every column of `m` by `u` acting on `targets`.
inline CMatrix apply_to_subsystems(const CMatrix& m, const std::vector<int>& dims, const CMatrix& u,
                                   const std::vector<int>& targets) {
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out.col(c) = apply_to_subsystems(Statevector(m.col(c), dims), u, targets).amplitudes;
  }
  return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline RMatrix kron(const RMatrix& a, const RMatrix& b) {
  RMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Statevector tensor(const Statevector& a, const Statevector& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return Statevector(kron(a.amplitudes, b.amplitudes), std::move(dims));
}

/// Traces out every subsystem not in `keep`. Kept factors appear in
/// ascending index order.
inline OperatorMatrix partial_trace(const OperatorMatrix& m, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw std::invalid_argument("partial_trace: duplicate keep index");
  }
  detail::check_targets(m.dims, keep);
  auto split = detail::split_index(m.dims, keep);
  std::vector<int> kept_dims;
  for (int k : keep) kept_dims.push_back(m.dims[k]);
  const auto kd = static_cast<Eigen::Index>(split.target_offset.size());
  CMatrix out = CMatrix::Zero(kd, kd);
  for (Eigen::Index a = 0; a < kd; ++a) {
    for (Eigen::Index b = 0; b < kd; ++b) {
      cplx acc = 0.0;
      for (std::int64_t r : split.rest_offset) {
        acc += m.entries(split.target_offset[a] + r, split.target_offset[b] + r);
      }
      out(a, b) = acc;
    }
  }
  return OperatorMatrix(std::move(out), std::move(kept_dims));
}

/// Reduced density matrix of a pure state on `keep`.
inline OperatorMatrix reduced_state(const Statevector& s, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  detail::check_targets(s.dims, keep);
  auto split = detail::split_index(s.dims, keep);
  std::vector<int> kept_dims;
  for (int k : keep) kept_dims.push_back(s.dims[k]);
  const auto kd = static_cast<Eigen::Index>(split.target_offset.size());
  const auto rd = static_cast<Eigen::Index>(split.rest_offset.size());
  CMatrix psi(kd, rd);
  for (Eigen::Index a = 0; a < kd; ++a) {
    for (Eigen::Index r = 0; r < rd; ++r) psi(a, r) = s.amplitudes(split.target_offset[a] + split.rest_offset[r]);
  }
  return OperatorMatrix(psi * psi.adjoint(), std::move(kept_dims));
}

/// Reorders tensor factors: output factor k is input factor order[k].
inline CMatrix permute_factors(const CMatrix& m, const std::vector<int>& dims, const std::vector<int>& order) {
  if (order.size() != dims.size()) throw std::invalid_argument("permute_factors: bad order");
  detail::check_targets(dims, order);
  auto in_strides = detail::strides_of(dims);
  std::vector<int> out_dims;
  for (int o : order) out_dims.push_back(dims[o]);
  const std::int64_t n = product_of(dims);
  std::vector<std::int64_t> map(n);
  std::vector<int> digit(dims.size(), 0);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t src = 0;
    for (size_t k = 0; k < order.size(); ++k) src += digit[k] * in_strides[order[k]];
    map[idx] = src;
    for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
      if (++digit[k] < out_dims[k]) break;
      digit[k] = 0;
    }
  }
  CMatrix out(m.rows(), m.cols());
  if (m.cols() == 1) {
    for (std::int64_t a = 0; a < n; ++a) out(a, 0) = m(map[a], 0);
    return out;
  }
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) out(a, b) = m(map[a], map[b]);
  }
  return out;
}

inline RMatrix permute_factors(const RMatrix& m, const std::vector<int>& dims, const std::vector<int>& order) {
  return permute_factors(CMatrix(m.cast<cplx>()), dims, order).real();
}

/// Haar-random element of SU(d).
template <class Rng>
DenseUnitary haar_unitary(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("haar_unitary: d must be at least 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix z(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) z(i, j) = cplx(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
  cplx root = std::pow(q.determinant(), 1.0 / d);
  q /= root;
  return DenseUnitary(std::move(q));
}

inline DenseUnitary haar_unitary(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_unitary(d, rng);
}

/// Haar-random pure state on `dims`.
template <class Rng>
Statevector random_state(const std::vector<int>& dims, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(product_of(dims));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v.normalize();
  return Statevector(std::move(v), dims);
}

/// |<a|b>|^2 for normalized states.
inline double state_fidelity(const Statevector& a, const Statevector& b) {
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

}  // namespace uinv
