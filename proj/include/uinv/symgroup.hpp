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
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace uinv {

/// Partition shape given by weakly decreasing positive row lengths.
struct YoungDiagram {
  std::vector<int> rows;

  YoungDiagram() = default;
  explicit YoungDiagram(std::vector<int> r) : rows(std::move(r)) {
    for (size_t k = 0; k < rows.size(); ++k) {
      if (rows[k] <= 0 || (k > 0 && rows[k] > rows[k - 1])) {
        throw std::invalid_argument("YoungDiagram: rows must be positive and weakly decreasing");
      }
    }
  }

  int boxes() const { return std::accumulate(rows.begin(), rows.end(), 0); }
  int depth() const { return static_cast<int>(rows.size()); }
  int row_length(int r) const { return r < depth() ? rows[r] : 0; }
  int column_length(int c) const {
    int h = 0;
    while (h < depth() && rows[h] > c) ++h;
    return h;
  }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (size_t k = 0; k < rows.size(); ++k) os << (k ? "," : "") << rows[k];
    os << ')';
    return os.str();
  }

  friend bool operator==(const YoungDiagram& a, const YoungDiagram& b) { return a.rows == b.rows; }
  friend bool operator!=(const YoungDiagram& a, const YoungDiagram& b) { return a.rows != b.rows; }
  friend bool operator<(const YoungDiagram& a, const YoungDiagram& b) { return a.rows < b.rows; }
};

/// All partitions of n with at most d rows, in reverse lexicographic order:
/// (n) first, then (n-1,1), ...
inline std::vector<YoungDiagram> young_diagrams(int n, int d) {
  if (n < 0 || d < 1) throw std::invalid_argument("young_diagrams: need n >= 0, d >= 1");
  std::vector<YoungDiagram> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

/// Diagrams obtained by adding one box, restricted to depth <= d.
inline std::vector<YoungDiagram> add_box(const YoungDiagram& g, int d) {
  std::vector<YoungDiagram> out;
  for (int r = 0; r <= g.depth() && r < d; ++r) {
    if (r == 0 || g.row_length(r) < g.row_length(r - 1)) {
      std::vector<int> rows = g.rows;
      if (r == g.depth()) rows.push_back(1);
      else ++rows[r];
      out.emplace_back(rows);
    }
  }
  return out;
}

/// Diagrams obtained by removing one corner box.
inline std::vector<YoungDiagram> remove_box(const YoungDiagram& b) {
  std::vector<YoungDiagram> out;
  for (int r = 0; r < b.depth(); ++r) {
    if (b.row_length(r) > b.row_length(r + 1)) {
      std::vector<int> rows = b.rows;
      if (--rows[r] == 0) rows.pop_back();
      out.emplace_back(rows);
    }
  }
  return out;
}

/// Standard filling; row_of[k-1] and col_of[k-1] locate letter k.
struct StandardTableau {
  YoungDiagram shape;
  std::vector<int> row_of;
  std::vector<int> col_of;
  int index = 0;

  int content(int letter) const { return col_of[letter - 1] - row_of[letter - 1]; }

  std::vector<std::vector<int>> filling() const {
    std::vector<std::vector<int>> f;
    for (int len : shape.rows) f.emplace_back(len, 0);
    for (size_t k = 0; k < row_of.size(); ++k) f[row_of[k]][col_of[k]] = static_cast<int>(k) + 1;
    return f;
  }
};

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

inline int hook_length(const YoungDiagram& mu, int r, int c) {
  return (mu.rows[r] - c - 1) + (mu.column_length(c) - r - 1) + 1;
}

/// Number of standard tableaux, n!/prod(hooks).
inline std::uint64_t hook_dimension(const YoungDiagram& mu) {
  unsigned __int128 hooks = 1;
  for (int r = 0; r < mu.depth(); ++r) {
    for (int c = 0; c < mu.rows[r]; ++c) hooks *= static_cast<unsigned>(hook_length(mu, r, c));
  }
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(factorial(mu.boxes())) / hooks);
}

/// Dimension of the SU(d) irrep labeled by mu (Weyl formula, exact integers).
/// Zero when mu has more than d rows.
inline std::uint64_t su_dim(const YoungDiagram& mu, int d) {
  if (mu.depth() > d) return 0;
  unsigned __int128 num = 1, den = 1;
  for (int r = 0; r < mu.depth(); ++r) {
    for (int c = 0; c < mu.rows[r]; ++c) {
      num *= static_cast<unsigned>(d + c - r);
      den *= static_cast<unsigned>(hook_length(mu, r, c));
    }
  }
  return static_cast<std::uint64_t>(num / den);
}

/// Brute-force count of semistandard tableaux with entries 1..d.
inline std::uint64_t semistandard_count(const YoungDiagram& mu, int d) {
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < mu.depth(); ++r) {
    for (int c = 0; c < mu.rows[r]; ++c) cells.emplace_back(r, c);
  }
  std::vector<std::vector<int>> f;
  for (int len : mu.rows) f.emplace_back(len, 0);
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, size_t k) -> void {
    if (k == cells.size()) {
      ++count;
      return;
    }
    auto [r, c] = cells[k];
    int lo = 1;
    if (c > 0) lo = std::max(lo, f[r][c - 1]);
    if (r > 0) lo = std::max(lo, f[r - 1][c] + 1);
    for (int v = lo; v <= d; ++v) {
      f[r][c] = v;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return count;
}

namespace detail {

struct TableauData {
  std::vector<StandardTableau> tableaux;
  std::map<std::vector<int>, int> index_of_rows;  // row_of word -> index
};

// Last-letter order: the corner holding n is chosen top row first; within a
// corner, tableaux follow the order of the smaller shape.
inline std::shared_ptr<const TableauData> build_tableaux(const YoungDiagram& mu) {
  auto data = std::make_shared<TableauData>();
  const int n = mu.boxes();
  if (n == 0) {
    data->tableaux.push_back(StandardTableau{mu, {}, {}, 0});
    data->index_of_rows[{}] = 0;
    return data;
  }
  for (int r = 0; r < mu.depth(); ++r) {
    if (mu.row_length(r) <= mu.row_length(r + 1)) continue;
    std::vector<int> rows = mu.rows;
    const int c = rows[r] - 1;
    if (--rows[r] == 0) rows.pop_back();
    const auto smaller = build_tableaux(YoungDiagram(rows));
    for (const auto& t : smaller->tableaux) {
      StandardTableau ext{mu, t.row_of, t.col_of, static_cast<int>(data->tableaux.size())};
      ext.row_of.push_back(r);
      ext.col_of.push_back(c);
      data->index_of_rows[ext.row_of] = ext.index;
      data->tableaux.push_back(std::move(ext));
    }
  }
  return data;
}

inline std::shared_ptr<const TableauData> tableau_data(const YoungDiagram& mu) {
  static std::mutex mutex;
  static std::map<std::vector<int>, std::shared_ptr<const TableauData>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(mu.rows);
  if (it != cache.end()) return it->second;
  auto data = build_tableaux(mu);
  cache.emplace(mu.rows, data);
  return data;
}

}  // namespace detail

inline const std::vector<StandardTableau>& standard_tableaux(const YoungDiagram& mu) {
  return detail::tableau_data(mu)->tableaux;
}

inline int tableau_index(const YoungDiagram& mu, const std::vector<int>& row_of) {
  const auto& idx = detail::tableau_data(mu)->index_of_rows;
  auto it = idx.find(row_of);
  if (it == idx.end()) throw std::invalid_argument("tableau_index: not a standard tableau of " + mu.str());
  return it->second;
}

inline int irrep_dim(const YoungDiagram& mu) { return static_cast<int>(standard_tableaux(mu).size()); }

/// Young's orthogonal form for the transposition of letters k and k+1.
inline RMatrix generator_matrix(const YoungDiagram& mu, int k) {
  const int n = mu.boxes();
  if (k < 1 || k > n - 1) throw std::out_of_range("generator_matrix: k out of range");
  const auto& ts = standard_tableaux(mu);
  const int dim = static_cast<int>(ts.size());
  RMatrix g = RMatrix::Zero(dim, dim);
  for (const auto& t : ts) {
    const double r = t.content(k + 1) - t.content(k);
    g(t.index, t.index) = 1.0 / r;
    if (std::abs(r) > 1.0) {
      std::vector<int> swapped = t.row_of;
      std::swap(swapped[k - 1], swapped[k]);
      g(tableau_index(mu, swapped), t.index) = std::sqrt(1.0 - 1.0 / (r * r));
    }
  }
  return g;
}

/// Permutation of 1..n in one-line notation: images[k-1] = sigma(k).
struct Permutation {
  std::vector<int> images;

  Permutation() = default;
  explicit Permutation(std::vector<int> im) : images(std::move(im)) {
    std::vector<bool> seen(images.size() + 1, false);
    for (int v : images) {
      if (v < 1 || v > static_cast<int>(images.size()) || seen[v]) {
        throw std::invalid_argument("Permutation: malformed one-line notation");
      }
      seen[v] = true;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> im(n);
    std::iota(im.begin(), im.end(), 1);
    return Permutation(std::move(im));
  }

  /// The cycle (1 2 ... n): k -> k+1, n -> 1.
  static Permutation long_cycle(int n) {
    std::vector<int> im(n);
    for (int k = 0; k < n; ++k) im[k] = (k + 1) % n + 1;
    return Permutation(std::move(im));
  }

  static Permutation transposition(int n, int a, int b) {
    auto p = identity(n);
    std::swap(p.images[a - 1], p.images[b - 1]);
    return p;
  }

  template <class Rng>
  static Permutation random(int n, Rng& rng) {
    auto p = identity(n);
    std::shuffle(p.images.begin(), p.images.end(), rng);
    return p;
  }

  int size() const { return static_cast<int>(images.size()); }
  int operator()(int k) const { return images[k - 1]; }

  Permutation inverse() const {
    std::vector<int> inv(images.size());
    for (int k = 1; k <= size(); ++k) inv[images[k - 1] - 1] = k;
    return Permutation(std::move(inv));
  }

  /// (a*b)(k) = a(b(k)).
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw std::invalid_argument("Permutation: size mismatch");
    std::vector<int> im(a.size());
    for (int k = 1; k <= a.size(); ++k) im[k - 1] = a(b(k));
    return Permutation(std::move(im));
  }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.images == b.images; }

  /// Word k_1..k_r with sigma = s_{k_1} s_{k_2} ... s_{k_r}.
  std::vector<int> adjacent_word() const {
    std::vector<int> w = images;
    std::vector<int> right;  // generators peeled off the right end
    bool changed = true;
    while (changed) {
      changed = false;
      for (int k = 1; k < size(); ++k) {
        if (w[k - 1] > w[k]) {
          std::swap(w[k - 1], w[k]);  // w <- w * s_k
          right.push_back(k);
          changed = true;
        }
      }
    }
    return {right.rbegin(), right.rend()};
  }
};

/// Irrep matrix of sigma as a product of generator matrices.
inline RMatrix permutation_matrix(const YoungDiagram& mu, const Permutation& sigma) {
  if (sigma.size() != mu.boxes()) throw std::invalid_argument("permutation_matrix: size mismatch");
  const int dim = irrep_dim(mu);
  RMatrix m = RMatrix::Identity(dim, dim);
  for (int k : sigma.adjacent_word()) m = m * generator_matrix(mu, k);
  return m;
}

/// Index in alpha of tableau c of gamma extended by the box alpha/gamma.
inline int extend_index(const YoungDiagram& gamma, const YoungDiagram& alpha, int c) {
  int row = -1;
  for (int r = 0; r < alpha.depth(); ++r) {
    if (alpha.row_length(r) == gamma.row_length(r) + 1) {
      if (row >= 0) row = -2;
      else row = r;
    } else if (alpha.row_length(r) != gamma.row_length(r)) {
      row = -2;
    }
  }
  if (row < 0 || alpha.boxes() != gamma.boxes() + 1) {
    throw std::invalid_argument("extend_index: " + alpha.str() + " is not " + gamma.str() + " plus a box");
  }
  std::vector<int> word = standard_tableaux(gamma).at(c).row_of;
  word.push_back(row);
  return tableau_index(alpha, word);
}

/// Shape and index of tableau c of beta with its largest letter removed.
inline std::pair<YoungDiagram, int> restrict_index(const YoungDiagram& beta, int c) {
  const auto& t = standard_tableaux(beta).at(c);
  std::vector<int> rows = beta.rows;
  const int r = t.row_of.back();
  if (--rows[r] == 0) rows.pop_back();
  YoungDiagram parent(rows);
  std::vector<int> word(t.row_of.begin(), t.row_of.end() - 1);
  return {parent, tableau_index(parent, word)};
}

/// d_gamma x d_alpha 0/1 matrix selecting the children of each gamma tableau.
inline RMatrix embedding_matrix(const YoungDiagram& gamma, const YoungDiagram& alpha) {
  const int dg = irrep_dim(gamma);
  RMatrix x = RMatrix::Zero(dg, irrep_dim(alpha));
  for (int c = 0; c < dg; ++c) x(c, extend_index(gamma, alpha, c)) = 1.0;
  return x;
}

/// P_sigma on (C^d)^{⊗n}: |i_1..i_n> -> |i_{sigma^-1(1)} .. i_{sigma^-1(n)}>.
inline RMatrix permutation_operator(const Permutation& sigma, int d) {
  const int n = sigma.size();
  std::vector<int> dims(n, d);
  auto strides = detail::strides_of(dims);
  const std::int64_t total = product_of(dims);
  RMatrix p = RMatrix::Zero(total, total);
  std::vector<int> digit(n, 0);
  for (std::int64_t in = 0; in < total; ++in) {
    std::int64_t out = 0;
    for (int k = 1; k <= n; ++k) out += digit[k - 1] * strides[sigma(k) - 1];
    p(out, in) = 1.0;
    for (int q = n - 1; q >= 0; --q) {
      if (++digit[q] < d) break;
      digit[q] = 0;
    }
  }
  return p;
}

inline std::vector<Permutation> all_permutations(int n) {
  std::vector<Permutation> out;
  auto p = Permutation::identity(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.images.begin(), p.images.end()));
  return out;
}

/// All matrix units E^mu_ij on (C^d)^{⊗n}, indexed [i * d_mu + j], from the
/// group-algebra sum (d_mu/n!) sum_sigma [pi_mu(sigma)]_ij P_sigma.
inline std::vector<RMatrix> matrix_units(const YoungDiagram& mu, int d, bool allow_large = false) {
  const int n = mu.boxes();
  if (mu.depth() > d) throw std::invalid_argument("matrix_units: diagram deeper than d");
  if (!allow_large && (n > 4 || d > 3)) throw std::length_error("matrix_units: size guard (n <= 4, d <= 3)");
  const int dm = irrep_dim(mu);
  std::vector<int> dims(n, d);
  auto strides = detail::strides_of(dims);
  const std::int64_t total = product_of(dims);
  std::vector<RMatrix> units(dm * dm, RMatrix::Zero(total, total));
  const double scale = static_cast<double>(dm) / static_cast<double>(factorial(n));
  std::vector<int> digit(n);
  for (const auto& sigma : all_permutations(n)) {
    RMatrix rho = permutation_matrix(mu, sigma);
    std::fill(digit.begin(), digit.end(), 0);
    for (std::int64_t in = 0; in < total; ++in) {
      std::int64_t out = 0;
      for (int k = 1; k <= n; ++k) out += digit[k - 1] * strides[sigma(k) - 1];
      for (int i = 0; i < dm; ++i) {
        for (int j = 0; j < dm; ++j) {
          if (rho(i, j) != 0.0) units[i * dm + j](out, in) += scale * rho(i, j);
        }
      }
      for (int q = n - 1; q >= 0; --q) {
        if (++digit[q] < d) break;
        digit[q] = 0;
      }
    }
  }
  return units;
}

inline RMatrix matrix_unit(const YoungDiagram& mu, int i, int j, int d, bool allow_large = false) {
  const int dm = irrep_dim(mu);
  if (i < 0 || j < 0 || i >= dm || j >= dm) throw std::out_of_range("matrix_unit: tableau index");
  return matrix_units(mu, d, allow_large)[i * dm + j];
}

}  // namespace uinv
