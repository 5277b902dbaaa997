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
#include "uinv/symgroup.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace uinv {

enum class CombMode { kSequential, kParallel };

inline std::string to_string(CombMode m) { return m == CombMode::kSequential ? "sequential" : "parallel"; }

inline double ipow(double base, int e) {
  double r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

/// Omega_mu blocks: [Omega_mu]_{ik,jl} = [pi_mu]_ik [pi_mu]_jl / (d^2 m_mu)
/// with pi the inverse of the cycle (1 2 ... n+1) in the representation
/// convention used by permutation_matrix.
struct PerformanceBlocks {
  int d = 0;
  int n = 0;
  std::vector<YoungDiagram> shapes;
  std::vector<RMatrix> omega;
};

inline PerformanceBlocks performance_blocks(int d, int n) {
  if (d < 2 || n < 1) throw std::invalid_argument("performance_blocks: need d >= 2, n >= 1");
  PerformanceBlocks p{d, n, young_diagrams(n + 1, d), {}};
  const auto cycle = Permutation::long_cycle(n + 1).inverse();
  for (const auto& mu : p.shapes) {
    const RMatrix pi = permutation_matrix(mu, cycle);
    const int dm = irrep_dim(mu);
    RVector v(dm * dm);
    for (int i = 0; i < dm; ++i) {
      for (int k = 0; k < dm; ++k) v(i * dm + k) = pi(i, k);
    }
    p.omega.push_back(v * v.transpose() / (double(d) * d * double(su_dim(mu, d))));
  }
  return p;
}

/// Symmetry-reduced comb: blocks[mu_idx * S + nu_idx] = C^{mu nu}, rows (i,k)
/// flattened as i * d_nu + k.
struct ReducedComb {
  int d = 0;
  int n = 0;
  std::vector<YoungDiagram> shapes;
  std::vector<RMatrix> blocks;

  int num_shapes() const { return static_cast<int>(shapes.size()); }
  RMatrix& block(int mu, int nu) { return blocks[mu * num_shapes() + nu]; }
  const RMatrix& block(int mu, int nu) const { return blocks[mu * num_shapes() + nu]; }
};

inline ReducedComb zero_reduced_comb(int d, int n) {
  ReducedComb c{d, n, young_diagrams(n + 1, d), {}};
  for (const auto& mu : c.shapes) {
    for (const auto& nu : c.shapes) {
      const int s = irrep_dim(mu) * irrep_dim(nu);
      c.blocks.push_back(RMatrix::Zero(s, s));
    }
  }
  return c;
}

inline ReducedComb reduced_from_blocks(int d, int n, std::vector<RMatrix> blocks) {
  ReducedComb c = zero_reduced_comb(d, n);
  if (blocks.size() != c.blocks.size()) throw std::invalid_argument("reduced_from_blocks: block count mismatch");
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].rows() != c.blocks[b].rows()) throw std::invalid_argument("reduced_from_blocks: block size mismatch");
  }
  c.blocks = std::move(blocks);
  return c;
}

/// sum_mu Tr(C^{mu mu} Omega_mu).
inline double evaluate_fidelity(const ReducedComb& c, const PerformanceBlocks& p) {
  if (c.d != p.d || c.n != p.n || c.shapes.size() != p.shapes.size()) {
    throw std::invalid_argument("evaluate_fidelity: shape mismatch");
  }
  double f = 0;
  for (int mu = 0; mu < c.num_shapes(); ++mu) f += (c.block(mu, mu) * p.omega[mu]).trace();
  return f;
}

namespace detail {

using LinearForm = std::vector<std::pair<int, double>>;  // (variable id, coefficient)

inline void normalize_form(LinearForm& f) {
  std::sort(f.begin(), f.end());
  LinearForm out;
  for (auto& t : f) {
    if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
    else out.push_back(t);
  }
  std::erase_if(out, [](const auto& t) { return std::abs(t.second) < 1e-15; });
  f.swap(out);
}

inline void add_scaled(LinearForm& dst, const LinearForm& src, double s) {
  for (auto [id, w] : src) dst.emplace_back(id, s * w);
}

// Upper-triangle variable ids over a list of symmetric blocks.
struct VariableLayout {
  std::vector<int> dims;
  std::vector<int> offset;
  std::vector<SparseEntry> where;  // id -> (block,row,col)

  explicit VariableLayout(std::vector<int> ds) : dims(std::move(ds)) {
    for (int b = 0; b < static_cast<int>(dims.size()); ++b) {
      offset.push_back(static_cast<int>(where.size()));
      for (int r = 0; r < dims[b]; ++r) {
        for (int c = r; c < dims[b]; ++c) where.push_back({b, r, c, 0});
      }
    }
  }

  int id(int block, int r, int c) const {
    if (r > c) std::swap(r, c);
    const int s = dims[block];
    return offset[block] + r * s - r * (r - 1) / 2 + (c - r);
  }
};

// Collects equalities form = rhs as SDP constraints, skipping empty rows and
// exact duplicates.
struct ConstraintSink {
  const VariableLayout& layout;
  std::vector<Constraint> out;
  std::set<std::pair<LinearForm, double>> seen;

  void add(LinearForm f, double rhs) {
    normalize_form(f);
    if (f.empty()) {
      if (std::abs(rhs) > 1e-12) throw std::logic_error("inconsistent empty constraint");
      return;
    }
    if (!seen.insert({f, rhs}).second) return;
    Constraint c;
    c.rhs = rhs;
    for (auto [id, w] : f) {
      SparseEntry e = layout.where[id];
      e.value = e.row == e.col ? w : 0.5 * w;
      c.entries.push_back(e);
    }
    out.push_back(std::move(c));
  }
};

// Dense symmetric matrix of linear forms.
struct FormMatrix {
  int dim = 0;
  std::vector<LinearForm> entries;
  FormMatrix() = default;
  explicit FormMatrix(int s) : dim(s), entries(std::size_t(s) * s) {}
  LinearForm& at(int r, int c) { return entries[std::size_t(r) * dim + c]; }
  const LinearForm& at(int r, int c) const { return entries[std::size_t(r) * dim + c]; }
};

struct ReducedLayout {
  int d, n;
  std::vector<YoungDiagram> top;
  VariableLayout vars;

  ReducedLayout(int d_, int n_, std::vector<YoungDiagram> shapes)
      : d(d_), n(n_), top(shapes), vars([&] {
          std::vector<int> ds;
          for (const auto& mu : shapes)
            for (const auto& nu : shapes) ds.push_back(irrep_dim(mu) * irrep_dim(nu));
          return ds;
        }()) {}
};

// Level data C_i^{ab} for a, b in Y_d^i as form matrices.
struct Level {
  std::vector<YoungDiagram> shapes;
  std::map<std::pair<int, int>, FormMatrix> blocks;
  int index_of(const YoungDiagram& y) const {
    for (size_t k = 0; k < shapes.size(); ++k)
      if (shapes[k] == y) return static_cast<int>(k);
    return -1;
  }
};

inline std::vector<Level> reduced_levels(const ReducedLayout& lay) {
  const int d = lay.d, n = lay.n;
  std::vector<Level> levels(n + 2);
  Level& top = levels[n + 1];
  top.shapes = lay.top;
  const int s = static_cast<int>(lay.top.size());
  for (int mu = 0; mu < s; ++mu) {
    for (int nu = 0; nu < s; ++nu) {
      const int b = mu * s + nu, dim = lay.vars.dims[b];
      FormMatrix fm(dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) fm.at(r, c) = {{lay.vars.id(b, r, c), 1.0}};
      top.blocks.emplace(std::make_pair(mu, nu), std::move(fm));
    }
  }
  for (int i = n; i >= 0; --i) {
    Level& lv = levels[i];
    const Level& up = levels[i + 1];
    lv.shapes = young_diagrams(i, d);
    for (size_t a = 0; a < lv.shapes.size(); ++a) {
      for (size_t b = 0; b < lv.shapes.size(); ++b) {
        const auto& al = lv.shapes[a];
        const auto& be = lv.shapes[b];
        const int da = irrep_dim(al), db = irrep_dim(be);
        FormMatrix fm(da * db);
        for (const auto& mu : add_box(al, d)) {
          for (const auto& nu : add_box(be, d)) {
            const FormMatrix& src = up.blocks.at({up.index_of(mu), up.index_of(nu)});
            const int dnu = irrep_dim(nu);
            std::vector<int> row_map(da * db);
            for (int x = 0; x < da; ++x)
              for (int y = 0; y < db; ++y) row_map[x * db + y] = extend_index(al, mu, x) * dnu + extend_index(be, nu, y);
            for (int r = 0; r < da * db; ++r)
              for (int c = r; c < da * db; ++c) add_scaled(fm.at(r, c), src.at(row_map[r], row_map[c]), 1.0 / d);
          }
        }
        for (int r = 0; r < da * db; ++r) {
          for (int c = r; c < da * db; ++c) {
            normalize_form(fm.at(r, c));
            if (c != r) fm.at(c, r) = fm.at(r, c);
          }
        }
        lv.blocks.emplace(std::make_pair(int(a), int(b)), std::move(fm));
      }
    }
  }
  return levels;
}

inline SdpProblem reduced_problem_shell(const ReducedLayout& lay) {
  SdpProblem p;
  p.block_dims = lay.vars.dims;
  const auto perf = performance_blocks(lay.d, lay.n);
  const int s = static_cast<int>(lay.top.size());
  for (int mu = 0; mu < s; ++mu) {
    for (int nu = 0; nu < s; ++nu) {
      const int dim = lay.vars.dims[mu * s + nu];
      p.objective.push_back(mu == nu ? perf.omega[mu] : RMatrix::Zero(dim, dim));
    }
  }
  return p;
}

}  // namespace detail

struct SizeLimits {
  long max_variables = 20000;
  long full_dimension_cap = 4096;
};

class SizeLimitExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Block census "(mu,nu):size ..." for diagnostics.
inline std::string block_census(int d, int n) {
  std::string out;
  const auto shapes = young_diagrams(n + 1, d);
  long vars = 0;
  for (const auto& mu : shapes) {
    for (const auto& nu : shapes) {
      const long s = long(irrep_dim(mu)) * irrep_dim(nu);
      vars += s * (s + 1) / 2;
      out += mu.str() + "x" + nu.str() + ":" + std::to_string(s) + " ";
    }
  }
  return out + "variables=" + std::to_string(vars);
}

inline void check_reduced_size(int d, int n, const SizeLimits& lim) {
  if (d < 2 || n < 1) throw std::invalid_argument("comb SDP: need d >= 2, n >= 1");
  long vars = 0;
  for (const auto& mu : young_diagrams(n + 1, d)) {
    for (const auto& nu : young_diagrams(n + 1, d)) {
      const long s = long(irrep_dim(mu)) * irrep_dim(nu);
      vars += s * (s + 1) / 2;
    }
  }
  if (vars > lim.max_variables) {
    throw SizeLimitExceeded("reduced SDP for d=" + std::to_string(d) + ", n=" + std::to_string(n) + " needs " +
                            std::to_string(vars) + " variables, cap is " + std::to_string(lim.max_variables));
  }
}

/// Reduced SDP for sequential combs.
inline SdpProblem build_sequential_sdp(int d, int n, const SizeLimits& lim = {}) {
  check_reduced_size(d, n, lim);
  detail::ReducedLayout lay(d, n, young_diagrams(n + 1, d));
  const auto levels = detail::reduced_levels(lay);
  SdpProblem p = detail::reduced_problem_shell(lay);
  detail::ConstraintSink sink{lay.vars, {}, {}};
  for (int i = 1; i <= n + 1; ++i) {
    const auto& cur = levels[i];
    const auto& prev = levels[i - 1];
    for (size_t g = 0; g < prev.shapes.size(); ++g) {
      const auto& gamma = prev.shapes[g];
      const int dg = irrep_dim(gamma);
      for (size_t b = 0; b < cur.shapes.size(); ++b) {
        const auto& beta = cur.shapes[b];
        const int db = irrep_dim(beta);
        const double mb = double(su_dim(beta, d));
        std::vector<std::pair<YoungDiagram, int>> parent(db);
        for (int c = 0; c < db; ++c) parent[c] = restrict_index(beta, c);
        const int dim = dg * db;
        for (int r = 0; r < dim; ++r) {
          for (int c = r; c < dim; ++c) {
            const int e = r / db, x = r % db, f = c / db, y = c % db;
            detail::LinearForm form;
            for (const auto& alpha : add_box(gamma, d)) {
              const auto& blk = cur.blocks.at({cur.index_of(alpha), int(b)});
              detail::add_scaled(form, blk.at(extend_index(gamma, alpha, e) * db + x, extend_index(gamma, alpha, f) * db + y),
                                 1.0 / mb);
            }
            if (parent[x].first == parent[y].first) {
              const auto& delta = parent[x].first;
              const int dd = irrep_dim(delta);
              const auto& blk = prev.blocks.at({int(g), prev.index_of(delta)});
              detail::add_scaled(form, blk.at(e * dd + parent[x].second, f * dd + parent[y].second),
                                 -1.0 / double(su_dim(delta, d)));
            }
            sink.add(std::move(form), 0.0);
          }
        }
      }
    }
  }
  sink.add(levels[0].blocks.at({0, 0}).at(0, 0), 1.0);
  p.constraints = std::move(sink.out);
  return p;
}

/// Reduced SDP for parallel combs.
inline SdpProblem build_parallel_sdp(int d, int n, const SizeLimits& lim = {}) {
  check_reduced_size(d, n, lim);
  detail::ReducedLayout lay(d, n, young_diagrams(n + 1, d));
  SdpProblem p = detail::reduced_problem_shell(lay);
  detail::ConstraintSink sink{lay.vars, {}, {}};
  const auto& top = lay.top;
  const int s = static_cast<int>(top.size());
  auto var = [&](int mu, int nu, int r, int c) { return lay.vars.id(mu * s + nu, r, c); };
  auto idx = [&](const YoungDiagram& y) {
    for (int k = 0; k < s; ++k)
      if (top[k] == y) return k;
    throw std::logic_error("shape not found");
  };
  const double dn1 = ipow(d, n + 1);
  for (const auto& alpha : young_diagrams(n, d)) {
    const int da = irrep_dim(alpha);
    const auto children = add_box(alpha, d);
    // D^alpha[a][b] as linear forms.
    std::vector<detail::LinearForm> dal(da * da);
    for (int a = 0; a < da; ++a) {
      for (int b = 0; b < da; ++b) {
        for (const auto& mu : children) {
          const int ia = extend_index(alpha, mu, a), ib = extend_index(alpha, mu, b);
          for (int nu = 0; nu < s; ++nu) {
            const int dnu = irrep_dim(top[nu]);
            for (int k = 0; k < dnu; ++k) dal[a * da + b].emplace_back(var(idx(mu), nu, ia * dnu + k, ib * dnu + k), 1.0);
          }
        }
      }
    }
    for (int nu = 0; nu < s; ++nu) {
      const int dnu = irrep_dim(top[nu]);
      const double mnu = double(su_dim(top[nu], d));
      const int dim = da * dnu;
      for (int r = 0; r < dim; ++r) {
        for (int c = r; c < dim; ++c) {
          const int a = r / dnu, k = r % dnu, b = c / dnu, l = c % dnu;
          detail::LinearForm form;
          for (const auto& mu : children) {
            form.emplace_back(var(idx(mu), nu, extend_index(alpha, mu, a) * dnu + k, extend_index(alpha, mu, b) * dnu + l),
                              1.0 / mnu);
          }
          if (k == l) detail::add_scaled(form, dal[a * da + b], -1.0 / dn1);
          sink.add(std::move(form), 0.0);
        }
      }
    }
  }
  detail::LinearForm trace;
  for (int mu = 0; mu < s; ++mu) {
    for (int nu = 0; nu < s; ++nu) {
      const int dim = lay.vars.dims[mu * s + nu];
      for (int r = 0; r < dim; ++r) trace.emplace_back(var(mu, nu, r, r), 1.0);
    }
  }
  sink.add(std::move(trace), dn1);
  p.constraints = std::move(sink.out);
  return p;
}

inline SdpProblem build_reduced_sdp(int d, int n, CombMode mode, const SizeLimits& lim = {}) {
  return mode == CombMode::kSequential ? build_sequential_sdp(d, n, lim) : build_parallel_sdp(d, n, lim);
}

// ---------------------------------------------------------------------------
// Full-space formulation. Factor order: P, I1, O1, ..., In, On, F.

namespace detail {

// Factor order taking (I1..In, F, P, O1..On) to the interleaved order.
inline std::vector<int> grouped_to_interleaved(int n) {
  std::vector<int> order(2 * n + 2);
  order[0] = n + 1;
  for (int k = 1; k <= n; ++k) {
    order[2 * k - 1] = k - 1;
    order[2 * k] = n + 1 + k;
  }
  order[2 * n + 1] = n;
  return order;
}

inline std::vector<int> interleaved_to_grouped(int n) {
  std::vector<int> order(2 * n + 2);
  for (int k = 1; k <= n; ++k) order[k - 1] = 2 * k - 1;
  order[n] = 2 * n + 1;
  order[n + 1] = 0;
  for (int k = 1; k <= n; ++k) order[n + 1 + k] = 2 * k;
  return order;
}

// Forms for Tr over all factors outside `keep` (ascending) of a single
// N x N variable block.
inline FormMatrix trace_forms(const VariableLayout& vars, const std::vector<int>& dims, const std::vector<int>& keep,
                              double scale) {
  auto split = split_index(dims, keep);
  const int k = static_cast<int>(split.target_offset.size());
  FormMatrix fm(k);
  for (int r = 0; r < k; ++r) {
    for (int c = r; c < k; ++c) {
      LinearForm f;
      for (auto t : split.rest_offset) {
        f.emplace_back(vars.id(0, int(split.target_offset[r] + t), int(split.target_offset[c] + t)), scale);
      }
      normalize_form(f);
      fm.at(r, c) = f;
      fm.at(c, r) = f;
    }
  }
  return fm;
}

// Adds lhs[r][c] = delta(extra digits) * rhs[proj r][proj c] for r <= c where
// lhs lives on factors `outer` (ascending) and rhs on `inner` (subset, ascending).
inline void equate_embedded(ConstraintSink& sink, const FormMatrix& lhs, const std::vector<int>& outer,
                            const FormMatrix& rhs, const std::vector<int>& inner, int d) {
  const int no = static_cast<int>(outer.size());
  std::vector<int> pos;  // positions of inner factors within outer
  for (int f : inner) pos.push_back(static_cast<int>(std::find(outer.begin(), outer.end(), f) - outer.begin()));
  auto digits = [&](int idx) {
    std::vector<int> dg(no);
    for (int q = no - 1; q >= 0; --q) {
      dg[q] = idx % d;
      idx /= d;
    }
    return dg;
  };
  for (int r = 0; r < lhs.dim; ++r) {
    const auto dr = digits(r);
    for (int c = r; c < lhs.dim; ++c) {
      const auto dc = digits(c);
      LinearForm f = lhs.at(r, c);
      bool match = true;
      for (int q = 0; q < no; ++q) {
        if (std::find(pos.begin(), pos.end(), q) == pos.end() && dr[q] != dc[q]) match = false;
      }
      if (match) {
        int ri = 0, ci = 0;
        for (int q : pos) {
          ri = ri * d + dr[q];
          ci = ci * d + dc[q];
        }
        add_scaled(f, rhs.at(ri, ci), -1.0);
      }
      sink.add(std::move(f), 0.0);
    }
  }
}

inline std::vector<int> range_vec(int lo, int hi) {
  std::vector<int> v;
  for (int k = lo; k < hi; ++k) v.push_back(k);
  return v;
}

}  // namespace detail

inline long full_dimension(int d, int n) { return static_cast<long>(ipow(d, 2 * (n + 1)) + 0.5); }

/// Performance operator on the interleaved full space.
inline RMatrix full_performance_operator(int d, int n) {
  const int nf = n + 1;
  const auto cycle = Permutation::long_cycle(nf).inverse();
  const RMatrix q = permutation_operator(cycle, d);
  const long half = static_cast<long>(ipow(d, nf) + 0.5);
  RMatrix grouped = RMatrix::Zero(half * half, half * half);
  for (const auto& mu : young_diagrams(nf, d)) {
    const int dm = irrep_dim(mu);
    const auto units = matrix_units(mu, d, true);
    const double w = 1.0 / (double(d) * d * double(su_dim(mu, d)));
    for (int i = 0; i < dm; ++i) {
      for (int j = 0; j < dm; ++j) {
        grouped += w * kron(RMatrix(q * units[i * dm + j] * q.transpose()), units[i * dm + j]);
      }
    }
  }
  std::vector<int> dims(2 * nf, d);
  return permute_factors(grouped, dims, detail::grouped_to_interleaved(n));
}

/// Full-space comb SDP with a single PSD block of size d^{2(n+1)}.
inline SdpProblem build_full_sdp(int d, int n, CombMode mode, const SizeLimits& lim = {}) {
  if (d < 2 || n < 1) throw std::invalid_argument("full SDP: need d >= 2, n >= 1");
  const long dim = full_dimension(d, n);
  if (dim > lim.full_dimension_cap) {
    throw SizeLimitExceeded("full SDP dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(lim.full_dimension_cap));
  }
  const int nf = 2 * n + 2;
  std::vector<int> dims(nf, d);
  detail::VariableLayout vars({int(dim)});
  detail::ConstraintSink sink{vars, {}, {}};
  SdpProblem p;
  p.block_dims = {int(dim)};
  p.objective = {full_performance_operator(d, n)};
  if (mode == CombMode::kSequential) {
    for (int i = 1; i <= n + 1; ++i) {
      const auto outer = detail::range_vec(0, 2 * i - 1);
      const auto inner = detail::range_vec(0, 2 * i - 2);
      auto lhs = detail::trace_forms(vars, dims, outer, 1.0 / ipow(d, n + 1 - i));
      auto rhs = detail::trace_forms(vars, dims, inner, 1.0 / ipow(d, n + 2 - i));
      detail::equate_embedded(sink, lhs, outer, rhs, inner, d);
    }
    sink.add(detail::trace_forms(vars, dims, {}, 1.0 / ipow(d, n + 1)).at(0, 0), 1.0);
  } else {
    const auto outer = detail::range_vec(0, 2 * n + 1);
    std::vector<int> inner = {0};
    for (int k = 1; k <= n; ++k) inner.push_back(2 * k - 1);
    auto lhs = detail::trace_forms(vars, dims, outer, 1.0);
    auto rhs = detail::trace_forms(vars, dims, inner, 1.0 / ipow(d, n));
    detail::equate_embedded(sink, lhs, outer, rhs, inner, d);
    auto tp = detail::trace_forms(vars, dims, {0}, 1.0);
    for (int r = 0; r < d; ++r) {
      for (int c = r; c < d; ++c) sink.add(tp.at(r, c), r == c ? ipow(d, n) : 0.0);
    }
  }
  p.constraints = std::move(sink.out);
  return p;
}

// ---------------------------------------------------------------------------
// Conversions between the full space and reduced blocks.

namespace detail {

/// Throws unless `grouped` commutes with V^{⊗nf} ⊗ W^{⊗nf} for one fixed
/// pair of Haar samples.
inline void require_commutant(const RMatrix& grouped, int d, int nf) {
  std::mt19937_64 rng(0x5eedULL);
  const CMatrix v = haar_unitary(d, rng).entries;
  const CMatrix w = haar_unitary(d, rng).entries;
  CMatrix a = CMatrix::Identity(1, 1), b = a;
  for (int k = 0; k < nf; ++k) {
    a = kron(a, v);
    b = kron(b, w);
  }
  const CMatrix t = kron(a, b);
  const CMatrix g = grouped.cast<cplx>();
  const double scale = std::max(1.0, grouped.cwiseAbs().maxCoeff());
  if ((g * t - t * g).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("reduce_comb: input does not commute with V^(n+1) x W^(n+1)");
  }
}

}  // namespace detail

/// c^{mu nu}_{ijkl} = Tr[full (E^mu_ji ⊗ E^nu_lk)], with E^mu on (I1..In, F)
/// and E^nu on (P, O1..On). `full` is in the interleaved order.
inline ReducedComb reduce_comb(const RMatrix& full, int d, int n) {
  const int nf = n + 1;
  std::vector<int> dims(2 * nf, d);
  if (full.rows() != full_dimension(d, n)) throw std::invalid_argument("reduce_comb: size mismatch");
  const RMatrix g = permute_factors(full, dims, detail::interleaved_to_grouped(n));
  ReducedComb out = zero_reduced_comb(d, n);
  std::vector<std::vector<RMatrix>> units;
  for (const auto& mu : out.shapes) units.push_back(matrix_units(mu, d));
  detail::require_commutant(g, d, nf);
  const long half = static_cast<long>(ipow(d, nf) + 0.5);
  const int s = out.num_shapes();
  for (int mu = 0; mu < s; ++mu) {
    const int dm = irrep_dim(out.shapes[mu]);
    for (int nu = 0; nu < s; ++nu) {
      const int dn = irrep_dim(out.shapes[nu]);
      RMatrix& blk = out.block(mu, nu);
      for (int i = 0; i < dm; ++i) {
        for (int j = 0; j < dm; ++j) {
          // Partial pairing with E^mu_ji on the first group.
          const RMatrix& a = units[mu][j * dm + i];
          RMatrix reduced_b = RMatrix::Zero(half, half);
          for (long r = 0; r < half; ++r)
            for (long c = 0; c < half; ++c)
              if (a(c, r) != 0.0) reduced_b += a(c, r) * g.block(r * half, c * half, half, half);
          for (int k = 0; k < dn; ++k)
            for (int l = 0; l < dn; ++l)
              blk(i * dn + k, j * dn + l) = (reduced_b * units[nu][l * dn + k]).trace();
        }
      }
    }
  }
  return out;
}

/// Inverse of reduce_comb: sum c/(m_mu m_nu) E^mu_ij ⊗ E^nu_kl, interleaved order.
inline RMatrix expand_comb(const ReducedComb& c) {
  const int d = c.d, n = c.n, nf = n + 1;
  const long half = static_cast<long>(ipow(d, nf) + 0.5);
  RMatrix g = RMatrix::Zero(half * half, half * half);
  const int s = c.num_shapes();
  std::vector<std::vector<RMatrix>> units;
  for (const auto& mu : c.shapes) units.push_back(matrix_units(mu, d));
  for (int mu = 0; mu < s; ++mu) {
    const int dm = irrep_dim(c.shapes[mu]);
    const double mm = double(su_dim(c.shapes[mu], d));
    for (int nu = 0; nu < s; ++nu) {
      const int dn = irrep_dim(c.shapes[nu]);
      const double mn = double(su_dim(c.shapes[nu], d));
      const RMatrix& blk = c.block(mu, nu);
      for (int i = 0; i < dm; ++i)
        for (int j = 0; j < dm; ++j) {
          RMatrix b = RMatrix::Zero(half, half);
          for (int k = 0; k < dn; ++k)
            for (int l = 0; l < dn; ++l) b += blk(i * dn + k, j * dn + l) * units[nu][k * dn + l];
          g += kron(units[mu][i * dm + j], b) / (mm * mn);
        }
    }
  }
  std::vector<int> dims(2 * nf, d);
  return permute_factors(g, dims, detail::grouped_to_interleaved(n));
}

/// The depolarizing comb 1/d^{n+1} in reduced form: C^{mu nu} = m_mu m_nu / d^{n+1} I.
inline ReducedComb depolarizing_reduced_comb(int d, int n) {
  ReducedComb c = zero_reduced_comb(d, n);
  const int s = c.num_shapes();
  for (int mu = 0; mu < s; ++mu)
    for (int nu = 0; nu < s; ++nu) {
      auto& b = c.block(mu, nu);
      b.setIdentity();
      b *= double(su_dim(c.shapes[mu], d)) * double(su_dim(c.shapes[nu], d)) / ipow(d, n + 1);
    }
  return c;
}

}  // namespace uinv
