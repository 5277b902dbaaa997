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

#include "uinv/comb_sdp.hpp"

#include <optional>
#include <vector>

namespace uinv {

/// Published optimal inversion fidelities, four decimals, d = 2..6.
struct ReferenceCell {
  int d;
  int n;
  CombMode mode;
  double value;
  double tolerance;
};

namespace detail {

// Rows d = 2..6, columns n = 1..5. Parallel n = 1 coincides with sequential.
inline constexpr double kSequentialRef[5][5] = {
    {0.5000, 0.7500, 0.9330, 1.0000, 1.0000},
    {0.2222, 0.3333, 0.4444, 0.5556, 0.6667},
    {0.1250, 0.1875, 0.2500, 0.3125, 0.3750},
    {0.0800, 0.1200, 0.1600, 0.2000, 0.2400},
    {0.0556, 0.0833, 0.1111, 0.1389, 0.1667},
};
inline constexpr double kParallelRef[5][5] = {
    {0.5000, 0.6545, 0.7500, 0.8117, 0.8536},
    {0.2222, 0.3333, 0.4310, 0.5131, 0.5810},
    {0.1250, 0.1875, 0.2500, 0.3105, 0.3675},
    {0.0800, 0.1200, 0.1600, 0.2000, 0.2397},
    {0.0556, 0.0833, 0.1111, 0.1389, 0.1667},
};

inline double reference_tolerance(int d, int n, CombMode mode) {
  if (d == 5 && n == 5) return 5e-4;
  if (mode == CombMode::kSequential && d >= n + 1) return 2e-4;
  return 1e-3;
}

}  // namespace detail

inline std::optional<ReferenceCell> reference_cell(int d, int n, CombMode mode) {
  if (d < 2 || d > 6 || n < 1 || n > 5) return std::nullopt;
  const double v = mode == CombMode::kSequential ? detail::kSequentialRef[d - 2][n - 1] : detail::kParallelRef[d - 2][n - 1];
  return ReferenceCell{d, n, mode, v, detail::reference_tolerance(d, n, mode)};
}

inline std::vector<ReferenceCell> reference_table(CombMode mode) {
  std::vector<ReferenceCell> out;
  for (int d = 2; d <= 6; ++d)
    for (int n = 1; n <= 5; ++n) out.push_back(*reference_cell(d, n, mode));
  return out;
}

}  // namespace uinv
