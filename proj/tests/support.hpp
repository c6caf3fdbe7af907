// Copyright 2026 The metermask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Shared fixtures for the unit and acceptance tests: the 48-step Economy-7
// style reference configuration, exhaustive helpers for tiny instances, and
// an independent interval-propagation check for shared-request existence.

#ifndef METERMASK_TESTS_SUPPORT_HPP_
#define METERMASK_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "metermask/codes.hpp"
#include "metermask/model.hpp"
#include "metermask/types.hpp"

namespace mmtest {

constexpr double kLog2Of3 = 1.5849625007211562;  // log2(3)

// Runs f and reports the ErrorKind it threw, or nullopt if it returned.
template <typename F>
inline std::optional<metermask::ErrorKind> error_kind_of(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const metermask::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline metermask::SystemConfig make_cfg(int n, metermask::Energy beta,
                                        metermask::Energy alpha,
                                        metermask::Energy s0 = 0,
                                        metermask::Energy y_min = 0,
                                        metermask::Energy y_max = -1) {
  metermask::SystemConfig cfg;
  cfg.n = n;
  cfg.beta = beta;
  cfg.alpha = alpha;
  cfg.s0 = s0;
  cfg.y_min = y_min;
  cfg.y_max = (y_max < 0) ? alpha : y_max;
  return cfg;
}

// Reference configuration: 48 half-hour steps, 2-unit battery, 1-unit
// consumption cap, two-block day/night tariff.
inline metermask::SystemConfig reference_cfg() { return make_cfg(48, 2, 1); }

inline metermask::TariffSchedule reference_tariff() {
  metermask::TariffSchedule t;
  t.blocks.push_back({0.3192, 14});
  t.blocks.push_back({0.1791, 34});
  return t;
}

// The reference single-letter value at zero budget:
// 16/48 + (2/48) * log2(3).
inline double reference_single_letter_zero() {
  return 16.0 / 48.0 + 2.0 / 48.0 * kLog2Of3;
}

// Independent decision procedure for "does some request sequence in
// [y_min, y_max]^n keep every member of the set within [0, beta]?".
// Propagates the reachable interval of request prefix sums: membership
// constraints at each boundary are themselves intervals, so the reachable
// set stays a contiguous interval throughout.
inline bool exists_common_request(const metermask::SystemConfig& cfg,
                                  const std::vector<metermask::InputPair>& set) {
  using metermask::Energy;
  if (set.empty()) return false;
  const std::size_t n = set.front().x.size();
  std::vector<Energy> lo(n + 1, std::numeric_limits<Energy>::min() / 4);
  std::vector<Energy> hi(n + 1, std::numeric_limits<Energy>::max() / 4);
  for (const metermask::InputPair& p : set) {
    if (p.x.size() != n) return false;
    const std::vector<Energy> ps = metermask::prefix_sums(p.x);
    for (std::size_t i = 1; i <= n; ++i) {
      lo[i] = std::max(lo[i], ps[i] - p.s0);
      hi[i] = std::min(hi[i], ps[i] - p.s0 + cfg.beta);
    }
  }
  Energy rlo = 0;
  Energy rhi = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    rlo += cfg.y_min;
    rhi += cfg.y_max;
    rlo = std::max(rlo, lo[i]);
    rhi = std::min(rhi, hi[i]);
    if (rlo > rhi) return false;
  }
  return true;
}

// Brute-force version of the same question: depth-first search over
// [y_min, y_max]^n tracking every member's battery state.
inline bool exists_common_request_brute(
    const metermask::SystemConfig& cfg,
    const std::vector<metermask::InputPair>& set) {
  using metermask::Energy;
  const std::size_t n = set.front().x.size();
  std::vector<Energy> state(set.size());
  for (std::size_t m = 0; m < set.size(); ++m) state[m] = set[m].s0;

  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == n) return true;
    for (Energy y = cfg.y_min; y <= cfg.y_max; ++y) {
      bool ok = true;
      std::vector<Energy> saved = state;
      for (std::size_t m = 0; m < set.size() && ok; ++m) {
        state[m] += y - set[m].x[i];
        if (state[m] < 0 || state[m] > cfg.beta) ok = false;
      }
      if (ok && self(self, i + 1)) return true;
      state = saved;
    }
    return false;
  };
  return rec(rec, 0);
}

// All (s0, x) input pairs for a config: s0 in [0, beta], x in [0, alpha]^n.
inline std::vector<metermask::InputPair> all_input_pairs(
    const metermask::SystemConfig& cfg) {
  using metermask::Energy;
  std::vector<metermask::InputPair> out;
  metermask::ConsumptionSeq x(static_cast<std::size_t>(cfg.n), 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == x.size()) {
      for (Energy s0 = 0; s0 <= cfg.beta; ++s0) out.push_back({s0, x});
      return;
    }
    for (Energy v = 0; v <= cfg.alpha; ++v) {
      x[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace mmtest

#endif  // METERMASK_TESTS_SUPPORT_HPP_
