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

#include "metermask/reduce.hpp"

#include <algorithm>
#include <string>

#include "metermask/model.hpp"

namespace metermask {

namespace {

Energy ceil_div(Energy a, Energy b) { return (a + b - 1) / b; }

// Forward sweep over [first, last]: clamps every entry except the last into
// [lo, hi] by pushing the overshoot one step ahead (excess above hi moves
// forward, deficits below lo pull the shortfall from the next step). Both
// moves preserve feasibility because hi >= alpha and lo <= 0. Returns true
// when anything moved.
bool forward_pass(RequestSeq& y, std::size_t first, std::size_t last, Energy lo,
                  Energy hi) {
  bool changed = false;
  for (std::size_t i = first; i < last; ++i) {
    if (y[i] > hi) {
      const Energy d = y[i] - hi;
      y[i] -= d;
      y[i + 1] += d;
      changed = true;
    } else if (y[i] < lo) {
      const Energy u = lo - y[i];
      y[i] += u;
      y[i + 1] -= u;
      changed = true;
    }
  }
  return changed;
}

// Mirror of forward_pass, pushing toward earlier steps; entry `first` is the
// absorber. Valid under the same alphabet conditions.
bool backward_pass(RequestSeq& y, std::size_t first, std::size_t last,
                   Energy lo, Energy hi) {
  bool changed = false;
  for (std::size_t i = last; i > first; --i) {
    if (y[i] > hi) {
      const Energy d = y[i] - hi;
      y[i] -= d;
      y[i - 1] += d;
      changed = true;
    } else if (y[i] < lo) {
      const Energy u = lo - y[i];
      y[i] += u;
      y[i - 1] -= u;
      changed = true;
    }
  }
  return changed;
}

void check_target(const SystemConfig& cfg, Energy lo, Energy hi) {
  if (lo > 0 || hi < cfg.alpha) {
    throw Error(ErrorKind::kConfig,
                "target alphabet must contain [0, alpha]");
  }
}

}  // namespace

ReducedAlphabet consumption_matched_alphabet(const SystemConfig& cfg) {
  return ReducedAlphabet{ReducedAlphabet::Kind::kConsumptionMatched, 0,
                         cfg.alpha};
}

ReducedAlphabet cost_preserving_alphabet(const SystemConfig& cfg,
                                         const TariffSchedule& tariff) {
  if (tariff.blocks.empty()) {
    throw Error(ErrorKind::kConfig, "tariff needs at least one block");
  }
  Energy l_min = tariff.blocks.front().length;
  for (const auto& b : tariff.blocks) {
    l_min = std::min<Energy>(l_min, b.length);
  }
  if (l_min < 1) throw Error(ErrorKind::kConfig, "tariff block with length < 1");
  const Energy b = ceil_div(cfg.beta, l_min);
  return ReducedAlphabet{ReducedAlphabet::Kind::kCostPreserving, -b,
                         b + cfg.alpha};
}

RequestSeq reduce_step(const SystemConfig& cfg, const RequestSeq& y,
                       std::size_t i, Energy d) {
  if (i >= y.size()) throw Error(ErrorKind::kConfig, "step index out of range");
  const Energy max_d = std::max<Energy>(0, y[i] - cfg.alpha);
  if (d < 0 || d > max_d) {
    throw Error(ErrorKind::kConfig,
                "reallocation amount outside [0, " + std::to_string(max_d) + "]");
  }
  RequestSeq out = y;
  out[i] -= d;
  if (i + 1 < y.size()) out[i + 1] += d;
  // At the last step the excess is simply not purchased.
  return out;
}

RequestSeq reduce_to_alphabet(const SystemConfig& cfg, const RequestSeq& y,
                              const ReducedAlphabet& target) {
  check_target(cfg, target.lo, target.hi);
  if (y.empty()) return y;
  RequestSeq out = y;
  const std::size_t last = out.size() - 1;
  // One forward sweep settles every entry but the last; clamping the final
  // entry (excess is dropped, a residual sale is cancelled) finishes the
  // job. The loop guard documents the fixpoint contract rather than doing
  // real work - pass 2 never fires.
  for (std::size_t pass = 0; pass <= out.size(); ++pass) {
    bool changed = forward_pass(out, 0, last, target.lo, target.hi);
    if (out[last] > target.hi) {
      out[last] = target.hi;
      changed = true;
    } else if (out[last] < target.lo) {
      out[last] = target.lo;
      changed = true;
    }
    if (!changed) break;
  }
  return out;
}

RequestSeq reduce_cost_preserving(const SystemConfig& cfg,
                                  const TariffSchedule& tariff,
                                  const RequestSeq& y) {
  if (static_cast<int>(y.size()) != tariff.total_length()) {
    throw Error(ErrorKind::kConfig, "request length != tariff horizon");
  }
  const ReducedAlphabet target = cost_preserving_alphabet(cfg, tariff);
  RequestSeq out = y;
  std::size_t t = 0;
  for (const TariffBlock& blk : tariff.blocks) {
    const std::size_t first = t;
    const std::size_t last = t + static_cast<std::size_t>(blk.length) - 1;

    Energy total = 0;
    for (std::size_t i = first; i <= last; ++i) total += out[i];
    if (total < -cfg.beta ||
        total > cfg.beta + static_cast<Energy>(blk.length) * cfg.alpha) {
      throw Error(ErrorKind::kInfeasible,
                  "block request total outside what any feasible sequence "
                  "can carry");
    }

    // Forward pass piles the overshoot onto the block's final step; the
    // backward pass spreads it back out. Totals never cross a block
    // boundary, so the bill is preserved exactly. Capacity works out
    // because |total| <= beta + l*alpha <= l*(hi - lo) for hi - lo =
    // 2*ceil(beta/l_min) + alpha.
    for (std::size_t pass = 0; pass <= last - first + 1; ++pass) {
      bool changed = forward_pass(out, first, last, target.lo, target.hi);
      changed |= backward_pass(out, first, last, target.lo, target.hi);
      if (!changed) break;
    }
    t = last + 1;
  }
  return out;
}

}  // namespace metermask
