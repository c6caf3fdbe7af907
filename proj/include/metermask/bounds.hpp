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
// Privacy-cost bounds. Closed forms: the depletion-time bracket on the
// unconstrained leakage and the single-letter time-sharing bound. Solver:
// the cost-constrained term i_gamma, a min-max over channels between
// battery boundary-state vectors, bounded from above by the capacity of the
// best feasible channel found (deterministic candidates, a time-sharing
// family, and projected subgradient descent with multistart).

#ifndef METERMASK_BOUNDS_HPP_
#define METERMASK_BOUNDS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "metermask/tariff.hpp"
#include "metermask/types.hpp"

namespace metermask {

// Bracket on the unconstrained per-step leakage:
//   lower = floor(n / ceil(lambda)) / n
//   upper = max(0, ceil((n - floor(beta/alpha)) / lambda)) / n, lambda real.
// For integer lambda the two closed forms coincide.
struct InfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

InfBounds i_infty_bounds(const SystemConfig& cfg);

// Solver certificate for one i_gamma evaluation.
struct IGammaResult {
  double bits_per_step = 0.0;
  double delta = 0.0;       // budget this value was computed at
  double budget = 0.0;      // delta - beta * ||(delta_vec)+||, the row budget
  bool converged = true;    // all inner capacity computations converged
  bool exact = false;       // value obtained from a deterministic channel in closed form
  int starts = 0;           // descent starts evaluated
  long iterations = 0;      // total inner-solver iterations
  std::uint64_t seed = 0;
};

// Minimal capacity between boundary-state vectors over channels whose
// per-row expected boundary cost is within the budget: an upper bound on the
// cost-constrained leakage term, reported at a feasible channel with the
// inner maximization solved to tol. Guarded to (beta+1)^(K+1) <= 1e4 joint
// states (kConfig beyond). Exact anchors: at delta >= delta_max the
// consumption-independent shift channel gives 0 exactly; at delta = 0 with
// all price differences nonzero the unique feasible channel gives
// K * log2(beta+1) / n exactly.
IGammaResult i_gamma(const SystemConfig& cfg, const TariffSchedule& tariff,
                     double delta, double tol = 1e-6,
                     std::uint64_t seed = 0x5eed);

// i_infty upper bound + i_gamma(delta): the composed upper bound on the
// cost-constrained privacy level.
double privacy_cost_upper(const SystemConfig& cfg, const TariffSchedule& tariff,
                          double delta, double tol = 1e-6,
                          std::uint64_t seed = 0x5eed);

// Time-sharing bound:
//   ceil((n - floor(beta/alpha)) / lambda)/n
//     + max(0, 1 - delta/delta_max) * (K/n) * log2(beta+1),
// with the second term zero whenever delta >= delta_max (including
// delta_max = 0).
double single_letter_bound(const SystemConfig& cfg, const TariffSchedule& tariff,
                           double delta);

// One evaluated grid point. `gamma` is absent when the solver failed for
// that row (the closed-form columns are still valid).
struct BoundReport {
  double delta = 0.0;  // +infinity allowed (unconstrained row)
  Lambda lambda;
  double i_inf_lower = 0.0;
  double i_inf_upper = 0.0;
  std::optional<IGammaResult> gamma;
  double single_letter = 0.0;
  double delta_max = 0.0;

  // Composed upper bound; named after the CSV column it feeds.
  std::optional<double> upper_thm4() const {
    if (!gamma) return std::nullopt;
    return i_inf_upper + gamma->bits_per_step;
  }
};

// Evaluates every delta in the (sorted, nonnegative) grid. Because the
// feasible channel set only grows with delta, each row's i_gamma carries the
// running minimum forward, which makes the emitted columns monotone
// non-increasing by construction. Solver errors are recorded per-row
// (gamma = nullopt) without aborting the sweep.
std::vector<BoundReport> sweep_bounds(const SystemConfig& cfg,
                                      const TariffSchedule& tariff,
                                      const std::vector<double>& delta_grid,
                                      double tol = 1e-6,
                                      std::uint64_t seed = 0x5eed);

}  // namespace metermask

#endif  // METERMASK_BOUNDS_HPP_
