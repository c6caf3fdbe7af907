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

#ifndef METERMASK_TARIFF_HPP_
#define METERMASK_TARIFF_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "metermask/types.hpp"

namespace metermask {

// Absolute comparisons between bills use this tolerance; prices are exact
// decimals in double precision and horizons are short, so 1e-9 currency is
// far below one accumulation ulp away from meaningful.
inline constexpr double kCurrencyTol = 1e-9;

// Per-step price vector m of length n. Throws kConfig when the block lengths
// do not sum to n, a block length is < 1, or a price is negative.
std::vector<double> expand_tariff(const TariffSchedule& tariff, int n);

// Step indices of the K+1 block boundaries {0, l0, l0+l1, ..., n}.
std::vector<int> boundary_times(const TariffSchedule& tariff);

// Telescoped price differences delta over the K+1 boundaries:
//   delta_0 = -m_0, delta_k = m_{k-1} - m_k, delta_K = m_{K-1}.
// They sum to zero, and the bill difference of any two request sequences
// with equal block totals vanishes: m'(y - x) = sum_k delta_k * s_{t_k}.
std::vector<double> block_deltas(const TariffSchedule& tariff);

// Result of the bill-minimization y*(x): the cheapest feasible request
// sequence and its bill. Ties is broken toward smaller requests at earlier
// steps (within kCurrencyTol), making y* deterministic.
struct BillResult {
  RequestSeq y;
  double bill = 0.0;
};

// Dynamic program over battery states [0, beta], stage cost m_i * y_i, free
// terminal state. Throws kInfeasible when no feasible request sequence
// exists (cannot happen for x in the consumption alphabet with y_min <= 0
// <= alpha <= y_max) and kConfig on malformed inputs.
BillResult optimal_bill(const SystemConfig& cfg, const TariffSchedule& tariff,
                        Energy s0, const ConsumptionSeq& x);

// Per-consumption cost report for one realized request sequence.
struct CostReport {
  double bill = 0.0;       // m'y for the given y
  double bill_opt = 0.0;   // m'y*(x)
  double g = 0.0;          // bill - bill_opt, >= 0 for feasible y
};

// g(x, y) = m'y - m'y*(x): the excess of y's bill over the cheapest
// feasible bill for x. Nonnegative whenever y itself is feasible.
CostReport policy_cost_g(const SystemConfig& cfg, const TariffSchedule& tariff,
                         Energy s0, const ConsumptionSeq& x,
                         const RequestSeq& y);

// The budget above which the cost constraint never binds:
//   delta_max = beta * (||delta||_1 - m_0).
// At delta >= delta_max a request policy with consumption-independent
// boundary shifts becomes affordable, and the cost-constrained leakage
// term vanishes.
double delta_max(const SystemConfig& cfg, const TariffSchedule& tariff);

// True iff the deterministic policy x -> policy(x) has worst-case excess
// cost g <= delta + kCurrencyTol over the supplied consumption set, or over
// the whole alphabet [0,alpha]^n when xs is empty. Exhaustive enumeration is
// guarded: throws kConfig when (alpha+1)^n exceeds 1e6 and no explicit set
// is given.
bool is_delta_affordable(
    const SystemConfig& cfg, const TariffSchedule& tariff, Energy s0,
    const std::function<RequestSeq(const ConsumptionSeq&)>& policy,
    double delta,
    const std::vector<ConsumptionSeq>& xs = {});

// Enumerates [0, alpha]^n (helper shared by the affordability check, the
// oracle, and tests). Guarded by max_count (kConfig beyond it).
std::vector<ConsumptionSeq> enumerate_consumption(const SystemConfig& cfg,
                                                  std::size_t max_count = 1000000);

}  // namespace metermask

#endif  // METERMASK_TARIFF_HPP_
