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
// Request-alphabet reduction maps. Both maps are compositions of elementary
// purchase reallocations that provably preserve feasibility for every
// (s0, x) the input sequence was feasible for:
//   * pushing excess above alpha one step forward (or dropping it at the
//     final step) can only lower later battery states, never below the
//     states of the all-alpha-consumption worst case;
//   * pushing a sale (negative request) one step forward can only raise
//     later states, never above what the battery held before the sale.
// The consumption-matched map lands every entry in [0, alpha]; the
// cost-preserving map confines reallocation within tariff blocks so each
// block total - and therefore the bill - is unchanged exactly.

#ifndef METERMASK_REDUCE_HPP_
#define METERMASK_REDUCE_HPP_

#include "metermask/tariff.hpp"
#include "metermask/types.hpp"

namespace metermask {

struct ReducedAlphabet {
  enum class Kind { kConsumptionMatched, kCostPreserving };
  Kind kind = Kind::kConsumptionMatched;
  Energy lo = 0;
  Energy hi = 0;
};

// [0, alpha].
ReducedAlphabet consumption_matched_alphabet(const SystemConfig& cfg);

// [-ceil(beta/l_min), ceil(beta/l_min) + alpha] where l_min is the shortest
// tariff block. Taken outward to integers so it always contains [0, alpha].
ReducedAlphabet cost_preserving_alphabet(const SystemConfig& cfg,
                                         const TariffSchedule& tariff);

// Elementary excess move: for d in [0, max(0, y_i - alpha)], returns
// y + d*(e_{i+1} - e_i) for i < n-1 and y - d*e_i at the last step.
// Throws kConfig when d is outside that range.
RequestSeq reduce_step(const SystemConfig& cfg, const RequestSeq& y,
                       std::size_t i, Energy d);

// Maps y into the target alphabet while preserving feasibility for every
// (s0, x) that y was feasible for. Negative entries are reallocated forward
// first, then positive excess, sweeping to a fixpoint (at most n passes;
// one suffices for the canonical maximal moves). Throws kConfig when the
// target does not contain [0, alpha].
RequestSeq reduce_to_alphabet(const SystemConfig& cfg, const RequestSeq& y,
                              const ReducedAlphabet& target);

// Per-tariff-block reallocation into the cost-preserving alphabet: forward
// pass accumulating at the block end, then backward pass redistributing,
// repeated to a fixpoint. Block totals are preserved exactly, so
// m'output = m'y to the last bit of integer arithmetic; the output depends
// only on y. Throws kInfeasible if a block total falls outside
// [-beta, beta + l_k * alpha] (impossible for feasible y).
RequestSeq reduce_cost_preserving(const SystemConfig& cfg,
                                  const TariffSchedule& tariff,
                                  const RequestSeq& y);

}  // namespace metermask

#endif  // METERMASK_REDUCE_HPP_
