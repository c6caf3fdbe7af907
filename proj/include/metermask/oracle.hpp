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
// Ground-truth engines for desk-scale certification: exact mutual
// information, channel capacity by alternating maximization, exhaustive
// feasible-request enumeration, and a bracketing search for the exact
// minimal worst-case leakage on tiny instances. Everything here is meant to
// be slow, simple, and checkable by hand; the production bound formulas are
// tested against these engines.

#ifndef METERMASK_ORACLE_HPP_
#define METERMASK_ORACLE_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "metermask/tariff.hpp"
#include "metermask/types.hpp"

namespace metermask {

// Distribution over outcomes 0..m-1. Probabilities must be nonnegative and
// sum to 1 within 1e-12 (validate_distribution throws kConfig otherwise).
struct FiniteDistribution {
  std::vector<double> probs;
};

void validate_distribution(const FiniteDistribution& d);

// Row-stochastic channel: rows[i][j] = P(output j | input i).
struct FiniteChannel {
  std::size_t num_outputs = 0;
  std::vector<std::vector<double>> rows;
};

void validate_channel(const FiniteChannel& ch);

// I(X;Y) in bits for input distribution px and channel ch, computed by the
// direct double sum with compensated accumulation and the 0*log0 = 0
// convention. Throws kConfig when px and ch disagree on the input count.
double exact_mi_bits(const std::vector<double>& px, const FiniteChannel& ch);

struct CapacityResult {
  double bits = 0.0;        // midpoint of the final [lower, upper] envelope
  double lower_bits = 0.0;  // mutual information achieved by px (a true lower bound)
  double upper_bits = 0.0;  // max-row divergence envelope (a true upper bound)
  std::vector<double> px;   // achieving input distribution at termination
  long iterations = 0;
  bool converged = false;
};

// Channel capacity by alternating maximization over the input distribution,
// stopping when the upper and lower envelopes agree within tol_bits.
// Throws kSolver when the iteration cap passes without convergence.
CapacityResult capacity_bits(const FiniteChannel& ch, double tol_bits = 1e-9,
                             long max_iterations = 200000);

// Same iteration, but reports the envelope reached at the cap instead of
// throwing, and skips strict input validation. Intended for optimization
// inner loops that only need a cheap estimate plus a convergence flag.
CapacityResult capacity_envelope(const FiniteChannel& ch, double tol_bits,
                                 long max_iterations);

// All feasible request sequences for (s0, x), optionally restricted to
// terminal states in [terminal->first, terminal->second]. Enumeration walks
// only realizable branches; the guard bounds |Y|^n (kConfig beyond it).
std::vector<RequestSeq> enumerate_feasible(
    const SystemConfig& cfg, Energy s0, const ConsumptionSeq& x,
    std::optional<std::pair<Energy, Energy>> terminal = std::nullopt,
    double guard = 1e7);

// A channel whose inputs are concrete consumption sequences and whose
// outputs are concrete request sequences.
struct PolicyChannel {
  std::vector<ConsumptionSeq> inputs;
  std::vector<RequestSeq> outputs;
  FiniteChannel channel;
};

struct LeakageBracket {
  double upper_bits_per_step = 0.0;  // exact capacity of the best channel found
  double lower_bits_per_step = 0.0;  // log2 of a certified packing cardinality / n
  std::size_t packing_size = 1;      // cardinality behind the lower bound
  int grid_resolution = 4;
  PolicyChannel best_channel;        // channel achieving the upper bound
};

// Brackets the exact minimal worst-case leakage (bits/step) over feasible
// policies whose per-consumption expected excess bill is at most delta
// (pass an infinite delta for the unconstrained problem; a finite delta
// requires a tariff).
//
// Upper: best capacity over feasible-support channels whose rows live on a
// probability grid of the stated resolution, improved by coordinate descent
// from several deterministic starts. Lower: a packing family of consumption
// sequences whose feasible-request sets are pairwise disjoint - re-certified
// here by exhaustive enumeration, so the reported lower bound never rests on
// the construction being correct.
//
// When px_family is non-empty the worst case is taken over that explicit
// family of consumption distributions instead of all distributions.
//
// Guarded to tiny instances: n <= 3, beta <= 2, alpha <= 1 (kConfig beyond).
LeakageBracket exact_min_worstcase_leakage(
    const SystemConfig& cfg, const std::optional<TariffSchedule>& tariff,
    double delta, int grid_resolution = 4, std::uint64_t seed = 0x5eed,
    const std::vector<std::vector<double>>& px_family = {});

}  // namespace metermask

#endif  // METERMASK_ORACLE_HPP_
