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

#ifndef METERMASK_MODEL_HPP_
#define METERMASK_MODEL_HPP_

#include <vector>

#include "metermask/types.hpp"

namespace metermask {

// Validates battery/system parameters. Throws Error(kConfig) with a message
// naming the offending field when:
//   n < 1, beta < 0, alpha < 1, s0 outside [0, beta],
//   y_min > 0, or y_max < alpha.
void validate_config(const SystemConfig& cfg);

// Exclusive prefix sums: out[i] = sum of seq[0..i-1], out[0] = 0,
// out[seq.size()] = total. Additions are overflow-checked (kConfig on
// overflow, which at sane energies means corrupted input).
std::vector<Energy> prefix_sums(const std::vector<Energy>& seq);

// Battery recursion s_{i+1} = s_i + y_i - x_i starting from s0. Does not
// check alphabet membership of x or y; it only tracks states against
// [0, beta]. Throws kConfig on length mismatch.
BatteryTrajectory battery_trajectory(const SystemConfig& cfg, Energy s0,
                                     const ConsumptionSeq& x,
                                     const RequestSeq& y);

// True iff y is a feasible request sequence for (s0, x): every entry of x in
// [0, alpha], every entry of y in [y_min, y_max], s0 in [0, beta], and the
// whole trajectory stays in [0, beta].
bool is_feasible(const SystemConfig& cfg, Energy s0, const ConsumptionSeq& x,
                 const RequestSeq& y);

// (beta + 1) / alpha as an exact rational. Requires alpha >= 1.
Lambda lambda_of(const SystemConfig& cfg);

}  // namespace metermask

#endif  // METERMASK_MODEL_HPP_
