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

#ifndef METERMASK_TYPES_HPP_
#define METERMASK_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace metermask {

// All energies are integer multiples of one quantization unit (the CLI maps
// kWh onto units; the core never sees fractional energy).
using Energy = std::int64_t;

// A consumption sequence x lives in [0, alpha]^n; a request sequence y lives
// in [y_min, y_max]^n. Both are plain vectors; alphabet membership is checked
// by the model functions, not by the type.
using ConsumptionSeq = std::vector<Energy>;
using RequestSeq = std::vector<Energy>;

// Error taxonomy. The kinds map one-to-one onto CLI exit codes, so library
// failures surface with stable, documented numbers.
enum class ErrorKind {
  kConfig = 2,      // invalid configuration, schedule, or argument
  kInfeasible = 3,  // infeasibility detected (battery bounds, quantization)
  kSolver = 4,      // iterative solver failed to converge / guard exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Battery/system parameters for one metering horizon.
//
//   n      horizon length in steps
//   beta   battery capacity (state space is [0, beta])
//   alpha  per-step consumption cap (consumption alphabet [0, alpha])
//   s0     default initial battery state
//   y_min  most negative request allowed per step (y_min <= 0; negative
//          requests sell energy back to the grid)
//   y_max  largest request allowed per step (y_max >= alpha)
struct SystemConfig {
  int n = 0;
  Energy beta = 0;
  Energy alpha = 1;
  Energy s0 = 0;
  Energy y_min = 0;
  Energy y_max = 1;
};

// An input pair couples an initial battery state with a consumption sequence.
// Two input pairs can share a feasible request sequence exactly when their
// potential profiles (s0 minus running consumption) stay within beta of each
// other; see codes.hpp.
struct InputPair {
  Energy s0 = 0;
  ConsumptionSeq x;
};

// Battery state trajectory s_0..s_n for a given (s0, x, y). States are
// reported as computed - never clamped - so callers can see how far a
// violation overshoots.
struct BatteryTrajectory {
  std::vector<Energy> states;        // n + 1 entries, states[0] == s0
  bool within_bounds = false;        // all states in [0, beta]
  std::ptrdiff_t first_outage = -1;  // first i with states[i] < 0, or -1
  std::ptrdiff_t first_waste = -1;   // first i with states[i] > beta, or -1
};

// Exact rational (beta + 1) / alpha: the number of peak-consumption steps
// needed to fully drain a full battery. Consumers take floor or ceil
// depending on whether they build covering or packing objects.
struct Lambda {
  Energy num = 1;  // beta + 1
  Energy den = 1;  // alpha

  double real() const { return static_cast<double>(num) / static_cast<double>(den); }
  Energy floor_val() const { return num / den; }
  Energy ceil_val() const { return (num + den - 1) / den; }
};

// One tariff block: a fixed price applied for `length` consecutive steps.
struct TariffBlock {
  double price = 0.0;
  int length = 0;
};

// Piecewise-constant tariff over the horizon. Block lengths must sum to n.
struct TariffSchedule {
  std::vector<TariffBlock> blocks;

  int total_length() const {
    int t = 0;
    for (const auto& b : blocks) t += b.length;
    return t;
  }
};

}  // namespace metermask

#endif  // METERMASK_TYPES_HPP_
