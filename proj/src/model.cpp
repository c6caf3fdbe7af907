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

#include "metermask/model.hpp"

#include <string>

namespace metermask {

namespace {

Energy checked_add(Energy a, Energy b) {
  Energy out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorKind::kConfig, "energy accumulation overflow");
  }
  return out;
}

}  // namespace

void validate_config(const SystemConfig& cfg) {
  if (cfg.n < 1) {
    throw Error(ErrorKind::kConfig, "n must be >= 1 (got " + std::to_string(cfg.n) + ")");
  }
  if (cfg.beta < 0) {
    throw Error(ErrorKind::kConfig, "beta must be >= 0 (got " + std::to_string(cfg.beta) + ")");
  }
  if (cfg.alpha < 1) {
    throw Error(ErrorKind::kConfig, "alpha must be >= 1 (got " + std::to_string(cfg.alpha) + ")");
  }
  if (cfg.s0 < 0 || cfg.s0 > cfg.beta) {
    throw Error(ErrorKind::kConfig, "s0 must lie in [0, beta] (got " + std::to_string(cfg.s0) + ")");
  }
  if (cfg.y_min > 0) {
    throw Error(ErrorKind::kConfig, "y_min must be <= 0 (got " + std::to_string(cfg.y_min) + ")");
  }
  if (cfg.y_max < cfg.alpha) {
    throw Error(ErrorKind::kConfig, "y_max must be >= alpha (got " + std::to_string(cfg.y_max) + ")");
  }
}

std::vector<Energy> prefix_sums(const std::vector<Energy>& seq) {
  std::vector<Energy> out(seq.size() + 1, 0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out[i + 1] = checked_add(out[i], seq[i]);
  }
  return out;
}

BatteryTrajectory battery_trajectory(const SystemConfig& cfg, Energy s0,
                                     const ConsumptionSeq& x,
                                     const RequestSeq& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kConfig, "consumption and request lengths differ (" +
                                        std::to_string(x.size()) + " vs " +
                                        std::to_string(y.size()) + ")");
  }
  BatteryTrajectory t;
  t.states.reserve(x.size() + 1);
  t.states.push_back(s0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Energy next = checked_add(checked_add(t.states.back(), y[i]), -x[i]);
    t.states.push_back(next);
  }
  t.within_bounds = true;
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    if (t.states[i] < 0 && t.first_outage < 0) {
      t.first_outage = static_cast<std::ptrdiff_t>(i);
    }
    if (t.states[i] > cfg.beta && t.first_waste < 0) {
      t.first_waste = static_cast<std::ptrdiff_t>(i);
    }
  }
  t.within_bounds = (t.first_outage < 0 && t.first_waste < 0);
  return t;
}

bool is_feasible(const SystemConfig& cfg, Energy s0, const ConsumptionSeq& x,
                 const RequestSeq& y) {
  if (s0 < 0 || s0 > cfg.beta) return false;
  if (x.size() != y.size()) return false;
  for (Energy v : x) {
    if (v < 0 || v > cfg.alpha) return false;
  }
  for (Energy v : y) {
    if (v < cfg.y_min || v > cfg.y_max) return false;
  }
  return battery_trajectory(cfg, s0, x, y).within_bounds;
}

Lambda lambda_of(const SystemConfig& cfg) {
  if (cfg.alpha < 1) {
    throw Error(ErrorKind::kConfig, "lambda_of requires alpha >= 1");
  }
  return Lambda{cfg.beta + 1, cfg.alpha};
}

}  // namespace metermask
