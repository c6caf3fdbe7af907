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

#include "metermask/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metermask/model.hpp"

namespace metermask {

std::vector<double> expand_tariff(const TariffSchedule& tariff, int n) {
  if (tariff.blocks.empty()) {
    throw Error(ErrorKind::kConfig, "tariff needs at least one block");
  }
  std::vector<double> m;
  m.reserve(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < tariff.blocks.size(); ++k) {
    const TariffBlock& b = tariff.blocks[k];
    if (b.length < 1) {
      throw Error(ErrorKind::kConfig,
                  "tariff block " + std::to_string(k) + " has length < 1");
    }
    if (!(b.price >= 0.0) || !std::isfinite(b.price)) {
      throw Error(ErrorKind::kConfig,
                  "tariff block " + std::to_string(k) + " has invalid price");
    }
    for (int i = 0; i < b.length; ++i) m.push_back(b.price);
  }
  if (static_cast<int>(m.size()) != n) {
    throw Error(ErrorKind::kConfig,
                "tariff block lengths sum to " + std::to_string(m.size()) +
                    ", expected n = " + std::to_string(n));
  }
  return m;
}

std::vector<int> boundary_times(const TariffSchedule& tariff) {
  std::vector<int> t{0};
  for (const auto& b : tariff.blocks) t.push_back(t.back() + b.length);
  return t;
}

std::vector<double> block_deltas(const TariffSchedule& tariff) {
  if (tariff.blocks.empty()) {
    throw Error(ErrorKind::kConfig, "tariff needs at least one block");
  }
  const std::size_t K = tariff.blocks.size();
  std::vector<double> d(K + 1, 0.0);
  d[0] = -tariff.blocks[0].price;
  for (std::size_t k = 1; k < K; ++k) {
    d[k] = tariff.blocks[k - 1].price - tariff.blocks[k].price;
  }
  d[K] = tariff.blocks[K - 1].price;
  return d;
}

BillResult optimal_bill(const SystemConfig& cfg, const TariffSchedule& tariff,
                        Energy s0, const ConsumptionSeq& x) {
  validate_config(cfg);
  if (static_cast<int>(x.size()) != cfg.n) {
    throw Error(ErrorKind::kConfig, "consumption length " + std::to_string(x.size()) +
                                        " != n = " + std::to_string(cfg.n));
  }
  if (s0 < 0 || s0 > cfg.beta) {
    throw Error(ErrorKind::kConfig, "s0 outside [0, beta]");
  }
  for (Energy v : x) {
    if (v < 0 || v > cfg.alpha) {
      throw Error(ErrorKind::kConfig, "consumption entry outside [0, alpha]");
    }
  }
  const std::vector<double> m = expand_tariff(tariff, cfg.n);
  const std::size_t states = static_cast<std::size_t>(cfg.beta) + 1;
  const double inf = std::numeric_limits<double>::infinity();

  // Suffix costs: cost[i][s] = cheapest bill for steps i..n-1 from state s.
  // The terminal state is free. A forward reconstruction then picks, at each
  // step, the smallest request achieving the optimal suffix (within
  // kCurrencyTol), so ties resolve toward buying less and later.
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(cfg.n) + 1, std::vector<double>(states, inf));
  std::fill(cost.back().begin(), cost.back().end(), 0.0);
  for (int i = cfg.n - 1; i >= 0; --i) {
    for (std::size_t s = 0; s < states; ++s) {
      double best = inf;
      for (std::size_t s2 = 0; s2 < states; ++s2) {
        const Energy y = static_cast<Energy>(s2) - static_cast<Energy>(s) +
                         x[static_cast<std::size_t>(i)];
        if (y < cfg.y_min || y > cfg.y_max) continue;
        const double c = m[static_cast<std::size_t>(i)] * static_cast<double>(y) +
                         cost[static_cast<std::size_t>(i) + 1][s2];
        best = std::min(best, c);
      }
      cost[static_cast<std::size_t>(i)][s] = best;
    }
  }
  const double bill = cost[0][static_cast<std::size_t>(s0)];
  if (!std::isfinite(bill)) {
    throw Error(ErrorKind::kInfeasible, "no feasible request sequence exists");
  }

  BillResult out;
  out.bill = bill;
  out.y.reserve(static_cast<std::size_t>(cfg.n));
  std::size_t s = static_cast<std::size_t>(s0);
  for (int i = 0; i < cfg.n; ++i) {
    const double want = cost[static_cast<std::size_t>(i)][s];
    bool placed = false;
    // Smallest next state gives the smallest request at this step.
    for (std::size_t s2 = 0; s2 < states && !placed; ++s2) {
      const Energy y = static_cast<Energy>(s2) - static_cast<Energy>(s) +
                       x[static_cast<std::size_t>(i)];
      if (y < cfg.y_min || y > cfg.y_max) continue;
      const double c = m[static_cast<std::size_t>(i)] * static_cast<double>(y) +
                       cost[static_cast<std::size_t>(i) + 1][s2];
      if (std::abs(c - want) <= kCurrencyTol) {
        out.y.push_back(y);
        s = s2;
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorKind::kSolver, "bill reconstruction lost the optimal path");
    }
  }
  return out;
}

CostReport policy_cost_g(const SystemConfig& cfg, const TariffSchedule& tariff,
                         Energy s0, const ConsumptionSeq& x,
                         const RequestSeq& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kConfig, "consumption and request lengths differ");
  }
  const std::vector<double> m = expand_tariff(tariff, cfg.n);
  CostReport r;
  for (std::size_t i = 0; i < y.size(); ++i) {
    r.bill += m[i] * static_cast<double>(y[i]);
  }
  r.bill_opt = optimal_bill(cfg, tariff, s0, x).bill;
  r.g = r.bill - r.bill_opt;
  return r;
}

double delta_max(const SystemConfig& cfg, const TariffSchedule& tariff) {
  const std::vector<double> d = block_deltas(tariff);
  double l1 = 0.0;
  for (double v : d) l1 += std::abs(v);
  const double m0 = tariff.blocks.front().price;
  const double dm = static_cast<double>(cfg.beta) * (l1 - m0);
  // Guard the sign: for a flat tariff l1 = 2*m0 so dm = beta*m0 >= 0, and
  // any price change only increases l1. Clamp tiny negative rounding.
  return std::max(0.0, dm);
}

std::vector<ConsumptionSeq> enumerate_consumption(const SystemConfig& cfg,
                                                  std::size_t max_count) {
  validate_config(cfg);
  double total = 1.0;
  for (int i = 0; i < cfg.n; ++i) {
    total *= static_cast<double>(cfg.alpha + 1);
    if (total > static_cast<double>(max_count)) {
      throw Error(ErrorKind::kConfig,
                  "consumption alphabet too large for exhaustive enumeration");
    }
  }
  std::vector<ConsumptionSeq> out;
  ConsumptionSeq cur(static_cast<std::size_t>(cfg.n), 0);
  while (true) {
    out.push_back(cur);
    int i = cfg.n - 1;
    while (i >= 0) {
      if (cur[static_cast<std::size_t>(i)] < cfg.alpha) {
        ++cur[static_cast<std::size_t>(i)];
        std::fill(cur.begin() + i + 1, cur.end(), 0);
        break;
      }
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

bool is_delta_affordable(
    const SystemConfig& cfg, const TariffSchedule& tariff, Energy s0,
    const std::function<RequestSeq(const ConsumptionSeq&)>& policy,
    double delta,
    const std::vector<ConsumptionSeq>& xs) {
  std::vector<ConsumptionSeq> owned;
  if (xs.empty()) owned = enumerate_consumption(cfg);
  const std::vector<ConsumptionSeq>& use = xs.empty() ? owned : xs;
  for (const ConsumptionSeq& x : use) {
    const RequestSeq y = policy(x);
    if (policy_cost_g(cfg, tariff, s0, x, y).g > delta + kCurrencyTol) {
      return false;
    }
  }
  return true;
}

}  // namespace metermask
