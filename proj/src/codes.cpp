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

#include "metermask/codes.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "metermask/model.hpp"

namespace metermask {

// ----- input-pair metric -------------------------------------------------

Energy distance(const InputPair& p, const InputPair& q) {
  if (p.x.size() != q.x.size()) {
    throw Error(ErrorKind::kConfig, "input pairs have different lengths");
  }
  // Profiles s0 - ||x^i|| over every prefix boundary i = 0..n; the terminal
  // boundary matters (two pairs can agree on all proper prefixes yet demand
  // terminal purchase totals more than beta apart).
  const std::vector<Energy> pp = prefix_sums(p.x);
  const std::vector<Energy> qq = prefix_sums(q.x);
  Energy best = 0;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    best = std::max(best, std::abs((p.s0 - pp[i]) - (q.s0 - qq[i])));
  }
  return best;
}

Energy max_distance(const std::vector<InputPair>& set) {
  Energy best = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      best = std::max(best, distance(set[i], set[j]));
    }
  }
  return best;
}

// ----- shared requests ----------------------------------------------------

std::optional<RequestSeq> shared_request(const SystemConfig& cfg,
                                         const std::vector<InputPair>& set) {
  if (set.empty()) {
    throw Error(ErrorKind::kConfig, "shared_request needs a nonempty set");
  }
  const std::size_t n = set.front().x.size();
  for (const InputPair& p : set) {
    if (p.x.size() != n) {
      throw Error(ErrorKind::kConfig, "input pairs have different lengths");
    }
  }
  if (max_distance(set) > cfg.beta) return std::nullopt;

  // Canonical prefix sums ||y^j|| = -min over the set of (s0 - ||x^j||).
  // For every member the resulting battery state at boundary j is
  // (s0 - ||x^j||) - min(...) which is >= 0 by choice of the minimum and
  // <= beta because all profiles stay within one distance of each other.
  std::vector<Energy> ypfx(n + 1, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    Energy mn = set.front().s0 - prefix_sums(set.front().x)[j];
    for (const InputPair& p : set) {
      mn = std::min(mn, p.s0 - prefix_sums(p.x)[j]);
    }
    ypfx[j] = -mn;
  }
  RequestSeq y(n, 0);
  for (std::size_t j = 0; j < n; ++j) y[j] = ypfx[j + 1] - ypfx[j];
  return y;
}

// ----- covering codebook --------------------------------------------------

CoveringCodebook covering_codebook(const SystemConfig& cfg, Energy s0_lo,
                                   Energy s0_hi) {
  validate_config(cfg);
  if (s0_lo > s0_hi || s0_lo < 0 || s0_hi > cfg.beta) {
    throw Error(ErrorKind::kConfig, "initial-state interval outside [0, beta]");
  }
  const Lambda lam = lambda_of(cfg);
  if (lam.floor_val() < 1) {
    throw Error(ErrorKind::kConfig,
                "alpha > beta + 1: depletion blocks would be empty "
                "(alpha = " + std::to_string(cfg.alpha) +
                ", beta = " + std::to_string(cfg.beta) + ")");
  }
  CoveringCodebook cb;
  cb.n = cfg.n;
  cb.alpha = cfg.alpha;
  cb.beta = cfg.beta;
  cb.s0_lo = s0_lo;
  cb.s0_hi = s0_hi;
  cb.lambda = lam.floor_val();

  // Head: long enough that a battery anywhere in [s0_lo, s0_hi] charging at
  // full tilt cannot overflow, i.e. l = floor((beta + s0_lo - s0_hi)/alpha)
  // steps (truncated to the horizon). Its prefix sums are j*alpha - s0_lo:
  // the shared request of every (s0, x) prefix in the covered set.
  const Energy l_raw = (cfg.beta + s0_lo - s0_hi) / cfg.alpha;
  cb.head_len = static_cast<int>(std::min<Energy>(l_raw, cfg.n));
  cb.head.assign(static_cast<std::size_t>(cb.head_len), cfg.alpha);
  if (cb.head_len > 0) {
    cb.head[0] = cfg.alpha - s0_lo;
    if (cb.head[0] < cfg.y_min) {
      throw Error(ErrorKind::kConfig,
                  "request alphabet too narrow for the covering head: needs "
                  "y_min <= " + std::to_string(cb.head[0]));
    }
  }

  const int rest = cfg.n - cb.head_len;
  cb.kappa = static_cast<int>((rest + cb.lambda - 1) / cb.lambda);
  cb.block_keep.assign(static_cast<std::size_t>(cb.lambda), 0);
  cb.block_refill.assign(static_cast<std::size_t>(cb.lambda), cfg.alpha);
  return cb;
}

CoveringPolicyRun apply_covering_policy(const SystemConfig& cfg,
                                        const CoveringCodebook& cb, Energy s0,
                                        const ConsumptionSeq& x) {
  if (static_cast<int>(x.size()) != cb.n) {
    throw Error(ErrorKind::kConfig, "trace length != codebook horizon");
  }
  if (s0 < cb.s0_lo || s0 > cb.s0_hi) {
    throw Error(ErrorKind::kConfig, "s0 outside the codebook's covered interval");
  }
  for (Energy v : x) {
    if (v < 0 || v > cfg.alpha) {
      throw Error(ErrorKind::kConfig, "consumption entry outside [0, alpha]");
    }
  }

  CoveringPolicyRun run;
  run.y.reserve(x.size());
  Energy state = s0;
  std::size_t t = 0;
  for (; t < static_cast<std::size_t>(cb.head_len); ++t) {
    run.y.push_back(cb.head[t]);
    state += cb.head[t] - x[t];
  }
  while (t < x.size()) {
    const std::size_t len =
        std::min<std::size_t>(static_cast<std::size_t>(cb.lambda), x.size() - t);
    // One block of lookahead: will the battery survive the block untouched?
    Energy block_sum = 0;
    for (std::size_t k = 0; k < len; ++k) block_sum += x[t + k];
    const bool keep = (state - block_sum >= 0);
    const RequestSeq& w = keep ? cb.block_keep : cb.block_refill;
    run.block_choice.push_back(keep ? 0 : 1);
    for (std::size_t k = 0; k < len; ++k) {
      run.y.push_back(w[k]);
      state += w[k] - x[t + k];
    }
    t += len;
  }
  return run;
}

// ----- packing set ----------------------------------------------------------

PackingSet packing_set(const SystemConfig& cfg, Energy s0, int l, Energy sl_lo,
                       Energy sl_hi) {
  validate_config(cfg);
  if (l < 1) throw Error(ErrorKind::kConfig, "packing needs l >= 1");
  if (s0 < 0 || s0 > cfg.beta) {
    throw Error(ErrorKind::kConfig, "s0 outside [0, beta]");
  }
  if (sl_lo > sl_hi || sl_lo < 0 || sl_hi > cfg.beta) {
    throw Error(ErrorKind::kConfig,
                "terminal interval must be contiguous inside [0, beta]");
  }
  PackingSet ps;
  ps.s0 = s0;
  ps.l = l;
  ps.sl_lo = sl_lo;
  ps.sl_hi = sl_hi;
  ps.lambda_ceil = lambda_of(cfg).ceil_val();
  ps.kappa_hat = std::max(0, static_cast<int>(l / ps.lambda_ceil) - 1);
  ps.block_zero.assign(static_cast<std::size_t>(ps.lambda_ceil), 0);
  ps.block_full.assign(static_cast<std::size_t>(ps.lambda_ceil), cfg.alpha);

  const int tail_len = l - ps.kappa_hat * static_cast<int>(ps.lambda_ceil);
  const Energy window = sl_hi - sl_lo + 1;
  const Energy tail_capacity = static_cast<Energy>(tail_len) * cfg.alpha;
  const Energy N = tail_capacity / window;
  if (N < 0) {
    throw Error(ErrorKind::kConfig, "empty tail alphabet for packing set");
  }

  // Tail words: i*window units front-filled into tail_len steps. Distinct
  // totals spaced by the terminal window width force disjoint terminal
  // request totals.
  for (Energy i = 0; i <= N; ++i) {
    ConsumptionSeq w(static_cast<std::size_t>(tail_len), 0);
    Energy rest = i * window;
    for (std::size_t k = 0; k < w.size() && rest > 0; ++k) {
      w[k] = std::min(cfg.alpha, rest);
      rest -= w[k];
    }
    ps.tail_words.push_back(std::move(w));
  }

  // Members: blocks first (each all-zero or all-alpha, so the first pattern
  // difference separates prefix consumptions by ceil(lambda)*alpha >= beta+1),
  // then one tail word. Blocks-before-tail matters: with the tail in front,
  // a tail difference could cancel a later block difference and leave two
  // members sharing a request sequence.
  const std::size_t patterns = static_cast<std::size_t>(1) << ps.kappa_hat;
  for (std::size_t bits = 0; bits < patterns; ++bits) {
    for (const ConsumptionSeq& tail : ps.tail_words) {
      ConsumptionSeq member;
      member.reserve(static_cast<std::size_t>(l));
      for (int b = 0; b < ps.kappa_hat; ++b) {
        const Energy fill = ((bits >> b) & 1) ? cfg.alpha : 0;
        member.insert(member.end(), static_cast<std::size_t>(ps.lambda_ceil),
                      fill);
      }
      member.insert(member.end(), tail.begin(), tail.end());
      ps.members.push_back(std::move(member));
    }
  }
  return ps;
}

}  // namespace metermask
