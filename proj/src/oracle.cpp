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

#include "metermask/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "metermask/codes.hpp"
#include "metermask/model.hpp"

namespace metermask {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Compensated accumulator; entropy sums can run to 1e7 terms.
struct KahanAcc {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Blahut-Arimoto inner loop without the convergence throw; capacity_bits
// wraps it, optimization loops call it directly with loose tolerances.
struct BaOutcome {
  double lower_nats = 0.0;
  double upper_nats = 0.0;
  std::vector<double> px;
  long iterations = 0;
  bool converged = false;
};

BaOutcome ba_run(const FiniteChannel& ch, double tol_nats, long max_iter) {
  const std::size_t m = ch.rows.size();
  const std::size_t o = ch.num_outputs;
  BaOutcome out;
  out.px.assign(m, 1.0 / static_cast<double>(m));
  std::vector<double> q(o, 0.0);
  std::vector<double> d(m, 0.0);
  for (long it = 0; it < max_iter; ++it) {
    ++out.iterations;
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t y = 0; y < o; ++y) q[y] += out.px[i] * ch.rows[i][y];
    }
    double il = 0.0;
    double iu = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      double di = 0.0;
      for (std::size_t y = 0; y < o; ++y) {
        const double w = ch.rows[i][y];
        if (w > 0.0) di += w * std::log(w / q[y]);
      }
      d[i] = di;
      il += out.px[i] * di;
      iu = std::max(iu, di);
    }
    out.lower_nats = il;
    out.upper_nats = iu;
    if (iu - il <= tol_nats) {
      out.converged = true;
      break;
    }
    // Multiplicative update, stabilized against underflow.
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      out.px[i] *= std::exp(d[i] - iu);
      out.px[i] = std::max(out.px[i], 1e-300);
      z += out.px[i];
    }
    for (std::size_t i = 0; i < m; ++i) out.px[i] /= z;
  }
  return out;
}

}  // namespace

void validate_distribution(const FiniteDistribution& dist) {
  double total = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0)) {
      throw Error(ErrorKind::kConfig, "distribution has a negative probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kConfig, "distribution sums to " + std::to_string(total));
  }
}

void validate_channel(const FiniteChannel& ch) {
  if (ch.rows.empty()) {
    throw Error(ErrorKind::kConfig, "channel has no rows");
  }
  for (const auto& row : ch.rows) {
    if (row.size() != ch.num_outputs) {
      throw Error(ErrorKind::kConfig, "channel row width != num_outputs");
    }
    validate_distribution(FiniteDistribution{row});
  }
}

double exact_mi_bits(const std::vector<double>& px, const FiniteChannel& ch) {
  if (px.size() != ch.rows.size()) {
    throw Error(ErrorKind::kConfig,
                "input distribution and channel input counts differ");
  }
  validate_channel(ch);
  validate_distribution(FiniteDistribution{px});

  std::vector<double> q(ch.num_outputs, 0.0);
  for (std::size_t i = 0; i < px.size(); ++i) {
    for (std::size_t y = 0; y < ch.num_outputs; ++y) {
      q[y] += px[i] * ch.rows[i][y];
    }
  }
  KahanAcc acc;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (px[i] <= 0.0) continue;  // 0 * log 0 = 0
    for (std::size_t y = 0; y < ch.num_outputs; ++y) {
      const double w = ch.rows[i][y];
      if (w <= 0.0) continue;
      acc.add(px[i] * w * std::log2(w / q[y]));
    }
  }
  // MI is nonnegative; tiny negative values are pure rounding.
  return std::max(0.0, acc.value());
}

namespace {

CapacityResult pack_ba(const BaOutcome& ba) {
  CapacityResult r;
  r.lower_bits = std::max(0.0, ba.lower_nats / kLn2);
  r.upper_bits = std::max(0.0, ba.upper_nats / kLn2);
  r.bits = 0.5 * (r.lower_bits + r.upper_bits);
  r.px = ba.px;
  r.iterations = ba.iterations;
  r.converged = ba.converged;
  return r;
}

}  // namespace

CapacityResult capacity_bits(const FiniteChannel& ch, double tol_bits,
                             long max_iterations) {
  validate_channel(ch);
  const BaOutcome ba = ba_run(ch, tol_bits * kLn2, max_iterations);
  if (!ba.converged) {
    throw Error(ErrorKind::kSolver,
                "capacity iteration did not reach tolerance within " +
                    std::to_string(max_iterations) + " iterations");
  }
  return pack_ba(ba);
}

CapacityResult capacity_envelope(const FiniteChannel& ch, double tol_bits,
                                 long max_iterations) {
  return pack_ba(ba_run(ch, tol_bits * kLn2, max_iterations));
}

std::vector<RequestSeq> enumerate_feasible(
    const SystemConfig& cfg, Energy s0, const ConsumptionSeq& x,
    std::optional<std::pair<Energy, Energy>> terminal, double guard) {
  validate_config(cfg);
  if (static_cast<int>(x.size()) != cfg.n) {
    throw Error(ErrorKind::kConfig, "consumption length != n");
  }
  if (s0 < 0 || s0 > cfg.beta) {
    throw Error(ErrorKind::kConfig, "s0 outside [0, beta]");
  }
  double count = 1.0;
  for (int i = 0; i < cfg.n; ++i) {
    count *= static_cast<double>(cfg.y_max - cfg.y_min + 1);
    if (count > guard) {
      throw Error(ErrorKind::kConfig, "request alphabet too large to enumerate");
    }
  }

  std::vector<RequestSeq> out;
  RequestSeq cur(x.size(), 0);
  // Depth-first walk over realizable branches only: at state s the request
  // must land the next state in [0, beta], which pins y to an interval.
  auto walk = [&](auto&& self, std::size_t i, Energy s) -> void {
    if (i == x.size()) {
      out.push_back(cur);
      return;
    }
    Energy lo = std::max(cfg.y_min, x[i] - s);
    Energy hi = std::min(cfg.y_max, x[i] - s + cfg.beta);
    if (terminal && i + 1 == x.size()) {
      lo = std::max(lo, x[i] - s + terminal->first);
      hi = std::min(hi, x[i] - s + terminal->second);
    }
    for (Energy y = lo; y <= hi; ++y) {
      cur[i] = y;
      self(self, i + 1, s + y - x[i]);
    }
  };
  walk(walk, 0, s0);
  return out;
}

// ----- exact minimal worst-case leakage (tiny instances) -------------------

namespace {

// Enumerate all compositions of `r` into `parts` nonnegative integers;
// calls sink(vector of length parts).
template <typename Sink>
void for_each_composition(int r, int parts, Sink&& sink) {
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int idx, int left) -> void {
    if (idx == parts - 1) {
      c[static_cast<std::size_t>(idx)] = left;
      sink(c);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(idx)] = v;
      self(self, idx + 1, left - v);
    }
  };
  if (parts > 0) rec(rec, 0, r);
}

struct Candidates {
  // Affordable grid rows per input, as dense vectors over the full output
  // index space.
  std::vector<std::vector<std::vector<double>>> rows;
};

double objective_bits(const FiniteChannel& ch,
                      const std::vector<std::vector<double>>& px_family,
                      double tol_bits, long cap, bool* converged) {
  if (!px_family.empty()) {
    double worst = 0.0;
    for (const auto& px : px_family) {
      worst = std::max(worst, exact_mi_bits(px, ch));
    }
    if (converged) *converged = true;
    return worst;
  }
  const BaOutcome ba = ba_run(ch, tol_bits * kLn2, cap);
  if (converged) *converged = ba.converged;
  return 0.5 * (ba.lower_nats + ba.upper_nats) / kLn2;
}

}  // namespace

LeakageBracket exact_min_worstcase_leakage(
    const SystemConfig& cfg, const std::optional<TariffSchedule>& tariff,
    double delta, int grid_resolution, std::uint64_t seed,
    const std::vector<std::vector<double>>& px_family) {
  validate_config(cfg);
  if (cfg.n > 3 || cfg.beta > 2 || cfg.alpha > 1) {
    throw Error(ErrorKind::kConfig,
                "exact leakage oracle is limited to n <= 3, beta <= 2, alpha <= 1");
  }
  if (grid_resolution < 1) {
    throw Error(ErrorKind::kConfig, "grid resolution must be >= 1");
  }
  const bool finite = std::isfinite(delta);
  if (finite && !tariff) {
    throw Error(ErrorKind::kConfig, "finite budget requires a tariff");
  }
  if (finite && delta < 0) {
    throw Error(ErrorKind::kConfig, "budget must be nonnegative");
  }

  const Energy s0 = cfg.s0;
  const std::vector<ConsumptionSeq> inputs = enumerate_consumption(cfg);

  // Feasible sets, output index space, and per-pair excess costs.
  std::map<RequestSeq, std::size_t> out_index;
  std::vector<RequestSeq> outputs;
  std::vector<std::vector<std::size_t>> fez(inputs.size());   // output ids per input
  std::vector<std::vector<double>> gcost(inputs.size());      // excess bill per (x, y)
  std::vector<RequestSeq> cheapest(inputs.size());            // y*(x) or lexicographic min
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::vector<RequestSeq> fs = enumerate_feasible(cfg, s0, inputs[i]);
    if (fs.empty()) {
      throw Error(ErrorKind::kInfeasible, "a consumption sequence has no feasible request");
    }
    BillResult opt;
    if (tariff) opt = optimal_bill(cfg, *tariff, s0, inputs[i]);
    for (const RequestSeq& y : fs) {
      auto [it, fresh] = out_index.try_emplace(y, outputs.size());
      if (fresh) outputs.push_back(y);
      fez[i].push_back(it->second);
      if (tariff) {
        gcost[i].push_back(policy_cost_g(cfg, *tariff, s0, inputs[i], y).g);
      } else {
        gcost[i].push_back(0.0);
      }
    }
    cheapest[i] = tariff ? opt.y : fs.front();
  }
  const std::size_t num_out = outputs.size();

  // Affordable grid rows per input (dense over the output space). The
  // bill-optimal point mass is always present, so no row set is empty.
  Candidates cand;
  cand.rows.resize(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t k = fez[i].size();
    for_each_composition(grid_resolution, static_cast<int>(k), [&](const std::vector<int>& c) {
      double cost = 0.0;
      std::vector<double> dense(num_out, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        const double p = static_cast<double>(c[j]) / grid_resolution;
        dense[fez[i][j]] += p;
        cost += p * gcost[i][j];
      }
      if (!finite || cost <= delta + kCurrencyTol) {
        cand.rows[i].push_back(std::move(dense));
      }
    });
    if (cand.rows[i].empty()) {
      // Can only happen at very coarse grids with a tight budget; the
      // bill-optimal sequence itself always fits it.
      std::vector<double> dense(num_out, 0.0);
      dense[out_index.at(cheapest[i])] = 1.0;
      cand.rows[i].push_back(std::move(dense));
    }
  }

  // ----- starting channels -----
  std::vector<FiniteChannel> starts;
  auto add_deterministic_start = [&](const std::vector<RequestSeq>& pick) {
    FiniteChannel ch;
    ch.num_outputs = num_out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (finite && policy_cost_g(cfg, *tariff, s0, inputs[i], pick[i]).g >
                        delta + kCurrencyTol) {
        return;  // unaffordable somewhere: skip this start
      }
      std::vector<double> row(num_out, 0.0);
      auto it = out_index.find(pick[i]);
      if (it == out_index.end()) return;  // not a feasible output: skip
      row[it->second] = 1.0;
      ch.rows.push_back(std::move(row));
    }
    starts.push_back(std::move(ch));
  };

  // A request sequence feasible for every consumption gives zero leakage;
  // start there when one exists.
  {
    std::vector<RequestSeq> common;
    for (std::size_t j = 0; j < fez[0].size(); ++j) {
      const RequestSeq& y = outputs[fez[0][j]];
      bool everywhere = true;
      for (std::size_t i = 1; i < inputs.size() && everywhere; ++i) {
        everywhere = std::find(fez[i].begin(), fez[i].end(),
                               out_index.at(y)) != fez[i].end();
      }
      if (everywhere) {
        common.assign(inputs.size(), y);
        add_deterministic_start(common);
        break;
      }
    }
  }

  // Covering-policy start (skipped when the alphabet cannot hold the book).
  try {
    const CoveringCodebook cb = covering_codebook(cfg, s0, s0);
    std::vector<RequestSeq> pick;
    pick.reserve(inputs.size());
    for (const ConsumptionSeq& x : inputs) {
      pick.push_back(apply_covering_policy(cfg, cb, s0, x).y);
    }
    add_deterministic_start(pick);
  } catch (const Error&) {
  }

  // Bill-optimal (or lexicographically smallest) deterministic start.
  add_deterministic_start(cheapest);

  // Near-uniform rows snapped to the grid, plus two random affordable rows.
  {
    FiniteChannel ch;
    ch.num_outputs = num_out;
    bool ok = true;
    for (std::size_t i = 0; i < inputs.size() && ok; ++i) {
      const std::size_t k = fez[i].size();
      std::vector<double> dense(num_out, 0.0);
      const int base = grid_resolution / static_cast<int>(k);
      int rem = grid_resolution - base * static_cast<int>(k);
      double cost = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const int units = base + (rem > 0 ? 1 : 0);
        if (rem > 0) --rem;
        const double p = static_cast<double>(units) / grid_resolution;
        dense[fez[i][j]] += p;
        cost += p * gcost[i][j];
      }
      if (finite && cost > delta + kCurrencyTol) ok = false;
      ch.rows.push_back(std::move(dense));
    }
    if (ok) starts.push_back(std::move(ch));
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 2; ++t) {
    FiniteChannel ch;
    ch.num_outputs = num_out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, cand.rows[i].size() - 1);
      ch.rows.push_back(cand.rows[i][pick(rng)]);
    }
    starts.push_back(std::move(ch));
  }

  // ----- coordinate descent over grid rows -----
  const double cheap_tol = 1e-5;
  const long cheap_cap = 20000;
  double best_val = std::numeric_limits<double>::infinity();
  FiniteChannel best;
  for (const FiniteChannel& ch : starts) {
    const double v = objective_bits(ch, px_family, cheap_tol, cheap_cap, nullptr);
    if (v < best_val) {
      best_val = v;
      best = ch;
    }
  }
  if (!std::isfinite(best_val)) {
    throw Error(ErrorKind::kSolver, "no starting channel available");
  }
  for (int sweep = 0; sweep < 30; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      std::vector<double> keep = best.rows[i];
      std::size_t chosen = std::numeric_limits<std::size_t>::max();
      for (std::size_t c = 0; c < cand.rows[i].size(); ++c) {
        best.rows[i] = cand.rows[i][c];
        const double v =
            objective_bits(best, px_family, cheap_tol, cheap_cap, nullptr);
        if (v < best_val - 1e-7) {
          best_val = v;
          chosen = c;
          improved = true;
        }
      }
      best.rows[i] =
          (chosen == std::numeric_limits<std::size_t>::max()) ? keep : cand.rows[i][chosen];
    }
    if (!improved) break;
  }

  LeakageBracket bracket;
  bracket.grid_resolution = grid_resolution;

  // Final strict evaluation of the winner; its exact capacity (or family
  // worst case) upper-bounds the true minimum because the channel is
  // feasible and affordable by construction.
  bool conv = false;
  if (px_family.empty()) {
    const BaOutcome fin = ba_run(best, 1e-10 * kLn2, 300000);
    conv = fin.converged;
    bracket.upper_bits_per_step =
        std::max(0.0, fin.upper_nats / kLn2) / static_cast<double>(cfg.n);
  } else {
    bracket.upper_bits_per_step =
        objective_bits(best, px_family, 0, 0, &conv) / static_cast<double>(cfg.n);
  }
  if (!conv) {
    throw Error(ErrorKind::kSolver, "final capacity evaluation did not converge");
  }

  // Certified lower bound: a family of consumption sequences whose feasible
  // request sets are pairwise disjoint pins log2(family size) bits of
  // leakage under any feasible policy. Disjointness is re-proven here by
  // enumeration rather than trusted.
  const PackingSet ps = packing_set(cfg, s0, cfg.n, 0, cfg.beta);
  std::vector<std::vector<std::size_t>> member_sets;
  for (const ConsumptionSeq& w : ps.members) {
    std::vector<std::size_t> ids;
    for (const RequestSeq& y : enumerate_feasible(cfg, s0, w)) {
      auto it = out_index.find(y);
      ids.push_back(it == out_index.end() ? num_out + ids.size() : it->second);
    }
    std::sort(ids.begin(), ids.end());
    member_sets.push_back(std::move(ids));
  }
  for (std::size_t a = 0; a < member_sets.size(); ++a) {
    for (std::size_t b = a + 1; b < member_sets.size(); ++b) {
      std::vector<std::size_t> inter;
      std::set_intersection(member_sets[a].begin(), member_sets[a].end(),
                            member_sets[b].begin(), member_sets[b].end(),
                            std::back_inserter(inter));
      if (!inter.empty()) {
        throw Error(ErrorKind::kSolver,
                    "packing certification failed: members share a request");
      }
    }
  }
  bracket.packing_size = ps.members.size();
  bracket.lower_bits_per_step =
      std::log2(static_cast<double>(bracket.packing_size)) /
      static_cast<double>(cfg.n);

  bracket.best_channel.inputs = inputs;
  bracket.best_channel.outputs = outputs;
  bracket.best_channel.channel = std::move(best);
  return bracket;
}

}  // namespace metermask
