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

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "metermask/codes.hpp"
#include "metermask/model.hpp"
#include "metermask/oracle.hpp"
#include "support.hpp"

using metermask::ConsumptionSeq;
using metermask::Energy;
using metermask::ErrorKind;
using metermask::InputPair;
using metermask::RequestSeq;
using metermask::SystemConfig;
using mmtest::error_kind_of;
using mmtest::make_cfg;

TEST_SUITE("codes") {

TEST_CASE("distance compares potential profiles over every boundary") {
  // Profiles s0 - ||x^i||: (0,-1,-2) vs (2,2,2); gap grows to 4 at the end.
  CHECK(metermask::distance({0, {1, 1}}, {2, {0, 0}}) == 4);
  CHECK(metermask::distance({2, {0, 0}}, {0, {1, 1}}) == 4);
  CHECK(metermask::distance({1, {1, 0}}, {1, {1, 0}}) == 0);
  CHECK(metermask::distance({0, {}}, {2, {}}) == 2);
}

TEST_CASE("distance counts the terminal boundary") {
  // These two agree within 1 on every proper prefix but end 2 apart: only a
  // battery of capacity >= 2 can serve both with one request sequence.
  const InputPair a{0, {0, 0, 0}};
  const InputPair b{1, {1, 1, 1}};
  CHECK(metermask::distance(a, b) == 2);

  SystemConfig cfg = make_cfg(3, 1, 1);
  cfg.y_min = -1;
  CHECK_FALSE(metermask::shared_request(cfg, {a, b}).has_value());
  CHECK_FALSE(mmtest::exists_common_request_brute(cfg, {a, b}));

  SystemConfig wide = make_cfg(3, 2, 1);
  wide.y_min = -2;
  REQUIRE(metermask::shared_request(wide, {a, b}).has_value());
}

TEST_CASE("distance rejects mismatched lengths") {
  auto kind = error_kind_of(
      [] { metermask::distance({0, {1}}, {0, {1, 0}}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

TEST_CASE("max_distance takes the largest pairwise value") {
  const std::vector<InputPair> set{{0, {1, 1}}, {2, {0, 0}}, {1, {1, 0}}};
  CHECK(metermask::max_distance(set) == 4);
  CHECK(metermask::max_distance({set[2]}) == 0);
}

TEST_CASE("shared_request returns the canonical minimal request") {
  SystemConfig cfg = make_cfg(2, 4, 1);
  cfg.y_min = -4;
  const std::vector<InputPair> set{{0, {1, 1}}, {2, {0, 0}}};
  const auto y = metermask::shared_request(cfg, set);
  REQUIRE(y.has_value());
  CHECK(*y == RequestSeq{1, 1});
  for (const InputPair& p : set) {
    CHECK(metermask::is_feasible(cfg, p.s0, p.x, *y));
  }

  auto kind = error_kind_of([&] { metermask::shared_request(cfg, {}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

TEST_CASE("shared_request agrees with exhaustive search on tiny instances") {
  const std::vector<SystemConfig> cfgs = {
      make_cfg(3, 1, 1), make_cfg(4, 2, 1), make_cfg(3, 2, 2)};
  std::size_t checked = 0;
  std::size_t brute_checked = 0;
  for (SystemConfig cfg : cfgs) {
    cfg.y_min = -cfg.beta;  // wide enough for the canonical first entry
    cfg.y_max = cfg.alpha;
    const std::vector<InputPair> pairs = mmtest::all_input_pairs(cfg);

    auto check_set = [&](const std::vector<InputPair>& set) {
      const bool close = metermask::max_distance(set) <= cfg.beta;
      const auto y = metermask::shared_request(cfg, set);
      CHECK(y.has_value() == close);
      CHECK(mmtest::exists_common_request(cfg, set) == close);
      if (y) {
        for (const InputPair& p : set) {
          CHECK(metermask::is_feasible(cfg, p.s0, p.x, *y));
        }
      }
      if (++checked % 31 == 0) {
        CHECK(mmtest::exists_common_request_brute(cfg, set) == close);
        ++brute_checked;
      }
    };

    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        check_set({pairs[i], pairs[j]});
      }
    }
    // Triples on a coarser lattice keep the sweep quick; the acceptance
    // gate runs the complete enumeration.
    for (std::size_t i = 0; i < pairs.size(); i += 3) {
      for (std::size_t j = i + 1; j < pairs.size(); j += 2) {
        for (std::size_t k = j + 1; k < pairs.size(); k += 5) {
          check_set({pairs[i], pairs[j], pairs[k]});
        }
      }
    }
  }
  CHECK(checked > 1000);
  CHECK(brute_checked > 30);
}

TEST_CASE("covering codebook on the reference config") {
  const auto cb = metermask::covering_codebook(mmtest::reference_cfg(), 0, 0);
  CHECK(cb.n == 48);
  CHECK(cb.lambda == 3);
  CHECK(cb.head_len == 2);
  CHECK(cb.head == RequestSeq{1, 1});
  CHECK(cb.kappa == 16);
  CHECK(cb.log2_size() == doctest::Approx(16.0));
  CHECK(cb.block_keep == RequestSeq{0, 0, 0});
  CHECK(cb.block_refill == RequestSeq{1, 1, 1});
}

TEST_CASE("covering codebook degenerate shapes") {
  // Battery absorbs the whole horizon: no codeword blocks at all.
  auto cb = metermask::covering_codebook(make_cfg(2, 4, 1), 0, 0);
  CHECK(cb.head_len == 2);
  CHECK(cb.kappa == 0);
  CHECK(cb.log2_size() == doctest::Approx(0.0));

  // One-unit battery over three steps: one binary block after the head.
  cb = metermask::covering_codebook(make_cfg(3, 1, 1), 0, 0);
  CHECK(cb.lambda == 2);
  CHECK(cb.head_len == 1);
  CHECK(cb.kappa == 1);

  // Covering a full initial-state interval leaves no head at all.
  cb = metermask::covering_codebook(make_cfg(6, 2, 1), 0, 2);
  CHECK(cb.head_len == 0);
  CHECK(cb.kappa == 2);  // ceil(6 / 3)
}

TEST_CASE("covering codebook rejects impossible geometry") {
  // alpha > beta + 1: a keep-block cannot survive even one step.
  auto kind = error_kind_of(
      [] { metermask::covering_codebook(make_cfg(4, 1, 3), 0, 0); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  // Bad interval.
  kind = error_kind_of(
      [] { metermask::covering_codebook(make_cfg(4, 2, 1), 2, 1); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  // Head opener would have to sell energy the alphabet does not allow.
  kind = error_kind_of(
      [] { metermask::covering_codebook(make_cfg(4, 2, 1), 2, 2); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

TEST_CASE("covering policy serves every covered input feasibly") {
  const std::vector<SystemConfig> cfgs = {make_cfg(4, 2, 1), make_cfg(5, 1, 1),
                                          make_cfg(4, 3, 2), make_cfg(6, 2, 1)};
  for (const SystemConfig& cfg : cfgs) {
    for (Energy hi : {Energy{0}, cfg.beta}) {
      const auto cb = metermask::covering_codebook(cfg, 0, hi);
      std::set<RequestSeq> outputs;
      const auto xs = metermask::enumerate_consumption(cfg);
      for (Energy s0 = 0; s0 <= hi; ++s0) {
        for (const ConsumptionSeq& x : xs) {
          const auto run = metermask::apply_covering_policy(cfg, cb, s0, x);
          CHECK(metermask::is_feasible(cfg, s0, x, run.y));
          REQUIRE(static_cast<int>(run.block_choice.size()) == cb.kappa);

          // Structure: head verbatim, then keep/refill codewords
          // (the last block possibly truncated).
          for (int i = 0; i < cb.head_len; ++i) {
            CHECK(run.y[static_cast<std::size_t>(i)] ==
                  cb.head[static_cast<std::size_t>(i)]);
          }
          std::size_t t = static_cast<std::size_t>(cb.head_len);
          for (int choice : run.block_choice) {
            const RequestSeq& w = choice ? cb.block_refill : cb.block_keep;
            for (std::size_t k = 0; k < w.size() && t < run.y.size();
                 ++k, ++t) {
              CHECK(run.y[t] == w[k]);
            }
          }
          CHECK(t == run.y.size());
          outputs.insert(run.y);
        }
      }
      // The policy's whole output range fits in kappa bits.
      CHECK(static_cast<double>(outputs.size()) <=
            std::pow(2.0, cb.kappa) + 0.5);
    }
  }
}

TEST_CASE("covering policy block choices on the flat extremes") {
  const SystemConfig cfg = make_cfg(4, 2, 1);
  const auto cb = metermask::covering_codebook(cfg, 0, 0);
  REQUIRE(cb.head_len == 2);
  REQUIRE(cb.kappa == 1);

  auto run = metermask::apply_covering_policy(cfg, cb, 0, {0, 0, 0, 0});
  CHECK(run.block_choice == std::vector<int>{0});  // keep

  run = metermask::apply_covering_policy(cfg, cb, 0, {1, 1, 1, 1});
  CHECK(run.block_choice == std::vector<int>{1});  // refill
  CHECK(metermask::is_feasible(cfg, 0, {1, 1, 1, 1}, run.y));
}

TEST_CASE("covering policy validates its inputs") {
  const SystemConfig cfg = make_cfg(4, 2, 1);
  const auto cb = metermask::covering_codebook(cfg, 0, 0);

  auto kind = error_kind_of(
      [&] { metermask::apply_covering_policy(cfg, cb, 0, {0, 0, 0}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  kind = error_kind_of(
      [&] { metermask::apply_covering_policy(cfg, cb, 1, {0, 0, 0, 0}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  kind = error_kind_of(
      [&] { metermask::apply_covering_policy(cfg, cb, 0, {0, 2, 0, 0}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

TEST_CASE("packing set layout: pattern blocks first, totals tail last") {
  const SystemConfig cfg = make_cfg(6, 2, 1);
  const auto ps = metermask::packing_set(cfg, 2, 6, 0, 2);
  CHECK(ps.lambda_ceil == 3);
  CHECK(ps.kappa_hat == 1);
  REQUIRE(ps.tail_words.size() == 2);  // totals 0 and 3 over a 3-step tail
  CHECK(ps.tail_words[0] == ConsumptionSeq{0, 0, 0});
  CHECK(ps.tail_words[1] == ConsumptionSeq{1, 1, 1});
  REQUIRE(ps.size() == 4);
  const std::set<ConsumptionSeq> got(ps.members.begin(), ps.members.end());
  const std::set<ConsumptionSeq> want{{0, 0, 0, 0, 0, 0},
                                      {0, 0, 0, 1, 1, 1},
                                      {1, 1, 1, 0, 0, 0},
                                      {1, 1, 1, 1, 1, 1}};
  CHECK(got == want);
}

TEST_CASE("packing members have pairwise disjoint feasible request sets") {
  struct Shape {
    SystemConfig cfg;
    Energy s0;
    int l;
    Energy sl_lo;
    Energy sl_hi;
  };
  std::vector<Shape> shapes;
  shapes.push_back({make_cfg(6, 2, 1), 2, 6, 0, 2});
  // Narrow terminal window: the shape that separates the block-first layout
  // from a tail-first one (a leading tail difference can be cancelled by a
  // later block difference).
  shapes.push_back({make_cfg(6, 2, 1), 2, 6, 0, 1});
  shapes.push_back({make_cfg(5, 1, 1), 1, 5, 0, 1});
  shapes.push_back({make_cfg(4, 2, 2), 2, 4, 0, 2});
  shapes.push_back({make_cfg(4, 1, 1), 0, 4, 1, 1});

  for (Shape sh : shapes) {
    // Wide request alphabet so every member's feasible set is nonempty and
    // the disjointness claim is tested with the most room to fail.
    sh.cfg.y_min = -sh.cfg.beta;
    sh.cfg.y_max = sh.cfg.alpha + sh.cfg.beta;
    const auto ps =
        metermask::packing_set(sh.cfg, sh.s0, sh.l, sh.sl_lo, sh.sl_hi);
    REQUIRE(ps.size() >= 1);

    std::vector<std::set<RequestSeq>> fsets;
    for (const ConsumptionSeq& w : ps.members) {
      const auto ys = metermask::enumerate_feasible(
          sh.cfg, sh.s0, w, std::make_pair(sh.sl_lo, sh.sl_hi));
      CHECK_FALSE(ys.empty());
      fsets.emplace_back(ys.begin(), ys.end());
    }
    for (std::size_t a = 0; a < fsets.size(); ++a) {
      for (std::size_t b = a + 1; b < fsets.size(); ++b) {
        for (const RequestSeq& y : fsets[a]) {
          CHECK(fsets[b].count(y) == 0);
        }
      }
    }
  }
}

TEST_CASE("full-window packing reaches the floor(n/ceil(lambda)) rate") {
  for (int n = 2; n <= 8; ++n) {
    for (Energy beta = 1; beta <= 2; ++beta) {
      for (Energy alpha = 1; alpha <= 2; ++alpha) {
        const SystemConfig cfg = make_cfg(n, beta, alpha);
        const auto ps = metermask::packing_set(cfg, beta, n, 0, beta);
        const Energy lam = metermask::lambda_of(cfg).ceil_val();
        const double floor_rate = static_cast<double>(n / lam);
        CHECK(std::log2(static_cast<double>(ps.size())) >=
              floor_rate - 1e-12);
      }
    }
  }
}

TEST_CASE("packing_set validates its arguments") {
  const SystemConfig cfg = make_cfg(4, 2, 1);
  auto kind = error_kind_of([&] { metermask::packing_set(cfg, 0, 0, 0, 2); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  kind = error_kind_of([&] { metermask::packing_set(cfg, 3, 4, 0, 2); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  kind = error_kind_of([&] { metermask::packing_set(cfg, 0, 4, 2, 1); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);

  kind = error_kind_of([&] { metermask::packing_set(cfg, 0, 4, 0, 3); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

}  // TEST_SUITE("codes")
