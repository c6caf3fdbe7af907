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

#include <random>
#include <vector>

#include "doctest.h"
#include "metermask/model.hpp"
#include "support.hpp"

using metermask::ConsumptionSeq;
using metermask::Energy;
using metermask::ErrorKind;
using metermask::RequestSeq;
using metermask::SystemConfig;
using mmtest::error_kind_of;
using mmtest::make_cfg;

TEST_SUITE("model") {

TEST_CASE("validate_config accepts the reference setup") {
  CHECK_NOTHROW(metermask::validate_config(mmtest::reference_cfg()));
}

TEST_CASE("validate_config rejects each broken field with a config error") {
  const SystemConfig good = make_cfg(4, 2, 1);
  auto expect_config = [](SystemConfig cfg) {
    auto kind = error_kind_of([&] { metermask::validate_config(cfg); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::kConfig);
  };

  SystemConfig c = good;
  c.n = 0;
  expect_config(c);

  c = good;
  c.beta = -1;
  expect_config(c);

  c = good;
  c.alpha = 0;
  expect_config(c);

  c = good;
  c.s0 = 3;  // beyond beta = 2
  expect_config(c);

  c = good;
  c.s0 = -1;
  expect_config(c);

  c = good;
  c.y_min = 1;  // must be <= 0
  expect_config(c);

  c = good;
  c.y_max = 0;  // must be >= alpha
  expect_config(c);
}

TEST_CASE("prefix_sums returns n+1 running totals starting at zero") {
  const std::vector<Energy> s = metermask::prefix_sums({1, 2, 3});
  CHECK(s == std::vector<Energy>{0, 1, 3, 6});
  CHECK(metermask::prefix_sums({}) == std::vector<Energy>{0});
}

TEST_CASE("battery_trajectory tracks states and flags violations") {
  const SystemConfig cfg = make_cfg(3, 2, 1);

  // Balanced run stays inside [0, beta].
  auto t = metermask::battery_trajectory(cfg, 1, {1, 0, 1}, {1, 1, 0});
  CHECK(t.states == std::vector<Energy>{1, 1, 2, 1});
  CHECK(t.within_bounds);
  CHECK(t.first_outage == -1);
  CHECK(t.first_waste == -1);

  // Requesting nothing while consuming drains below zero: outage at the
  // first negative state, reported unclamped.
  t = metermask::battery_trajectory(cfg, 1, {1, 1, 1}, {0, 0, 0});
  CHECK(t.states == std::vector<Energy>{1, 0, -1, -2});
  CHECK_FALSE(t.within_bounds);
  CHECK(t.first_outage == 2);
  CHECK(t.first_waste == -1);

  // Requesting the cap while consuming nothing overflows: waste.
  t = metermask::battery_trajectory(cfg, 2, {0, 0, 0}, {1, 0, 0});
  CHECK(t.states == std::vector<Energy>{2, 3, 3, 3});
  CHECK_FALSE(t.within_bounds);
  CHECK(t.first_waste == 1);
  CHECK(t.first_outage == -1);
}

TEST_CASE("battery_trajectory rejects mismatched lengths") {
  const SystemConfig cfg = make_cfg(2, 1, 1);
  auto kind = error_kind_of(
      [&] { metermask::battery_trajectory(cfg, 0, {1, 0}, {1}); });
  REQUIRE(kind.has_value());
  CHECK(*kind == ErrorKind::kConfig);
}

TEST_CASE("is_feasible checks alphabets, initial state, and trajectory") {
  const SystemConfig cfg = make_cfg(2, 2, 1);
  CHECK(metermask::is_feasible(cfg, 0, {1, 1}, {1, 1}));
  CHECK(metermask::is_feasible(cfg, 2, {1, 1}, {0, 0}));

  // Consumption above alpha.
  CHECK_FALSE(metermask::is_feasible(cfg, 0, {2, 0}, {1, 1}));
  // Negative consumption.
  CHECK_FALSE(metermask::is_feasible(cfg, 0, {-1, 0}, {0, 0}));
  // Request above y_max.
  CHECK_FALSE(metermask::is_feasible(cfg, 0, {1, 1}, {2, 0}));
  // Request below y_min.
  CHECK_FALSE(metermask::is_feasible(cfg, 2, {1, 1}, {-1, 1}));
  // Initial state outside [0, beta].
  CHECK_FALSE(metermask::is_feasible(cfg, 3, {1, 1}, {1, 1}));
  // Trajectory dips below zero.
  CHECK_FALSE(metermask::is_feasible(cfg, 0, {1, 1}, {0, 1}));
  // Length mismatch.
  CHECK_FALSE(metermask::is_feasible(cfg, 0, {1}, {1, 1}));
}

TEST_CASE("wider request alphabets admit selling back") {
  SystemConfig cfg = make_cfg(2, 2, 1);
  cfg.y_min = -2;
  cfg.y_max = 3;
  // Sell one unit first, then buy it back.
  CHECK(metermask::is_feasible(cfg, 2, {0, 0}, {-1, 1}));
  CHECK(metermask::is_feasible(cfg, 0, {1, 0}, {3, -2}));
}

TEST_CASE("lambda_of carries beta+1 over alpha with exact floor and ceil") {
  auto l = metermask::lambda_of(make_cfg(4, 2, 1));
  CHECK(l.num == 3);
  CHECK(l.den == 1);
  CHECK(l.floor_val() == 3);
  CHECK(l.ceil_val() == 3);
  CHECK(l.real() == doctest::Approx(3.0));

  l = metermask::lambda_of(make_cfg(4, 2, 2));
  CHECK(l.floor_val() == 1);
  CHECK(l.ceil_val() == 2);
  CHECK(l.real() == doctest::Approx(1.5));

  l = metermask::lambda_of(make_cfg(4, 0, 2));
  CHECK(l.floor_val() == 0);
  CHECK(l.ceil_val() == 1);
}

TEST_CASE("random trajectories agree with a direct recomputation") {
  std::mt19937_64 rng(0xfeedbeef);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Energy beta = static_cast<Energy>(rng() % 3);
    const Energy alpha = 1 + static_cast<Energy>(rng() % 2);
    SystemConfig cfg = make_cfg(n, beta, alpha);
    cfg.y_min = -static_cast<Energy>(rng() % 3);
    cfg.y_max = alpha + static_cast<Energy>(rng() % 3);
    const Energy s0 = static_cast<Energy>(rng() % (beta + 1));

    ConsumptionSeq x(static_cast<std::size_t>(n));
    RequestSeq y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = static_cast<Energy>(rng() % (alpha + 1));
      const Energy span = cfg.y_max - cfg.y_min + 1;
      y[static_cast<std::size_t>(i)] =
          cfg.y_min + static_cast<Energy>(rng() % static_cast<std::uint64_t>(span));
    }

    const auto t = metermask::battery_trajectory(cfg, s0, x, y);
    REQUIRE(t.states.size() == static_cast<std::size_t>(n) + 1);
    Energy s = s0;
    bool in_bounds = (s >= 0 && s <= beta);
    CHECK(t.states[0] == s0);
    for (int i = 0; i < n; ++i) {
      s += y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
      CHECK(t.states[static_cast<std::size_t>(i) + 1] == s);
      in_bounds = in_bounds && (s >= 0 && s <= beta);
    }
    CHECK(t.within_bounds == in_bounds);
    CHECK(metermask::is_feasible(cfg, s0, x, y) == in_bounds);
  }
}

}  // TEST_SUITE("model")
