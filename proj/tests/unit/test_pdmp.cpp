// Copyright 2026 The gfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "gfsim/error.hpp"
#include "gfsim/pdmp.hpp"
#include "models.hpp"

using namespace gfsim;

TEST_SUITE("pdmp") {
  TEST_CASE("weight equals the telescoping product of position ratios") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.horizon = 10.0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const Path p = simulate_path(*hump, 1.0, stop, RngStream(3, i));
      worst = std::max(worst, std::abs(p.log_weight - p.telescoping_log_weight()));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("jumps only go down and flow only goes up") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.horizon = 20.0;
    const Path p = simulate_path(*hump, 1.0, stop, RngStream(8, 8));
    REQUIRE_FALSE(p.events.empty());
    double prev_t = 0.0;
    double prev_x = 1.0;
    for (const auto& e : p.events) {
      CHECK(e.post < e.pre);
      CHECK(e.pre >= prev_x);
      CHECK(e.time >= prev_t);
      prev_t = e.time;
      prev_x = e.post;
    }
  }

  TEST_CASE("resuming a path reproduces the direct run") {
    auto hump = gfsim::testing::hump_model();
    for (std::uint64_t i = 0; i < 50; ++i) {
      PathSimulator a(*hump, 1.0, RngStream(4, i));
      PathSimulator b(*hump, 1.0, RngStream(4, i));
      StoppingSpec s1, s2;
      s1.horizon = 3.0;
      s2.horizon = 7.5;
      a.run(s1);
      a.run(s2);
      b.run(s2);
      // The split flow step differs from the direct one only by rounding.
      CHECK(a.position() == doctest::Approx(b.position()).epsilon(1e-10));
      CHECK(a.log_weight() == doctest::Approx(b.log_weight()).epsilon(1e-10));
      CHECK(a.events() == b.events());
      CHECK(a.time() == b.time());
    }
  }

  TEST_CASE("jump counts follow the thinned rate") {
    // K = 1 everywhere, so the number of jumps on [0, T] is Poisson(T).
    auto lin = gfsim::testing::linear_model(0.5, {1e-6, 1e6});
    StoppingSpec stop;
    stop.horizon = 4.0;
    double sum = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(simulate_path(*lin, 1.0, stop, RngStream(6, i)).events.size());
    CHECK(std::abs(sum / n - 4.0) < 5.0 * std::sqrt(4.0 / n));
  }

  TEST_CASE("pure growth hits the target at the travel time") {
    auto none = gfsim::testing::pure_growth_model();
    StoppingSpec stop;
    stop.hit_target = 3.0;
    const auto h = hitting_functional(*none, 1.0, stop, RngStream(1, 0));
    CHECK(h.hit);
    CHECK(h.hit_time == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(h.log_weight == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  }

  TEST_CASE("hitting needs positive time") {
    auto none = gfsim::testing::pure_growth_model();
    StoppingSpec stop;
    stop.hit_target = 1.0;
    stop.horizon = 5.0;
    const auto h = hitting_functional(*none, 1.0, stop, RngStream(1, 0));
    CHECK_FALSE(h.hit);
    CHECK(h.stop_reason == StopReason::horizon);
  }

  TEST_CASE("interval censoring") {
    auto none = gfsim::testing::pure_growth_model();
    StoppingSpec stop;
    stop.hit_target = 5.0;
    stop.upper_exit = 2.0;
    const auto h = hitting_functional(*none, 1.0, stop, RngStream(1, 0));
    CHECK_FALSE(h.hit);
    CHECK(h.stop_reason == StopReason::exited_interval);

    auto hump = gfsim::testing::hump_model();
    StoppingSpec low;
    low.lower_barrier = 0.9;
    low.horizon = 1e6;
    const Path p = simulate_path(*hump, 1.0, low, RngStream(2, 0));
    CHECK(p.stop_reason == StopReason::exited_interval);
    CHECK(p.final_position < 0.9);
  }

  TEST_CASE("event cap stops the path") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.horizon = 1e9;
    stop.max_events = 20;
    const Path p = simulate_path(*hump, 1.0, stop, RngStream(2, 1));
    CHECK(p.stop_reason == StopReason::max_events);
  }

  TEST_CASE("unvalidated models and bad starts are rejected") {
    ModelSpec raw(std::make_shared<LinearGrowth>(1.0), gfsim::testing::uniform_kernel(), {0.1, 10.0});
    CHECK_THROWS_AS(PathSimulator(raw, 1.0, RngStream(0, 0)), ModelError);
    auto hump = gfsim::testing::hump_model();
    CHECK_THROWS_AS(PathSimulator(*hump, -1.0, RngStream(0, 0)), DomainError);
  }
}
