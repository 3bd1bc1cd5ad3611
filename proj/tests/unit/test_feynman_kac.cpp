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
#include "gfsim/feynman_kac.hpp"
#include "gfsim/malthus.hpp"
#include "gfsim/numerics.hpp"
#include "models.hpp"

using namespace gfsim;

namespace {

SampleConfig config(std::size_t n, std::uint64_t seed) {
  SampleConfig c;
  c.n_paths = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("feynman_kac") {
  TEST_CASE("zero time returns the test function exactly") {
    auto hump = gfsim::testing::hump_model();
    const auto f = TestFunction::tent(1.0, 2.0);
    const auto e = estimate_semigroup(*hump, 1.3, 0.0, f, config(100, 1));
    CHECK(e.mean == f(1.3));
    CHECK(e.std_error == 0.0);
  }

  TEST_CASE("linear growth moves mass deterministically") {
    auto lin = gfsim::testing::linear_model(0.5, {1e-4, 1e4});
    const auto e = estimate_semigroup(*lin, 1.5, 2.0, TestFunction::identity(), config(2000, 2));
    CHECK(e.mean == doctest::Approx(1.5 * std::exp(1.0)).epsilon(1e-12));
    CHECK(e.std_error < 1e-12 * e.mean);
  }

  TEST_CASE("test functions") {
    const auto tent = TestFunction::tent(1.0, 3.0);
    CHECK(tent(2.0) == 1.0);
    CHECK(tent(1.5) == doctest::Approx(0.5));
    CHECK(tent(0.5) == 0.0);
    CHECK(TestFunction::indicator(1.0, 2.0)(1.5) == 1.0);
    CHECK(TestFunction::indicator(1.0, 2.0)(2.5) == 0.0);
    CHECK(tent.reciprocal()(2.0) == 0.5);
    CHECK(tent.support()->second == 3.0);
    CHECK_FALSE(TestFunction::identity().support());
  }

  TEST_CASE("pure growth Laplace transform is exact") {
    auto none = gfsim::testing::pure_growth_model();
    StoppingSpec stop;
    stop.horizon = 100.0;
    const double s = std::log(3.0);
    const auto L = estimate_laplace(none, 1.0, 3.0, 0.7, stop, config(500, 3));
    CHECK(L.mean == doctest::Approx(std::exp(-0.7 * s) * 3.0).epsilon(1e-13));
    CHECK(L.std_error < 1e-12);
    const auto D = estimate_laplace_derivative(none, 1.0, 3.0, 0.7, stop, config(500, 3));
    CHECK(D.mean == doctest::Approx(s * std::exp(-0.7 * s) * 3.0).epsilon(1e-13));
  }

  TEST_CASE("path-wise monotonicity and convexity in q") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.hit_target = 1.0;
    stop.horizon = 200.0;
    HittingSample hs(hump, 1.0, stop, config(5000, 4));
    const auto a = hs.per_path_laplace(0.2);
    const auto b = hs.per_path_laplace(0.4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] >= b[i]);
    const auto l1 = hs.laplace(0.2), l2 = hs.laplace(0.5), lm = hs.laplace(0.35);
    CHECK(lm.mean <= 0.5 * (l1.mean + l2.mean) + 3.0 * lm.std_error);
  }

  TEST_CASE("derivative is nonnegative and matches finite differences") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.hit_target = 2.0;
    stop.horizon = 200.0;
    HittingSample hs(hump, 1.0, stop, config(20000, 5));
    const double q = 0.4, h = 1e-3;
    const auto d = hs.laplace_derivative(q);
    CHECK(d.mean >= 0.0);
    const double fd = (hs.laplace(q).mean - hs.laplace(q + h).mean) / h;
    CHECK(std::abs(fd - d.mean) <= 3.0 * d.std_error);
  }

  TEST_CASE("recurrent linear model returns with probability approaching one") {
    auto lin = gfsim::testing::linear_model(0.5);
    StoppingSpec stop;
    stop.hit_target = 1.0;
    stop.horizon = 10.0;
    HittingSample hs(lin, 1.0, stop, config(4000, 6));
    const double at10 = hs.laplace(0.5).mean;
    hs.extend_horizon(1000.0);
    const double at1000 = hs.laplace(0.5).mean;
    hs.extend_horizon(10000.0);
    const double at10000 = hs.laplace(0.5).mean;
    CHECK(at10 < at1000);
    CHECK(at1000 <= at10000);
    // P(H > T) decays like T^(-1/2); at T = 1e4 the deficit is of order 1e-2.
    CHECK(at10000 > 0.95);
    CHECK(at10000 <= 1.0 + 1e-12);
  }

  TEST_CASE("exploding weights are flagged unreliable") {
    auto lin = gfsim::testing::linear_model(0.5);
    StoppingSpec stop;
    stop.hit_target = 1.0;
    stop.horizon = 2000.0;
    HittingSample hs(lin, 1.0, stop, config(2000, 7));
    const auto e = hs.laplace(-0.3);
    CHECK_FALSE(e.reliable);
    CHECK(hs.laplace(0.9).reliable);
  }

  TEST_CASE("censoring is reported") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec stop;
    stop.hit_target = 1.0;
    stop.horizon = 0.5;
    HittingSample hs(hump, 1.0, stop, config(1000, 8));
    const auto e = hs.laplace(0.3);
    CHECK(e.censored_fraction > 0.0);
    CHECK(e.truncated_fraction > 0.0);
    CHECK(e.censored_fraction <= 1.0);
  }

  TEST_CASE("extending a sample matches sampling the longer horizon directly") {
    auto hump = gfsim::testing::hump_model();
    StoppingSpec s1, s2;
    s1.hit_target = s2.hit_target = 1.0;
    s1.horizon = 5.0;
    s2.horizon = 40.0;
    HittingSample a(hump, 1.0, s1, config(500, 9));
    a.extend_horizon(40.0);
    a.extend_paths(800);
    HittingSample b(hump, 1.0, s2, config(800, 9));
    CHECK(a.laplace(0.3).mean == doctest::Approx(b.laplace(0.3).mean).epsilon(1e-9));
    CHECK(a.laplace_derivative(0.3).mean == doctest::Approx(b.laplace_derivative(0.3).mean).epsilon(1e-9));
  }

  TEST_CASE("results do not depend on the worker count") {
    auto hump = gfsim::testing::hump_model();
    auto c1 = config(3000, 10), c4 = config(3000, 10);
    c1.workers = 1;
    c4.workers = 4;
    const auto f = TestFunction::tent(1.0, 2.0);
    const auto a = estimate_semigroup(*hump, 1.0, 3.0, f, c1);
    const auto b = estimate_semigroup(*hump, 1.0, 3.0, f, c4);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }

  TEST_CASE("tilted expectation is the rescaled semigroup") {
    auto hump = gfsim::testing::hump_model();
    const auto y = log_space(0.1, 10.0, 9);
    const double q = 0.5;
    AdaptiveHorizon policy;
    policy.cap = 200.0;
    const EllTable ell = build_ell_table(hump, 1.0, q, y, config(1000, 11), policy);
    const auto f = TestFunction::tent(1.0, 2.0);
    const double t = 2.0;
    const auto cfg = config(5000, 12);
    const auto tilted = tilted_expectation(*hump, 1.3, t, f, q, ell, cfg);
    const auto semi = estimate_semigroup(*hump, 1.3, t, f, cfg);
    const double expected = std::exp(-q * t) * semi.mean / (1.3 * ell(1.3));
    CHECK(std::abs(tilted.estimate.mean - expected) <= 1e-12 * std::abs(expected));
  }

  TEST_CASE("tilted survival functional stabilizes at the Malthus exponent") {
    auto hump = gfsim::testing::hump_model();
    SampleConfig sc = config(10000, 13);
    const auto m = solve_malthus(hump, 1.0, BisectionConfig{}, sc);
    REQUIRE(m.condition == TriState::pass);
    const auto y = log_space(0.3, 20.0, 13);
    AdaptiveHorizon policy;
    policy.cap = 200.0;
    const EllTable ell = build_ell_table(hump, 1.0, m.lambda_hat, y, config(4000, 14), policy);
    for (double t : {5.0, 10.0, 20.0}) {
      const auto e = tilted_expectation(*hump, 1.0, t, std::nullopt, m.lambda_hat, ell, config(10000, 15));
      CAPTURE(t);
      CHECK(e.estimate.mean >= 0.9);
      CHECK(e.estimate.mean <= 1.1);
    }
  }

  TEST_CASE("unit exceptions") {
    auto hump = gfsim::testing::hump_model();
    CHECK_THROWS_AS(estimate_semigroup(*hump, 1.0, -1.0, TestFunction::identity(), config(10, 0)), Error);
    const EllTable ell(hump, {0.5, 2.0}, {1.0, 1.0}, 0.5, 1.0);
    CHECK_THROWS_AS(tilted_expectation(*hump, 1.0, -1.0, std::nullopt, 0.5, ell, config(10, 0)), Error);
    CHECK_THROWS_AS(EllTable(hump, {0.5, 2.0}, {1.0, 0.0}, 0.5, 1.0), Error);
  }
}
