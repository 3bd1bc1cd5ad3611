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
#include "gfsim/malthus.hpp"
#include "gfsim/numerics.hpp"
#include "models.hpp"

using namespace gfsim;

namespace {

SampleConfig sample(std::uint64_t seed, std::size_t n = 10'000) {
  SampleConfig c;
  c.seed = seed;
  c.n_paths = n;
  return c;
}

BisectionConfig coarse() {
  BisectionConfig b;
  b.width = 0.02;
  b.n_initial = 10'000;
  b.n_max = 160'000;
  return b;
}

bool overlap(const MalthusResult& a, const MalthusResult& b) { return a.q_lo <= b.q_hi && b.q_lo <= a.q_hi; }

}  // namespace

TEST_SUITE("malthus") {
  TEST_CASE("linear growth has exponent a") {
    auto lin = gfsim::testing::linear_model(0.5);
    BisectionConfig b = coarse();
    b.horizon.cap = 1e4;
    const auto r = solve_malthus(lin, 1.0, b, sample(1));
    CHECK(r.lambda_hat == doctest::Approx(0.5).epsilon(0.06));
    CHECK(r.q_lo <= r.lambda_hat);
    CHECK(r.lambda_hat <= r.q_hi);
    CHECK_FALSE(r.trace.empty());
  }

  TEST_CASE("exponent does not depend on the anchor") {
    auto hump = gfsim::testing::hump_model();
    const auto a = solve_malthus(hump, 1.0, coarse(), sample(2));
    const auto b = solve_malthus(hump, 2.0, coarse(), sample(3));
    CAPTURE(a.lambda_hat);
    CAPTURE(b.lambda_hat);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(overlap(a, b));
    CHECK(a.condition == TriState::pass);
  }

  TEST_CASE("transient model has no bracket") {
    auto none = gfsim::testing::pure_growth_model();
    BisectionConfig b = coarse();
    b.q_lo = -1.0;
    b.q_hi = 2.0;
    b.horizon.cap = 100.0;
    b.n_initial = 1000;
    try {
      solve_malthus(none, 1.0, b, sample(4, 1000));
      FAIL("expected a bracket failure");
    } catch (const BracketError& e) {
      CHECK(e.code() == ErrorCode::bracket_failure);
      REQUIRE(e.curve().size() == b.scan_points);
      // Paths never return, so the transform vanishes everywhere.
      for (const auto& p : e.curve()) CHECK(p.mean == 0.0);
    }
  }

  TEST_CASE("exponential condition") {
    auto hump = gfsim::testing::hump_model();
    const auto m = solve_malthus(hump, 1.0, coarse(), sample(5));
    const auto ok = check_exponential_condition(hump, 1.0, m.lambda_hat, sample(6));
    CHECK(ok.status == TriState::pass);
    REQUIRE_FALSE(ok.ladder.empty());
    CHECK(ok.ladder.front().estimate.mean > 1.0);

    // L_{1,1}(q) diverges below 0.5 for the linear model.
    auto lin = gfsim::testing::linear_model(0.5);
    AdaptiveHorizon h;
    h.cap = 2000.0;
    const auto bad = check_exponential_condition(lin, 1.0, 0.5, sample(7, 4000), h);
    CHECK(bad.status != TriState::pass);
  }

  TEST_CASE("profile tables") {
    auto hump = gfsim::testing::hump_model();
    const auto m = solve_malthus(hump, 1.0, coarse(), sample(8));
    const auto y = log_space(0.2, 5.0, 33);
    AdaptiveHorizon h;
    h.cap = 200.0;
    const auto p = compute_profile(hump, m.lambda_hat, 1.0, y, sample(9, 4000), h);
    REQUIRE(p.h.size() == y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(p.h[i] > 0.0);
      CHECK(p.nu[i] >= 0.0);
    }
    const double h0 = p.h_at(1.0);
    std::size_t k = 0;
    while (y[k] < 1.0 - 1e-12) ++k;
    CHECK(std::abs(h0 - 1.0) <= 3.0 * p.h_se[k] + 1e-3);
    CHECK(p.normalization >= 0.85);
    CHECK(p.normalization <= 1.15);
  }

  TEST_CASE("restricted exponents sit below the Malthus exponent") {
    auto hump = gfsim::testing::hump_model();
    const auto m = solve_malthus(hump, 1.0, coarse(), sample(10));
    const auto lower = restricted_exponent(hump, RestrictedWindow::lower(0.3, 1.0), coarse(), sample(11), m);
    const auto upper = restricted_exponent(hump, RestrictedWindow::upper(1.0, 3.0), coarse(), sample(12), m);
    CAPTURE(lower.solve.lambda_hat);
    CAPTURE(upper.solve.lambda_hat);
    CHECK(lower.below_malthus.value());
    CHECK(upper.below_malthus.value());

    const auto wider = restricted_exponent(hump, RestrictedWindow::lower(0.1, 1.0), coarse(), sample(13), m);
    CHECK(wider.solve.q_hi >= lower.solve.q_lo);
    const auto taller = restricted_exponent(hump, RestrictedWindow::upper(1.0, 10.0), coarse(), sample(14), m);
    CHECK(taller.solve.q_hi >= upper.solve.q_lo);
  }

  TEST_CASE("restricted exponent input checks") {
    auto hump = gfsim::testing::hump_model();
    CHECK_THROWS_AS(restricted_exponent(hump, RestrictedWindow::lower(1.0, 1.0), coarse(), sample(15)), Error);
    CHECK_THROWS_AS(restricted_exponent(hump, RestrictedWindow::upper(2.0, 1.0), coarse(), sample(15)), Error);
    // Returning requires a jump into [0.999, 1) before any other jump.
    BisectionConfig b = coarse();
    b.n_initial = 2000;
    b.n_max = 2000;
    b.horizon.cap = 50.0;
    CHECK_THROWS_AS(restricted_exponent(hump, RestrictedWindow::lower(0.999, 1.0), b, sample(16, 2000)), BracketError);
  }

  TEST_CASE("growth fit") {
    auto lin = gfsim::testing::linear_model(0.5, {1e-4, 1e4});
    const auto t = lin_space(0.0, 4.0, 9);
    const auto exact = fit_growth_rate(*lin, 1.0, TestFunction::identity(), t, sample(17, 200));
    CHECK(exact.rho_hat == doctest::Approx(0.5).epsilon(1e-10));

    auto hump = gfsim::testing::hump_model();
    const auto m = solve_malthus(hump, 1.0, coarse(), sample(18));
    const auto fit = fit_growth_rate(*hump, 1.0, TestFunction::tent(0.5, 2.0), lin_space(0.0, 12.0, 13),
                                     sample(19, 20'000));
    CAPTURE(fit.rho_hat);
    CHECK(std::abs(fit.rho_hat - m.lambda_hat) <= 0.05);

    // From x = 1 nothing reaches [40, 45] before t = 2.
    CHECK_THROWS_AS(fit_growth_rate(*hump, 1.0, TestFunction::indicator(40.0, 45.0), lin_space(0.0, 2.0, 5),
                                    sample(20, 100)),
                    Error);
    CHECK_THROWS_AS(fit_growth_rate(*hump, 1.0, TestFunction::identity(), {0.0, 1.0, 2.0}, sample(20, 10)), Error);
  }
}
