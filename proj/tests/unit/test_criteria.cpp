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
#include "gfsim/criteria.hpp"
#include "models.hpp"

using namespace gfsim;

namespace {

// c(x) = x / (1 + x), so c/x = 1/(1+x) runs from 1 at 0 to 0 at infinity.
std::shared_ptr<const ModelSpec> saturating_model() {
  return validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 1.0, 1.0, 1.0),
                             gfsim::testing::uniform_kernel(), {0.01, 100.0}));
}

std::shared_ptr<const ModelSpec> self_similar(double theta) {
  return validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 2.0, 1.0, 2.0),
                             std::make_shared<SelfSimilarKernel>(std::make_shared<ConstantRate>(1.0),
                                                                 std::make_shared<PowerDensity>(theta + 2.0, theta)),
                             {0.02, 50.0}));
}

MalthusResult solved(double lambda, double half_width = 0.0025) {
  MalthusResult m;
  m.lambda_hat = lambda;
  m.q_lo = lambda - half_width;
  m.q_hi = lambda + half_width;
  m.condition = TriState::pass;
  m.converged = true;
  return m;
}

}  // namespace

TEST_SUITE("criteria") {
  TEST_CASE("boundary limits of the relative growth rate") {
    auto sat = saturating_model();
    const auto z = relative_rate_limit_at_zero(*sat);
    const auto i = relative_rate_limit_at_infinity(*sat);
    CHECK(z.estimate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(i.estimate == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(z.converged);
    CHECK(i.converged);
    CHECK_FALSE(z.inconclusive);

    auto hump = gfsim::testing::hump_model();
    CHECK(std::abs(relative_rate_limit_at_zero(*hump).estimate) < 1e-6);
    CHECK(std::abs(relative_rate_limit_at_infinity(*hump).estimate) < 1e-6);
  }

  TEST_CASE("boundary criterion against the exponent") {
    auto sat = saturating_model();
    CHECK(check_boundary_rates(*sat, 1.2, 0.01).status == TriState::pass);
    CHECK(check_boundary_rates(*sat, 0.9, 0.01).status == TriState::fail);
    // Needs to clear the limit by three half-widths.
    CHECK(check_boundary_rates(*sat, 1.02, 0.01).status == TriState::fail);

    auto lin = gfsim::testing::linear_model(0.5);
    CHECK(check_boundary_rates(*lin, 0.5, 0.0025).status == TriState::fail);

    auto hump = gfsim::testing::hump_model();
    const auto b = check_boundary_rates(*hump, 0.3145, 0.002);
    CHECK(b.status == TriState::pass);
    CHECK(b.threshold == doctest::Approx(0.3145 - 0.006));
  }

  TEST_CASE("boundary criterion is monotone in the exponent") {
    auto sat = saturating_model();
    bool passed = false;
    for (int k = 0; k <= 40; ++k) {
      const double lambda = 0.8 + 0.01 * k;
      const bool now = check_boundary_rates(*sat, lambda, 0.005).status == TriState::pass;
      if (passed) CHECK(now);
      passed = passed || now;
    }
    CHECK(passed);
  }

  TEST_CASE("tabulated growth without boundary data is inconclusive") {
    std::vector<double> x, c;
    for (double v = 0.5; v <= 5.0 + 1e-12; v += 0.25) {
      x.push_back(v);
      c.push_back(gfsim::testing::hump_growth(v));
    }
    auto tab = validated(ModelSpec(std::make_shared<TabulatedGrowth>(x, c), gfsim::testing::uniform_kernel(),
                                   {0.02, 50.0}));
    const auto b = check_boundary_rates(*tab, 0.3, 0.002);
    CHECK(b.status == TriState::inconclusive);
    CHECK(b.at_zero.inconclusive);
    CHECK(b.at_infinity.inconclusive);
  }

  TEST_CASE("limits against the infimum") {
    const auto hump = check_limits_at_infimum(*gfsim::testing::hump_model());
    CHECK(hump.holds);
    CHECK_FALSE(hump.linear);
    const auto lin = check_limits_at_infimum(*gfsim::testing::linear_model(0.5));
    CHECK(lin.holds);
    CHECK(lin.linear);
    // c/x = x/(1+x) increases from 0 to 1.
    auto up = validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 2.0, 1.0, 1.0),
                                  gfsim::testing::uniform_kernel(), {0.01, 100.0}));
    const auto mono = check_limits_at_infimum(*up);
    CHECK_FALSE(mono.holds);
    CHECK(mono.at_infinity == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("self-similar Foster constants") {
    const PowerDensity uniform(2.0, 0.0);
    CHECK(foster_large_constant(uniform, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(foster_small_constant(uniform, 0.5).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    for (double theta : {-0.5, 0.0, 1.0, 3.0}) {
      const PowerDensity p(theta + 2.0, theta);
      for (double r : {0.5, 1.0, 2.0})
        CHECK(foster_large_constant(p, r) == doctest::Approx(1.0 / (theta + 2.0 + r)).epsilon(1e-10));
      for (double q : {0.25, 0.5, 1.0})
        CHECK(foster_small_constant(p, q).value() == doctest::Approx(1.0 / (theta + 2.0 - q)).epsilon(1e-10));
    }
    // int u^(1 - q) p(u) du diverges when theta + 2 - q <= 0.
    CHECK_FALSE(foster_small_constant(PowerDensity(0.5, -1.5), 0.6));
    const BetaDensity beta(2.0, 3.0);
    CHECK(foster_large_constant(beta, 1.0) > 0.0);
  }

  TEST_CASE("Foster conditions on the hump model") {
    auto hump = gfsim::testing::hump_model();
    const auto f = check_foster(*hump, 1.0, 0.5, 3.0, 0.1);
    CHECK(f.large.status == FosterStatus::pass);
    CHECK(f.large.x.size() == 64);
    CHECK(f.large.panel_agreement <= 1e-6);
    CHECK(f.small.panel_agreement <= 1e-6);
    REQUIRE(f.large.reduction);
    REQUIRE(f.small.reduction);
    CHECK(*f.large.reduction == doctest::Approx(1.0 / 3.0));
    CHECK(f.large.reduction_agreement <= 1e-8);
    CHECK(f.small.reduction_agreement <= 1e-8);
    // Near 0 the hump grows like x^2, far too slowly for the small-mass drift.
    CHECK(f.small.status == FosterStatus::fail);
  }

  TEST_CASE("Foster conditions for other kernels") {
    auto none = gfsim::testing::pure_growth_model();
    CHECK(check_foster(*none, 1.0, 0.5, 1.0, 0.1).large.status == FosterStatus::fail);

    const auto heavy = check_foster(*self_similar(-1.5), 1.0, 0.6, 3.0, 0.1);
    CHECK(heavy.small.status == FosterStatus::divergent);
    CHECK(check_foster(*self_similar(-1.5), 1.0, 0.4, 3.0, 0.1).small.status != FosterStatus::divergent);

    auto general = validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 2.0, 1.0, 2.0),
                                       std::make_shared<GeneralKernel>(GeneralKernel::power(0.5, -1.5), "heavy"),
                                       {0.02, 50.0}));
    CHECK(check_foster(*general, 1.0, 0.6, 3.0, 0.1).small.status == FosterStatus::divergent);

    auto reg = validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 2.0, 1.0, 2.0),
                                   std::make_shared<GeneralKernel>(GeneralKernel::power(2.0, 0.0), "uniform"),
                                   {0.02, 50.0}));
    const auto g = check_foster(*reg, 1.0, 0.5, 3.0, 0.1);
    const auto s = check_foster(*gfsim::testing::hump_model(), 1.0, 0.5, 3.0, 0.1);
    CHECK(g.large.status == s.large.status);
    CHECK(g.large.worst == doctest::Approx(s.large.worst).epsilon(1e-6));
    CHECK_FALSE(g.large.reduction);
  }

  TEST_CASE("recommendations") {
    auto hump = gfsim::testing::hump_model();
    FosterInputs inputs;
    inputs.x_inf = 3.0;
    inputs.x_0 = 0.1;
    const auto direct = recommend(*hump, solved(0.3145), inputs);
    CHECK(direct.verdict == Verdict::predicted_direct);
    CHECK(direct.boundary.status == TriState::pass);

    const auto lin = recommend(*gfsim::testing::linear_model(0.5), solved(0.5), inputs);
    CHECK(lin.verdict == Verdict::linear_inapplicable);

    MalthusResult unsure = solved(0.3145);
    unsure.condition = TriState::inconclusive;
    CHECK(recommend(*hump, unsure, inputs).verdict == Verdict::inconclusive);
    MalthusResult open = solved(0.3145);
    open.converged = false;
    CHECK(recommend(*hump, open, inputs).verdict == Verdict::inconclusive);
    CHECK(std::string(to_string(Verdict::predicted_direct)).size() > 0);
  }
}
