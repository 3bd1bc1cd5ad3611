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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "gfsim/config.hpp"
#include "gfsim/criteria.hpp"
#include "gfsim/malthus.hpp"
#include "gfsim/spectral_grid.hpp"

using namespace gfsim;

namespace {

constexpr std::uint64_t kSeed = 20240601;

std::shared_ptr<const ModelSpec> bundled(const std::string& name) {
  return validated(build_model(load_config_file(std::string(GFSIM_SOURCE_DIR) + "/configs/" + name + ".json")));
}

SampleConfig sample(const char* label, std::size_t n, std::uint64_t first = 0) {
  SampleConfig sc;
  sc.seed = derive_seed(kSeed, label);
  sc.n_paths = n;
  sc.first_index = first;
  return sc;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return v;
}

MCEstimate laplace_to(std::shared_ptr<const ModelSpec> spec, double x, double y, double q, const SampleConfig& sc,
                      double cap) {
  StoppingSpec stop;
  stop.hit_target = y;
  AdaptiveHorizon policy;
  policy.cap = cap;
  stop.horizon = initial_horizon(spec, x, stop, sc, policy);
  HittingSample s(spec, x, stop, sc);
  s.adapt_horizon(q, cap);
  return s.laplace(q);
}

const std::vector<std::pair<double, double>> kWindows{{0.5, 2.0}, {0.3, 4.0}, {0.1, 10.0}, {0.05, 20.0}};

struct Shared {
  std::shared_ptr<const ModelSpec> hump = bundled("hump");
  std::shared_ptr<const ModelSpec> linear = bundled("linear_calibration");
  MalthusResult m;
  std::vector<EigenResult> eig;
};

Outcome linear_calibration(Shared& s) {
  BisectionConfig b;
  b.n_initial = 100'000;
  b.horizon.cap = 1e4;
  const MalthusResult r = solve_malthus(s.linear, 1.0, b, sample("linear", b.n_initial));
  const bool pass = r.lambda_hat >= 0.47 && r.lambda_hat <= 0.53;
  return {pass, fmt::format("lambda_hat={:.4f} bracket=[{:.4f},{:.4f}] paths={}", r.lambda_hat, r.q_lo, r.q_hi,
                            r.final_paths)};
}

Outcome dual_method(Shared& s) {
  s.m = solve_malthus(s.hump, 1.0, BisectionConfig{}, sample("hump-malthus", 10'000));
  GridConfig g;
  g.n_nodes = 512;
  s.eig = eigen_sweep(build_operator(*s.hump, g), kWindows);
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& e : s.eig) sup = std::max(sup, e.rho_ab);
  const double tol = 0.05 * (1.0 + std::abs(s.m.lambda_hat));
  return {std::abs(s.m.lambda_hat - sup) <= tol,
          fmt::format("lambda_hat={:.4f} sup_rho={:.4f} tol={:.4f}", s.m.lambda_hat, sup, tol)};
}

Outcome semigroup_cross(Shared& s) {
  GridConfig g;
  g.n_nodes = 2048;
  const GridOperator op = build_operator(*s.hump, g);
  const auto f = TestFunction::tent(1.0, 2.0);
  const std::vector<double> ts{1.0, 2.0, 5.0};
  const auto grid = step_semigroup(op, f, ts);
  bool pass = true;
  double worst = 0.0;  // |MC - grid| / tolerance
  std::size_t block = 0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double sup = 0.0;
    for (double v : grid[j]) sup = std::max(sup, std::abs(v));
    for (double x : {0.5, 1.0, 2.0}) {
      const auto e = estimate_semigroup(*s.hump, x, ts[j], f, sample("semigroup", 100'000, 100'000 * block++));
      const double tol = 3.0 * e.std_error + 0.02 * sup;
      const double gap = std::abs(e.mean - grid_value(op, grid[j], x));
      pass &= gap <= tol;
      worst = std::max(worst, gap / tol);
    }
  }
  return {pass, fmt::format("worst gap/tolerance={:.3f} over 9 points", worst)};
}

Outcome stabilization(Shared& s) {
  const auto f = TestFunction::tent(1.0, 2.0);
  const double lam = s.m.lambda_hat;
  const auto traj = semigroup_trajectory(*s.hump, 1.0, f, {8.0, 12.0}, sample("stabilization", 100'000));
  const double v8 = std::exp(-lam * 8.0) * traj[0].mean;
  const double v12 = std::exp(-lam * 12.0) * traj[1].mean;
  AdaptiveHorizon h;
  h.cap = 200.0;
  const ProfileResult p = compute_profile(s.hump, lam, 1.0, log_space(0.2, 5.0, 33), sample("profile", 10'000), h);
  const double target = p.h_at(1.0) * p.pair(f);
  const double rel_t = std::abs(v8 - v12) / std::abs(v12);
  const double rel_p = std::abs(v12 - target) / std::abs(target);
  return {rel_t <= 0.10 && rel_p <= 0.15,
          fmt::format("t8={:.4f} t12={:.4f} (rel {:.3f}) h<nu,f>={:.4f} (rel {:.3f})", v8, v12, rel_t, target, rel_p)};
}

Outcome hitting_identity(Shared& s) {
  GridConfig fine_g, coarse_g;
  fine_g.n_nodes = 1024;
  coarse_g.n_nodes = 512;
  const auto fine = killed_principal_eigenpair(build_operator(*s.hump, fine_g), 0.3, 4.0);
  const auto coarse = killed_principal_eigenpair(build_operator(*s.hump, coarse_g), 0.3, 4.0);
  AdaptiveHorizon h;
  h.cap = 200.0;
  const auto a = check_killed_hitting_identity(s.hump, fine, coarse, 1.0, 2.0, sample("identity-12", 100'000), h);
  const auto b = check_killed_hitting_identity(s.hump, fine, coarse, 2.0, 1.0, sample("identity-21", 100'000), h);
  return {a.pass && b.pass, fmt::format("(1,2) mc={:.4f}+-{:.4f} grid={:.4f}; (2,1) mc={:.4f}+-{:.4f} grid={:.4f}",
                                        a.estimate.mean, a.estimate.std_error, a.grid_ratio, b.estimate.mean,
                                        b.estimate.std_error, b.grid_ratio)};
}

Outcome inequalities(Shared& s) {
  const double lam = s.m.lambda_hat;
  const double q = lam + 0.1;
  AdaptiveHorizon h;
  h.cap = 200.0;
  const EllTable ell = build_ell_table(s.hump, 1.0, q, log_space(0.15, 20.0, 17), sample("ell", 4000), h);
  bool super = true;
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t block = 0, outside = 0;
  for (double t : {2.0, 5.0, 10.0}) {
    const auto e = tilted_expectation(*s.hump, 1.0, t, std::nullopt, q, ell, sample("super", 10'000, 10'000 * block++));
    super &= e.estimate.mean <= 1.0 + 3.0 * e.estimate.std_error;
    worst = std::max(worst, e.estimate.mean);
    outside += e.extrapolated;
  }
  bool nested = true;
  for (std::size_t i = 1; i < s.eig.size(); ++i) nested &= s.eig[i].rho_ab > s.eig[i - 1].rho_ab;

  const auto lxy = laplace_to(s.hump, 1.0, 2.0, lam, sample("product-12", 100'000), 1e3);
  const auto lyx = laplace_to(s.hump, 2.0, 1.0, lam, sample("product-21", 100'000), 1e3);
  const double prod = lxy.mean * lyx.mean;
  const double se = std::hypot(lxy.std_error * lyx.mean, lyx.std_error * lxy.mean);
  const bool product = prod <= 1.0 + 3.0 * se;
  return {super && nested && product,
          fmt::format("supermartingale max={:.4f} {} ({} end points outside the table); nesting {}; "
                      "L12*L21={:.4f}+-{:.4f} {}",
                      worst, super ? "ok" : "violated", outside, nested ? "ok" : "violated", prod, se,
                      product ? "ok" : "violated")};
}

Outcome exactness(Shared& s) {
  StoppingSpec stop;
  stop.horizon = 10.0;
  double tele = 0.0;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const Path p = simulate_path(*s.hump, 1.0, stop, RngStream(derive_seed(kSeed, "telescoping"), i));
    tele = std::max(tele, std::abs(p.log_weight - p.telescoping_log_weight()));
  }
  ModelSpec copy = *s.hump;
  const ValidationReport rep = validate_model(copy);
  const double conservation = rep.find("mass_conservation")->residual;
  GridConfig g;
  g.n_nodes = 512;
  const double ident = build_operator(*s.hump, g).identity_residual();
  double roundtrip = 0.0;
  for (double x : log_space(0.05, 20.0, 25))
    for (double y : log_space(0.05, 20.0, 25)) {
      if (y <= x) continue;
      const double back = flow_map(*s.hump, x, travel_time(*s.hump, x, y)).position;
      roundtrip = std::max(roundtrip, std::abs(back - y) / y);
    }
  const bool pass = tele < 1e-9 && conservation < 1e-9 && ident < 1e-6 && roundtrip < 1e-10;
  return {pass, fmt::format("telescoping={:.2e} conservation={:.2e} identity={:.2e} roundtrip={:.2e}", tele,
                            conservation, ident, roundtrip)};
}

Outcome restricted(Shared& s) {
  const auto lower = restricted_exponent(s.hump, RestrictedWindow::lower(0.3, 1.0), BisectionConfig{},
                                         sample("restricted-lower", 10'000), s.m);
  const auto upper = restricted_exponent(s.hump, RestrictedWindow::upper(1.0, 3.0), BisectionConfig{},
                                         sample("restricted-upper", 10'000), s.m);
  return {*lower.below_malthus && *upper.below_malthus,
          fmt::format("lambda_a={:.4f} (q_hi {:.4f}) lambda^b={:.4f} (q_hi {:.4f}) vs q_lo={:.4f}",
                      lower.solve.lambda_hat, lower.solve.q_hi, upper.solve.lambda_hat, upper.solve.q_hi, s.m.q_lo)};
}

Outcome criteria(Shared& s) {
  const auto hump = check_boundary_rates(*s.hump, s.m.lambda_hat, s.m.half_width());
  const auto lin = check_boundary_rates(*s.linear, 0.5, 0.0025);
  const auto f = check_foster(*s.hump, 1.0, 0.5, 3.0, 0.1);
  const double agree = std::max(f.large.reduction_agreement, f.small.reduction_agreement);
  const bool reduced = f.large.reduction && f.small.reduction && agree <= 1e-8;
  return {hump.status == TriState::pass && lin.status == TriState::fail && reduced,
          fmt::format("hump {} (limits {:.3g}, {:.3g}); linear {}; Foster reduction agreement {:.2e}",
                      to_string(hump.status), hump.at_zero.estimate, hump.at_infinity.estimate,
                      to_string(lin.status), agree)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  Shared shared;
  const std::vector<std::pair<const char*, std::function<Outcome(Shared&)>>> suite{
      {"linear calibration", linear_calibration},
      {"dual-method Malthus agreement", dual_method},
      {"semigroup cross-validation", semigroup_cross},
      {"Malthusian stabilization", stabilization},
      {"killed hitting identity", hitting_identity},
      {"inequality suite", inequalities},
      {"exactness invariants", exactness},
      {"restricted exponents", restricted},
      {"criteria module", criteria},
  };
  int failed = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = suite[i].second(shared);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, suite[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
