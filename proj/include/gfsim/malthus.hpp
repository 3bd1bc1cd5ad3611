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

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gfsim/error.hpp"
#include "gfsim/feynman_kac.hpp"

namespace gfsim {

enum class TriState { pass, fail, inconclusive };
const char* to_string(TriState s);

struct BisectionConfig {
  std::optional<double> q_lo;  // default -(q_c - 1)
  std::optional<double> q_hi;  // default q_c
  double width = 0.005;
  std::size_t n_initial = 10'000;
  std::size_t n_max = 640'000;
  double significance = 3.0;
  AdaptiveHorizon horizon;
  std::size_t scan_points = 9;
};

struct BisectionStep {
  double q;
  double mean;
  double std_error;
  std::size_t n_paths;
  double horizon;
  std::string decision;  // above, below, undecided
};

struct MalthusResult {
  double lambda_hat = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  MCEstimate L_at_lambda;
  MCEstimate L_prime_at_lambda;  // -L'(lambda_hat)
  TriState condition = TriState::inconclusive;  // L(lambda) = 1 with finite derivative
  double anchor_x = 0.0;
  bool converged = false;  // bracket reached the configured width
  double final_horizon = 0.0;
  std::size_t final_paths = 0;
  std::vector<BisectionStep> trace;

  double half_width() const { return 0.5 * (q_hi - q_lo); }
};

// Root of q -> L_{x,x}(q) = 1.
MalthusResult solve_malthus(std::shared_ptr<const ModelSpec> spec, double x, const BisectionConfig& cfg,
                            const SampleConfig& sample);

struct LadderPoint {
  double delta;
  double q;
  MCEstimate estimate;
  bool horizon_converged;
};

struct ExponentialConditionResult {
  TriState status = TriState::inconclusive;
  std::vector<LadderPoint> ladder;
};

inline const std::vector<double>& default_delta_ladder() {
  static const std::vector<double> ladder{0.2, 0.1, 0.05, 0.02};
  return ladder;
}

// Is L_{x,x}(q) finite for some q < lambda_hat?  Probes q = lambda_hat - delta.
ExponentialConditionResult check_exponential_condition(std::shared_ptr<const ModelSpec> spec, double x,
                                                       double lambda_hat, const SampleConfig& sample,
                                                       const AdaptiveHorizon& horizon = {},
                                                       const std::vector<double>& ladder = default_delta_ladder());

struct ProfileResult {
  double x0 = 0.0;
  double lambda_hat = 0.0;
  std::vector<double> y;
  std::vector<double> h;
  std::vector<double> h_se;
  std::vector<double> nu;  // density of the profile with respect to dy
  std::vector<double> nu_se;
  std::vector<bool> flagged;  // unreliable estimate of h or nu
  double cycle_derivative = 0.0;  // |L'_{x0,x0}(lambda_hat)| from the cycle sample
  double normalization = 0.0;  // trapezoidal <nu, h>

  double h_at(double x) const;
  // <nu, f> by trapezoid on a log subgrid with `refine` points per cell.
  double pair(const TestFunction& f, std::size_t refine = 16) const;
};

// h(y) = y L_{y,x0}(lambda_hat) per grid point.  nu uses the cycle formula
// from x0, which gives the same measure as dy / (h c |L'_{y,y}|) without one
// heavy-tailed derivative estimate per point.
ProfileResult compute_profile(std::shared_ptr<const ModelSpec> spec, double lambda_hat, double x0,
                              const std::vector<double>& y_grid, const SampleConfig& sample,
                              const AdaptiveHorizon& horizon = {});

struct RestrictedWindow {
  enum class Mode { lower, upper };
  Mode mode;
  double barrier;  // a (lower) or b'' (upper)
  double anchor;   // b' (lower) or a' (upper)

  // Paths from b' back to b' before jumping below a.
  static RestrictedWindow lower(double a, double b_prime) { return {Mode::lower, a, b_prime}; }
  // Paths from a' back to a' before flowing above b''.
  static RestrictedWindow upper(double a_prime, double b_second) { return {Mode::upper, b_second, a_prime}; }
};

struct RestrictedResult {
  MalthusResult solve;
  std::optional<bool> below_malthus;  // set when a reference lambda is given
};

RestrictedResult restricted_exponent(std::shared_ptr<const ModelSpec> spec, const RestrictedWindow& window,
                                     const BisectionConfig& cfg, const SampleConfig& sample,
                                     std::optional<MalthusResult> reference = std::nullopt);

struct GrowthFit {
  double rho_hat;
  double r_squared;
  std::vector<double> t;
  std::vector<MCEstimate> estimates;
};

// Slope of ln T_t f(x) against t over the upper half of t_grid; the same paths
// are used at every t.
GrowthFit fit_growth_rate(const ModelSpec& spec, double x, const TestFunction& f, const std::vector<double>& t_grid,
                          const SampleConfig& sample);

// Monte Carlo estimates of T_t f(x) at several times from one set of paths.
std::vector<MCEstimate> semigroup_trajectory(const ModelSpec& spec, double x, const TestFunction& f,
                                             const std::vector<double>& t_grid, const SampleConfig& sample);

}  // namespace gfsim
