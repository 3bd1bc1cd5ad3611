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

#include <optional>
#include <string>
#include <vector>

#include "gfsim/malthus.hpp"
#include "gfsim/model.hpp"

namespace gfsim {

// Estimate of lim c(x)/x at one end of (0, inf) from windows [l, 2l] walking
// away from the working domain by factors of 2.
struct BoundaryLimit {
  double estimate = 0.0;
  std::vector<double> window_sups;  // sup of c/x on each window, in order
  std::string trend;                // increasing, decreasing, flat
  bool converged = false;
  bool inconclusive = false;  // tabulated data does not reach the boundary
};

BoundaryLimit relative_rate_limit_at_zero(const ModelSpec& spec);
BoundaryLimit relative_rate_limit_at_infinity(const ModelSpec& spec);

struct BoundaryCriterion {
  BoundaryLimit at_zero;
  BoundaryLimit at_infinity;
  double threshold = 0.0;  // lambda_hat - 3 half-width
  TriState status = TriState::inconclusive;
};

// Both boundary limits of c/x strictly below the Malthus exponent.
BoundaryCriterion check_boundary_rates(const ModelSpec& spec, double lambda_hat, double half_width,
                                       double significance = 3.0);

struct LimitsAtInfimum {
  double at_zero = 0.0;
  double at_infinity = 0.0;
  double infimum = 0.0;
  bool holds = false;
  bool linear = false;
};

// Both boundary limits equal inf c/x (within 1e-6 of sup c/x).
LimitsAtInfimum check_limits_at_infimum(const ModelSpec& spec);

enum class FosterStatus { pass, fail, divergent };
const char* to_string(FosterStatus s);

struct FosterConfig {
  std::size_t points = 64;
  std::size_t panels = 64;
  double substitution_power = 4.0;  // u = s^m near 0 for the negative power
};

struct FosterTail {
  FosterStatus status = FosterStatus::fail;
  std::vector<double> x;
  std::vector<double> drift;        // drift divided by c(x) x^(+-p), sign decides
  double worst = 0.0;               // largest normalized drift
  double worst_x = 0.0;
  double panel_agreement = 0.0;     // max relative change from N to 2N panels
  std::optional<double> reduction;  // self-similar constant, when available
  double reduction_agreement = 0.0; // max relative gap general vs reduced integral
};

struct FosterResult {
  FosterTail large;  // V = x^r for x >= x_inf
  FosterTail small;  // V = x^-q for x <= x_0
};

FosterResult check_foster(const ModelSpec& spec, double r, double q, double x_inf, double x_0,
                          const FosterConfig& cfg = {});

// Self-similar constants: (1/r) int (1 - u^r) u p(u) du and (1/q) int (u^-q - 1) u p(u) du.
double foster_large_constant(const FragmentDensity& p, double r);
std::optional<double> foster_small_constant(const FragmentDensity& p, double q);

enum class Verdict { inconclusive, linear_inapplicable, predicted_direct, predicted_composite, no_prediction };
const char* to_string(Verdict v);

struct Recommendation {
  Verdict verdict = Verdict::inconclusive;
  std::string message;
  BoundaryCriterion boundary;
  LimitsAtInfimum limits;
  FosterResult foster;
  bool composite = false;
};

struct FosterInputs {
  double r = 1.0;
  double q = 0.5;
  double x_inf = 0.0;
  double x_0 = 0.0;
};

Recommendation recommend(const ModelSpec& spec, const MalthusResult& malthus, const FosterInputs& foster,
                         const FosterConfig& cfg = {});

}  // namespace gfsim
