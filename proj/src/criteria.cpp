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

#include "gfsim/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "gfsim/error.hpp"
#include "gfsim/numerics.hpp"

namespace gfsim {

namespace {

constexpr std::size_t kWindowSamples = 65;
constexpr std::size_t kMaxWindows = 48;
constexpr double kLimitTolerance = 1e-10;

double window_sup(const GrowthRate& g, double lo, double hi) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : log_space(lo, hi, kWindowSamples)) m = std::max(m, g.relative_rate(x));
  return m;
}

std::optional<double> aitken(double a, double b, double c) {
  double d2 = c - 2.0 * b + a;
  if (d2 == 0.0 || !std::isfinite(d2)) return std::nullopt;
  double est = c - (c - b) * (c - b) / d2;
  if (!std::isfinite(est)) return std::nullopt;
  return est;
}

// Walk windows [l, 2l] with l = start * factor^k.
BoundaryLimit walk_windows(const GrowthRate& g, double start, double factor) {
  BoundaryLimit out;
  std::optional<double> prev_extrap;
  for (std::size_t k = 0; k < kMaxWindows; ++k) {
    double lo = start * std::pow(factor, static_cast<double>(k));
    double m = window_sup(g, lo, 2.0 * lo);
    if (!std::isfinite(m)) break;
    out.window_sups.push_back(m);
    out.estimate = m;
    std::size_t n = out.window_sups.size();
    if (n < 2) continue;
    double scale = std::max(1.0, std::abs(m));
    if (std::abs(m - out.window_sups[n - 2]) <= kLimitTolerance * scale) {
      out.converged = true;
      break;
    }
    if (n < 3) continue;
    auto ext = aitken(out.window_sups[n - 3], out.window_sups[n - 2], m);
    if (ext && prev_extrap && std::abs(*ext - *prev_extrap) <= kLimitTolerance * scale) {
      out.estimate = *ext;
      out.converged = true;
      break;
    }
    prev_extrap = ext;
  }
  if (!out.window_sups.empty()) {
    double first = out.window_sups.front();
    double last = out.window_sups.back();
    double scale = std::max(1.0, std::abs(first)) * 1e-12;
    out.trend = last > first + scale ? "increasing" : (last < first - scale ? "decreasing" : "flat");
  }
  return out;
}

double sup_relative_on_domain(const ModelSpec& spec, double* inf_out) {
  const auto& d = spec.domain();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : log_space(d.x_min, d.x_max, kValidationGridSize)) {
    double v = spec.growth().relative_rate(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (inf_out) *inf_out = lo;
  return hi;
}

// int_0^1 g(u) du with u = s^m, at `panels` panels.
double substituted(const std::function<double(double)>& g, double m, std::size_t panels) {
  return integrate_panels(
      [&](double s) {
        if (s <= 0.0) return 0.0;
        double u = std::pow(s, m);
        if (u <= 0.0) return 0.0;
        return g(u) * m * std::pow(s, m - 1.0);
      },
      0.0, 1.0, panels);
}

// Integrals over geometric shells near 0 stop shrinking when the integral diverges.
bool diverges_at_zero(const std::function<double(double)>& g) {
  auto shell = [&](double hi, double lo) {
    return integrate([&](double v) { double u = std::exp(v); return g(u) * u; }, std::log(lo), std::log(hi));
  };
  double d1 = std::abs(shell(1e-4, 1e-8));
  double d2 = std::abs(shell(1e-8, 1e-12));
  if (!std::isfinite(d1) || !std::isfinite(d2)) return true;
  return d1 > 0.0 && d2 >= 0.9 * d1;
}

std::optional<double> power_theta(const ModelSpec& spec) {
  if (auto* p = dynamic_cast<const PowerDensity*>(spec.kernel().fragment_density())) return p->theta();
  return std::nullopt;
}

struct TailSpec {
  double power;  // r or -q
  double lo, hi;
};

FosterTail foster_tail(const ModelSpec& spec, const TailSpec& ts, const FosterConfig& cfg,
                       std::optional<double> reduction) {
  FosterTail out;
  out.reduction = reduction;
  const auto& kern = spec.kernel();
  const auto& growth = spec.growth();
  double p = ts.power;
  double m = p < 0.0 ? cfg.substitution_power : 1.0;
  bool self_similar = kern.fragment_density() != nullptr;

  auto integrand_at = [&](double x) {
    return [&kern, p, x](double u) { return (std::pow(u, p) - 1.0) * u * kern.density(x, x * u); };
  };

  if (p < 0.0) {
    bool div = false;
    if (auto theta = power_theta(spec)) {
      div = *theta + 2.0 + p <= 0.0;
    } else {
      double xr = std::sqrt(ts.lo * ts.hi);
      div = diverges_at_zero(integrand_at(xr));
    }
    if (div) {
      out.status = FosterStatus::divergent;
      return out;
    }
  }

  out.x = log_space(ts.lo, ts.hi, cfg.points);
  out.drift.resize(out.x.size());
  out.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    double x = out.x[i];
    auto g = integrand_at(x);
    double i1 = substituted(g, m, cfg.panels);
    double i2 = substituted(g, m, 2 * cfg.panels);
    double scale = std::max(std::abs(i2), 1e-300);
    out.panel_agreement = std::max(out.panel_agreement, std::abs(i2 - i1) / scale);
    double c = growth.evaluate(x);
    // drift / (c x^p) = p + x^2 I / c
    double d = p + x * x * i2 / c;
    out.drift[i] = d;
    if (d > out.worst) {
      out.worst = d;
      out.worst_x = x;
    }
    if (self_similar && reduction) {
      // x I should equal -p M K(x) (sign conventions of the two constants)
      double reduced = -std::abs(p) * *reduction * kern.total_rate(x);
      if (p < 0.0) reduced = -reduced;
      double gap = std::abs(x * i2 - reduced) / std::max(std::abs(reduced), 1e-300);
      out.reduction_agreement = std::max(out.reduction_agreement, gap);
    }
  }
  if (!std::isfinite(out.worst)) {
    out.status = FosterStatus::divergent;
    return out;
  }
  out.status = out.worst <= 1e-12 ? FosterStatus::pass : FosterStatus::fail;
  return out;
}

}  // namespace

BoundaryLimit relative_rate_limit_at_zero(const ModelSpec& spec) {
  const auto& d = spec.domain();
  BoundaryLimit out = walk_windows(spec.growth(), d.x_min, 0.5);
  if (auto r = spec.growth().data_range(); r && r->first > 2.0 * d.x_min) out.inconclusive = true;
  return out;
}

BoundaryLimit relative_rate_limit_at_infinity(const ModelSpec& spec) {
  const auto& d = spec.domain();
  BoundaryLimit out = walk_windows(spec.growth(), 0.5 * d.x_max, 2.0);
  if (auto r = spec.growth().data_range(); r && r->second < 0.5 * d.x_max) out.inconclusive = true;
  return out;
}

BoundaryCriterion check_boundary_rates(const ModelSpec& spec, double lambda_hat, double half_width,
                                       double significance) {
  BoundaryCriterion out;
  out.at_zero = relative_rate_limit_at_zero(spec);
  out.at_infinity = relative_rate_limit_at_infinity(spec);
  out.threshold = lambda_hat - significance * half_width;
  if (out.at_zero.inconclusive || out.at_infinity.inconclusive) {
    out.status = TriState::inconclusive;
  } else if (out.at_zero.estimate < out.threshold && out.at_infinity.estimate < out.threshold) {
    out.status = TriState::pass;
  } else {
    out.status = TriState::fail;
  }
  return out;
}

LimitsAtInfimum check_limits_at_infimum(const ModelSpec& spec) {
  LimitsAtInfimum out;
  out.linear = spec.growth().is_linear();
  out.at_zero = relative_rate_limit_at_zero(spec).estimate;
  out.at_infinity = relative_rate_limit_at_infinity(spec).estimate;
  double sampled_inf = 0.0;
  double sup = sup_relative_on_domain(spec, &sampled_inf);
  out.infimum = std::min({sampled_inf, out.at_zero, out.at_infinity});
  sup = std::max({sup, out.at_zero, out.at_infinity});
  double tol = 1e-6 * std::max(std::abs(sup), std::numeric_limits<double>::min());
  out.holds = std::abs(out.at_zero - out.infimum) <= tol && std::abs(out.at_infinity - out.infimum) <= tol;
  return out;
}

const char* to_string(FosterStatus s) {
  switch (s) {
    case FosterStatus::pass: return "pass";
    case FosterStatus::fail: return "fail";
    case FosterStatus::divergent: return "divergent";
  }
  return "unknown";
}

double foster_large_constant(const FragmentDensity& p, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "foster exponent r must be positive");
  double v = integrate_singular([&](double u) { return (1.0 - std::pow(u, r)) * u * p.evaluate(u); }, 0.0, 1.0);
  return v / r;
}

std::optional<double> foster_small_constant(const FragmentDensity& p, double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::invalid_argument, "foster exponent q must be positive");
  auto g = [&](double u) { return (std::pow(u, -q) - 1.0) * u * p.evaluate(u); };
  if (auto* pd = dynamic_cast<const PowerDensity*>(&p)) {
    if (pd->theta() + 2.0 - q <= 0.0) return std::nullopt;
  } else if (diverges_at_zero(g)) {
    return std::nullopt;
  }
  return integrate_singular(g, 0.0, 1.0) / q;
}

FosterResult check_foster(const ModelSpec& spec, double r, double q, double x_inf, double x_0,
                          const FosterConfig& cfg) {
  const auto& d = spec.domain();
  if (!(r > 0.0) || !(q > 0.0)) throw Error(ErrorCode::invalid_argument, "foster exponents must be positive");
  if (!(x_inf > 0.0) || !(x_inf < d.x_max)) throw DomainError("x_inf must lie inside the working domain");
  if (!(x_0 > d.x_min) || !(x_0 <= d.x_max)) throw DomainError("x_0 must lie inside the working domain");
  if (cfg.points < 2 || cfg.panels < 1) throw ConfigError("foster check needs at least 2 points and 1 panel");

  std::optional<double> large_red, small_red;
  if (const auto* p = spec.kernel().fragment_density()) {
    large_red = foster_large_constant(*p, r);
    small_red = foster_small_constant(*p, q);
  }
  FosterResult out;
  out.large = foster_tail(spec, {r, std::max(x_inf, d.x_min), d.x_max}, cfg, large_red);
  out.small = foster_tail(spec, {-q, d.x_min, x_0}, cfg, small_red);
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::linear_inapplicable: return "linear_inapplicable";
    case Verdict::predicted_direct: return "predicted_direct";
    case Verdict::predicted_composite: return "predicted_composite";
    case Verdict::no_prediction: return "no_prediction";
  }
  return "unknown";
}

Recommendation recommend(const ModelSpec& spec, const MalthusResult& malthus, const FosterInputs& foster,
                         const FosterConfig& cfg) {
  Recommendation out;
  out.boundary = check_boundary_rates(spec, malthus.lambda_hat, malthus.half_width());
  out.limits = check_limits_at_infimum(spec);
  const auto& d = spec.domain();
  double x_inf = foster.x_inf > 0.0 ? foster.x_inf : std::sqrt(d.x_min * d.x_max);
  double x_0 = foster.x_0 > 0.0 ? foster.x_0 : std::sqrt(d.x_min * d.x_max);
  out.foster = check_foster(spec, foster.r, foster.q, x_inf, x_0, cfg);
  out.composite = !out.limits.linear && out.limits.holds && out.foster.large.status == FosterStatus::pass &&
                  out.foster.small.status == FosterStatus::pass;

  if (malthus.condition != TriState::pass || !malthus.converged) {
    out.verdict = Verdict::inconclusive;
    out.message = "Malthus exponent not established; no prediction";
  } else if (spec.growth().is_linear()) {
    out.verdict = Verdict::linear_inapplicable;
    out.message = "linear growth: lambda equals the constant relative rate and the boundary criterion cannot hold";
  } else if (out.boundary.status == TriState::inconclusive) {
    out.verdict = Verdict::inconclusive;
    out.message = "boundary limits of c/x could not be determined from the growth data";
  } else if (out.boundary.status == TriState::pass) {
    out.verdict = Verdict::predicted_direct;
    out.message = "exponential convergence predicted: both boundary limits of c/x are below lambda";
  } else if (out.composite) {
    out.verdict = Verdict::predicted_composite;
    out.message = "exponential convergence predicted: boundary limits equal inf c/x and both drift conditions hold";
  } else {
    out.verdict = Verdict::no_prediction;
    out.message = "no sufficient condition holds";
  }
  spdlog::debug("recommendation: {}", out.message);
  return out;
}

}  // namespace gfsim
