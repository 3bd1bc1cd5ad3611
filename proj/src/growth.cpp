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

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <limits>

#include "format.hpp"
#include "gfsim/error.hpp"
#include "gfsim/model.hpp"
#include "gfsim/numerics.hpp"

namespace gfsim {

using detail::num;

namespace {

// ln(y/x) without the cancellation of log(y) - log(x) when y is close to x.
double log_ratio(double x, double y) { return std::log1p((y - x) / x); }

void check_order(double x, double y) {
  if (!(x > 0.0)) throw DomainError("travel time needs x > 0");
  if (y < x) throw DomainError("travel time needs y >= x: the flow only moves upward");
}

// Solve g(d) = t for d = ln(y/x) >= 0, g increasing with g(0) = 0 and derivative
// dg/dd = 1 / relative_rate(x e^d).
double invert_log_travel(const std::function<double(double)>& g,
                         const std::function<double(double)>& rr_at, double x, double t) {
  double step = std::max(t * rr_at(x), 1e-300);
  double hi = step;
  int guard = 0;
  while (g(hi) < t) {
    hi *= 2.0;
    if (++guard > 4000 || !std::isfinite(hi)) throw Error(ErrorCode::numeric_error, "flow map: bracket expansion failed");
  }
  const double d = newton_bracketed(
      [&](double dd) { return std::pair{g(dd) - t, 1.0 / rr_at(x * std::exp(dd))}; }, step < hi ? step : 0.5 * hi,
      0.0, hi);
  return x * std::exp(d);
}

}  // namespace

double GrowthRate::travel_time(double x, double y) const {
  check_order(x, y);
  if (x == y) return 0.0;
  // Integrate in log-mass, where the integrand 1/relative_rate is smooth and bounded below.
  const double lx = std::log(x);
  return integrate([&](double u) { return 1.0 / relative_rate(std::exp(u)); }, lx, lx + log_ratio(x, y));
}

double GrowthRate::flow_map(double x, double t) const {
  if (!(x > 0.0)) throw DomainError("flow map needs x > 0");
  if (t < 0.0) throw DomainError("flow map needs t >= 0");
  if (t == 0.0) return x;
  return invert_log_travel([&](double d) { return travel_time(x, x * std::exp(d)); },
                           [&](double z) { return relative_rate(z); }, x, t);
}

// ------------------------------------------------------------------ linear

LinearGrowth::LinearGrowth(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ModelError("linear growth needs a > 0");
}

double LinearGrowth::travel_time(double x, double y) const {
  check_order(x, y);
  return log_ratio(x, y) / a_;
}

double LinearGrowth::flow_map(double x, double t) const {
  if (!(x > 0.0)) throw DomainError("flow map needs x > 0");
  if (t < 0.0) throw DomainError("flow map needs t >= 0");
  return x * std::exp(a_ * t);
}

std::string LinearGrowth::canonical() const { return "linear(a=" + num(a_) + ")"; }

// ---------------------------------------------------------- power-rational

PowerRationalGrowth::PowerRationalGrowth(double coef, double alpha, double beta, double gamma)
    : coef_(coef), alpha_(alpha), beta_(beta), gamma_(gamma) {
  if (!(coef > 0.0)) throw ModelError("power-rational growth needs coef > 0");
  if (!(beta >= 0.0)) throw ModelError("power-rational growth needs beta >= 0");
  if (!(alpha >= 1.0)) throw ModelError("power-rational growth needs alpha >= 1 (c/x bounded at 0)");
  if (beta == 0.0 && alpha != 1.0) throw ModelError("power-rational growth with beta = 0 needs alpha = 1");
  if (beta > 0.0 && !(gamma >= alpha - 1.0))
    throw ModelError("power-rational growth needs gamma >= alpha - 1 (c/x bounded at infinity)");
}

double PowerRationalGrowth::evaluate(double x) const {
  return coef_ * std::pow(x, alpha_) / (1.0 + beta_ * std::pow(x, gamma_));
}

double PowerRationalGrowth::relative_rate(double x) const {
  return coef_ * std::pow(x, alpha_ - 1.0) / (1.0 + beta_ * std::pow(x, gamma_));
}

namespace {

// int_x^y z^m dz given L = ln(y/x).
double power_integral(double x, double L, double m) {
  const double e = m + 1.0;
  if (e == 0.0) return L;
  return std::pow(x, e) * std::expm1(e * L) / e;
}

}  // namespace

double PowerRationalGrowth::travel_time(double x, double y) const {
  check_order(x, y);
  const double L = log_ratio(x, y);
  double s = power_integral(x, L, -alpha_);
  if (beta_ > 0.0) s += beta_ * power_integral(x, L, gamma_ - alpha_);
  return s / coef_;
}

double PowerRationalGrowth::flow_map(double x, double t) const {
  if (!(x > 0.0)) throw DomainError("flow map needs x > 0");
  if (t < 0.0) throw DomainError("flow map needs t >= 0");
  if (t == 0.0) return x;
  if (is_linear()) return x * std::exp(coef_ * t);
  auto g = [&](double d) {
    double s = power_integral(x, d, -alpha_);
    if (beta_ > 0.0) s += beta_ * power_integral(x, d, gamma_ - alpha_);
    return s / coef_;
  };
  return invert_log_travel(g, [&](double z) { return relative_rate(z); }, x, t);
}

std::optional<double> PowerRationalGrowth::relative_rate_limit_at_zero() const {
  return alpha_ == 1.0 ? coef_ : 0.0;
}

std::optional<double> PowerRationalGrowth::relative_rate_limit_at_infinity() const {
  if (beta_ == 0.0) return coef_;
  const double e = alpha_ - 1.0 - gamma_;
  if (e < 0.0) return 0.0;
  return coef_ / beta_;
}

std::string PowerRationalGrowth::canonical() const {
  return "power_rational(coef=" + num(coef_) + ",alpha=" + num(alpha_) + ",beta=" + num(beta_) +
         ",gamma=" + num(gamma_) + ")";
}

// --------------------------------------------------------------- tabulated

struct TabulatedGrowth::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

TabulatedGrowth::TabulatedGrowth(std::vector<double> x, std::vector<double> c) : x_(std::move(x)), c_(std::move(c)) {
  if (x_.size() != c_.size()) throw ModelError("tabulated growth: x and c differ in length");
  if (x_.size() < 4) throw ModelError("tabulated growth needs at least 4 points");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] > 0.0)) throw ModelError("tabulated growth: nodes must be positive");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw ModelError("tabulated growth: nodes must be strictly increasing");
    if (!(c_[i] > 0.0)) throw ModelError("tabulated growth: rates must be positive");
  }
  auto xs = x_;
  auto cs = c_;
  impl_ = std::make_unique<Impl>(Impl{boost::math::interpolators::pchip<std::vector<double>>(std::move(xs), std::move(cs))});
  cumulative_.assign(x_.size(), 0.0);
  for (std::size_t i = 1; i < x_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + integrate([&](double z) { return 1.0 / evaluate(z); }, x_[i - 1], x_[i]);
}

TabulatedGrowth::~TabulatedGrowth() = default;

double TabulatedGrowth::evaluate(double x) const {
  if (x <= x_.front()) return x * c_.front() / x_.front();
  if (x >= x_.back()) return x * c_.back() / x_.back();
  return impl_->spline(x);
}

double TabulatedGrowth::potential(double x) const {
  if (x <= x_.front()) return -(x_.front() / c_.front()) * std::log(x_.front() / x);
  if (x >= x_.back()) return cumulative_.back() + (x_.back() / c_.back()) * std::log(x / x_.back());
  const auto k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  return cumulative_[k] + integrate([&](double z) { return 1.0 / evaluate(z); }, x_[k], x);
}

double TabulatedGrowth::travel_time(double x, double y) const {
  check_order(x, y);
  if (x == y) return 0.0;
  const auto seg = [&](double z) {
    if (z < x_.front()) return std::ptrdiff_t{-1};
    if (z >= x_.back()) return static_cast<std::ptrdiff_t>(x_.size());
    return static_cast<std::ptrdiff_t>(std::upper_bound(x_.begin(), x_.end(), z) - x_.begin()) - 1;
  };
  if (seg(x) == seg(y)) {
    if (seg(x) < 0) return (x_.front() / c_.front()) * log_ratio(x, y);
    if (seg(x) == static_cast<std::ptrdiff_t>(x_.size())) return (x_.back() / c_.back()) * log_ratio(x, y);
    return integrate([&](double z) { return 1.0 / evaluate(z); }, x, y);
  }
  return potential(y) - potential(x);
}

double TabulatedGrowth::flow_map(double x, double t) const {
  if (!(x > 0.0)) throw DomainError("flow map needs x > 0");
  if (t < 0.0) throw DomainError("flow map needs t >= 0");
  if (t == 0.0) return x;
  return invert_log_travel([&](double d) { return travel_time(x, x * std::exp(d)); },
                           [&](double z) { return relative_rate(z); }, x, t);
}

std::optional<std::pair<double, double>> TabulatedGrowth::data_range() const {
  return std::pair{x_.front(), x_.back()};
}

std::string TabulatedGrowth::canonical() const {
  std::string s = "tabulated(";
  for (std::size_t i = 0; i < x_.size(); ++i) s += (i ? ";" : "") + num(x_[i]) + ":" + num(c_[i]);
  return s + ")";
}

}  // namespace gfsim
