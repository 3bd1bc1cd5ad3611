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

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "format.hpp"
#include "gfsim/error.hpp"
#include "gfsim/model.hpp"
#include "gfsim/numerics.hpp"

namespace gfsim {

using detail::num;

ConstantRate::ConstantRate(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw ModelError("constant total rate must be finite and >= 0");
}

std::string ConstantRate::canonical() const { return "constant(" + num(value_) + ")"; }

HillRate::HillRate(double k_max, double x_half, double exponent) : k_max_(k_max), x_half_(x_half), m_(exponent) {
  if (!(k_max >= 0.0) || !(x_half > 0.0) || !(exponent > 0.0))
    throw ModelError("hill total rate needs k_max >= 0, x_half > 0, exponent > 0");
}

double HillRate::evaluate(double x) const {
  const double r = std::pow(x / x_half_, m_);
  return std::isinf(r) ? k_max_ : k_max_ * r / (1.0 + r);
}

std::string HillRate::canonical() const {
  return "hill(k_max=" + num(k_max_) + ",x_half=" + num(x_half_) + ",exponent=" + num(m_) + ")";
}

PowerDensity::PowerDensity(double coef, double theta) : coef_(coef), theta_(theta) {
  if (!(theta > -2.0)) throw ModelError("power fragment density needs theta > -2");
  if (!(coef >= 0.0)) throw ModelError("power fragment density needs coef >= 0");
}

double PowerDensity::evaluate(double u) const {
  if (!(u > 0.0) || !(u < 1.0)) return 0.0;
  return coef_ * std::pow(u, theta_);
}

double PowerDensity::sample_size_biased(double uniform) const {
  return std::pow(uniform, 1.0 / (theta_ + 2.0));
}

std::string PowerDensity::canonical() const { return "power(coef=" + num(coef_) + ",theta=" + num(theta_) + ")"; }

BetaDensity::BetaDensity(double a, double b, std::optional<double> coef) : a_(a), b_(b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ModelError("beta fragment density needs a > 0 and b > 0");
  coef_ = coef ? *coef : 1.0 / boost::math::beta(a + 1.0, b);
  if (!(coef_ >= 0.0)) throw ModelError("beta fragment density needs coef >= 0");
}

double BetaDensity::evaluate(double u) const {
  if (!(u > 0.0) || !(u < 1.0)) return 0.0;
  return coef_ * std::pow(u, a_ - 1.0) * std::pow(1.0 - u, b_ - 1.0);
}

double BetaDensity::sample_size_biased(double uniform) const {
  return boost::math::ibeta_inv(a_ + 1.0, b_, uniform);
}

std::string BetaDensity::canonical() const {
  return "beta(a=" + num(a_) + ",b=" + num(b_) + ",coef=" + num(coef_) + ")";
}

// ------------------------------------------------------------------ kernels

double FragmentationKernel::target_density(double x, double y) const {
  const double k = total_rate(x);
  return k > 0.0 ? mass_weighted(x, y) / k : 0.0;
}

double FragmentationKernel::conserved_rate(double x) const {
  // y = x u: int_0^x (y/x) k(x,y) dy = x int_0^1 u k(x, x u) du
  return x * integrate_singular([&](double u) { return u * density(x, x * u); }, 0.0, 1.0);
}

SelfSimilarKernel::SelfSimilarKernel(std::shared_ptr<const TotalRate> rate, std::shared_ptr<const FragmentDensity> p)
    : rate_(std::move(rate)), p_(std::move(p)) {
  if (!rate_ || !p_) throw ModelError("self-similar kernel needs a total rate and a fragment density");
}

double SelfSimilarKernel::density(double x, double y) const {
  if (!(y > 0.0) || !(y < x)) return 0.0;
  return rate_->evaluate(x) / x * p_->evaluate(y / x);
}

double SelfSimilarKernel::sample_target(double x, double uniform) const {
  return x * p_->sample_size_biased(uniform);
}

double SelfSimilarKernel::conserved_rate(double x) const {
  const double moment = integrate_singular([&](double u) { return u * p_->evaluate(u); }, 0.0, 1.0);
  return rate_->evaluate(x) * moment;
}

std::string SelfSimilarKernel::canonical() const {
  return "self_similar(total_rate=" + rate_->canonical() + ",fragment_density=" + p_->canonical() + ")";
}

GeneralKernel::GeneralKernel(Density k, std::string description, std::shared_ptr<const TotalRate> supplied)
    : k_(std::move(k)), description_(std::move(description)), supplied_(std::move(supplied)) {
  if (!k_) throw ModelError("general kernel needs a density");
}

double GeneralKernel::total_rate(double x) const {
  return supplied_ ? supplied_->evaluate(x) : conserved_rate(x);
}

double GeneralKernel::sample_target(double x, double uniform) const {
  const double mass = conserved_rate(x);
  if (!(mass > 0.0)) throw DomainError("general kernel has no fragmentation mass at this x");
  auto cdf = [&](double u) {
    return x * integrate_singular([&](double s) { return s * k_(x, x * s); }, 0.0, u) / mass - uniform;
  };
  boost::uintmax_t iters = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(cdf, 0.0, 1.0, -uniform, 1.0 - uniform,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
  return x * 0.5 * (lo + hi);
}

std::string GeneralKernel::canonical() const {
  return "general(density=" + description_ + ",total_rate=" + (supplied_ ? supplied_->canonical() : "derived") + ")";
}

GeneralKernel::Density GeneralKernel::power(double coef, double theta) {
  return [coef, theta](double x, double y) {
    if (!(y > 0.0) || !(y < x)) return 0.0;
    return coef * std::pow(y, theta) / std::pow(x, theta + 1.0);
  };
}

}  // namespace gfsim
