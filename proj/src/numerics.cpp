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

#include "gfsim/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gfsim/error.hpp"

namespace gfsim {

double integrate(const std::function<double(double)>& f, double a, double b,
                 QuadratureTolerance tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 25, tol.rel_tol, &err, &l1);
  if (!std::isfinite(value)) throw Error(ErrorCode::numeric_error, "quadrature produced a non-finite value");
  return value;
}

double integrate_singular(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  // Samples can land on subnormal distances from an endpoint, where an
  // integrable power singularity overflows.
  auto g = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v) && std::min(x - a, b - x) < 1e-100) return 0.0;
    return v;
  };
  const double value = rule.integrate(g, a, b, rel_tol);
  if (!std::isfinite(value)) throw Error(ErrorCode::numeric_error, "quadrature produced a non-finite value");
  return value;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels) {
  if (panels == 0) throw Error(ErrorCode::invalid_argument, "integrate_panels: zero panels");
  const double h = (b - a) / static_cast<double>(panels);
  std::vector<double> parts(panels);
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = (i + 1 == panels) ? b : lo + h;
    parts[i] = boost::math::quadrature::gauss<double, 8>::integrate(f, lo, hi);
  }
  return pairwise_sum(parts);
}

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw Error(ErrorCode::invalid_argument, "log_space needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(l0 + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "lin_space needs n >= 2");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

double newton_bracketed(const std::function<std::pair<double, double>(double)>& g,
                        double guess, double lo, double hi, double xtol) {
  // Plain safeguarded Newton: fall back to bisection whenever the step leaves
  // the bracket or fails to shrink it fast enough.
  double a = lo;
  double b = hi;
  double x = (guess > a && guess < b) ? guess : 0.5 * (a + b);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    auto [fx, dfx] = g(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) a = x; else b = x;
    double next = (dfx != 0.0 && std::isfinite(dfx)) ? x - fx / dfx : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double tol = std::max(xtol, 4.0 * eps * std::abs(next));
    if (std::abs(next - x) <= tol || (b - a) <= tol) return next;
    x = next;
  }
  return x;
}

SampleStats sample_stats(std::span<const double> v) {
  SampleStats s;
  const std::size_t n = v.size();
  if (n == 0) return s;
  s.mean = pairwise_sum(v) / static_cast<double>(n);
  if (n < 2) return s;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (v[i] - s.mean) * (v[i] - s.mean);
  s.variance = pairwise_sum(dev) / static_cast<double>(n - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(n));
  return s;
}

}  // namespace gfsim
