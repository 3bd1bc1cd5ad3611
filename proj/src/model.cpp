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

#include "gfsim/model.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <spdlog/spdlog.h>

#include "format.hpp"
#include "gfsim/error.hpp"
#include "gfsim/numerics.hpp"

namespace gfsim {

using detail::num;

bool ValidationReport::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed || c.advisory; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ModelSpec::ModelSpec(std::shared_ptr<const GrowthRate> growth, std::shared_ptr<const FragmentationKernel> kernel,
                     Domain domain)
    : growth_(std::move(growth)), kernel_(std::move(kernel)), domain_(domain) {
  if (!growth_ || !kernel_) throw ModelError("model needs a growth rate and a fragmentation kernel");
  if (!(domain_.x_min > 0.0) || !(domain_.x_max > domain_.x_min) || !std::isfinite(domain_.x_max))
    throw ModelError("working domain needs 0 < x_min < x_max < inf");
}

double ModelSpec::thinning_bound() const {
  if (!validated_) throw ModelError("model has not been validated");
  return thinning_bound_;
}

double ModelSpec::sup_relative_rate() const {
  if (!validated_) throw ModelError("model has not been validated");
  return sup_relative_rate_;
}

std::string ModelSpec::canonical() const {
  return "growth=" + growth_->canonical() + ";kernel=" + kernel_->canonical() + ";domain=[" + num(domain_.x_min) +
         "," + num(domain_.x_max) + "]";
}

std::uint64_t ModelSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

ValidationCheck make_check(std::string name, bool passed, double residual, std::string detail, bool advisory = false) {
  return ValidationCheck{std::move(name), passed, advisory, residual, std::move(detail)};
}

// Refine the grid maximum of g with Brent's method on the neighbouring log cells.
double refine_max(const std::function<double(double)>& g, const std::vector<double>& xs, std::size_t imax) {
  const std::size_t lo = imax == 0 ? 0 : imax - 1;
  const std::size_t hi = std::min(imax + 1, xs.size() - 1);
  if (lo == hi) return g(xs[imax]);
  auto neg = [&](double u) { return -g(std::exp(u)); };
  auto r = boost::math::tools::brent_find_minima(neg, std::log(xs[lo]), std::log(xs[hi]), 52);
  return std::max(-r.second, g(xs[imax]));
}

}  // namespace

ValidationReport validate_model(ModelSpec& spec) {
  ValidationReport report;
  const auto& dom = spec.domain();
  const auto xs = log_space(dom.x_min, dom.x_max, kValidationGridSize);
  const auto& g = spec.growth();
  const auto& k = spec.kernel();

  // Growth: positive and finite rate, bounded relative rate.
  {
    double lowest = std::numeric_limits<double>::infinity();
    std::string where;
    for (double x : xs) {
      const double c = g.evaluate(x);
      if (!(c > 0.0) || !std::isfinite(c)) {
        lowest = c;
        where = num(x);
        break;
      }
      lowest = std::min(lowest, c);
    }
    const bool ok = where.empty();
    report.checks.push_back(
        make_check("growth_positive", ok, lowest, ok ? "min c over the grid" : "non-positive or non-finite rate at x=" + where));
  }
  double sup_rr = 0.0;
  {
    std::size_t imax = 0;
    bool finite = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = g.relative_rate(xs[i]);
      if (!std::isfinite(r)) finite = false;
      if (r > sup_rr) {
        sup_rr = r;
        imax = i;
      }
    }
    if (finite) sup_rr = refine_max([&](double x) { return g.relative_rate(x); }, xs, imax);
    report.checks.push_back(make_check("relative_rate_bounded", finite, sup_rr, "sup c(x)/x over the working domain"));
  }

  // Kernel: nonnegative density, finite nonnegative total rate.
  double sup_k = 0.0;
  {
    bool ok = true;
    double worst = 0.0;
    for (double x : xs) {
      const double kk = k.total_rate(x);
      if (!(kk >= 0.0) || !std::isfinite(kk)) {
        ok = false;
        worst = kk;
        break;
      }
      sup_k = std::max(sup_k, kk);
    }
    if (const TotalRate* form = k.total_rate_form(); form && form->supremum()) sup_k = std::max(sup_k, *form->supremum());
    report.checks.push_back(make_check("total_rate_bounded", ok, ok ? sup_k : worst, "sup K over the working domain"));
  }
  {
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size() && ok; i += 8) {
      for (double u : {1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0 - 1e-6}) {
        const double v = k.density(xs[i], u * xs[i]);
        if (!(v >= 0.0)) {
          ok = false;
          worst = v;
          break;
        }
      }
    }
    report.checks.push_back(make_check("kernel_nonnegative", ok, worst, "density sampled on (0, x)"));
  }
  if (const FragmentDensity* p = k.fragment_density()) {
    double moment = std::numeric_limits<double>::quiet_NaN();
    try {
      moment = integrate_singular([&](double u) { return u * p->evaluate(u); }, 0.0, 1.0);
    } catch (const Error&) {
    }
    const double res = std::abs(moment - 1.0);
    report.checks.push_back(make_check("fragment_density_normalized", res <= kConservationTolerance, res,
                                       "|int_0^1 u p(u) du - 1|"));
  }
  {
    double worst = 0.0;
    std::string where;
    for (double x : xs) {
      double kk = k.total_rate(x);
      double mass = std::numeric_limits<double>::quiet_NaN();
      try {
        mass = k.conserved_rate(x);
      } catch (const Error&) {
      }
      const double res = kk > 0.0 ? std::abs(mass - kk) / kk : std::abs(mass);
      if (where.empty() || !(res <= worst)) {
        worst = std::isnan(res) ? std::numeric_limits<double>::infinity() : res;
        where = num(x);
      }
    }
    report.checks.push_back(make_check("mass_conservation", worst <= kConservationTolerance, worst,
                                       "max relative |int (y/x) k(x,y) dy - K(x)|, worst at x=" + where));
  }
  // Advisory: from every sampled level, some level at or above it fragments below it.
  {
    std::size_t unreachable = 0;
    std::string first;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      bool reach = false;
      for (std::size_t j = i; j < xs.size() && !reach; j += 1 + (xs.size() - i) / 32) {
        if (k.total_rate(xs[j]) > 0.0 && k.density(xs[j], 0.5 * xs[i]) > 0.0) reach = true;
      }
      if (!reach) {
        if (unreachable++ == 0) first = num(xs[i]);
      }
    }
    const bool ok = unreachable == 0;
    report.checks.push_back(make_check("irreducibility_support", ok, static_cast<double>(unreachable),
                                       ok ? "kernel support reaches below every sampled level"
                                          : "no fragmentation lands below x=" + first + " (advisory)",
                                       true));
    if (!ok) spdlog::warn("irreducibility heuristic failed at {} grid levels", unreachable);
  }

  spec.validated_ = report.valid();
  if (spec.validated_) {
    spec.sup_relative_rate_ = sup_rr;
    spec.thinning_bound_ = sup_k > 0.0 ? 1.001 * sup_k : 0.0;
  }
  return report;
}

std::shared_ptr<const ModelSpec> validated(ModelSpec spec) {
  const ValidationReport report = validate_model(spec);
  if (!report.valid()) {
    for (const auto& c : report.checks)
      if (!c.passed && !c.advisory)
        throw ModelError("model validation failed: " + c.name + " (residual " + num(c.residual) + "; " + c.detail + ")");
  }
  return std::make_shared<const ModelSpec>(std::move(spec));
}

double travel_time(const ModelSpec& spec, double x, double y) { return spec.growth().travel_time(x, y); }

FlowResult flow_map(const ModelSpec& spec, double x, double t) {
  const double y = spec.growth().flow_map(x, t);
  if (y > spec.domain().x_max) {
    spdlog::warn("flow map left the working domain: {} > x_max = {}; clamped", y, spec.domain().x_max);
    return {spec.domain().x_max, true};
  }
  return {y, false};
}

double no_jump_probability(const ModelSpec& spec, double x, double y) {
  if (!(x > 0.0) || y < x) throw DomainError("no-jump probability needs 0 < x <= y");
  if (x == y) return 1.0;
  const auto& k = spec.kernel();
  if (const auto* c = dynamic_cast<const ConstantRate*>(k.total_rate_form())) {
    if (c->value() == 0.0) return 1.0;
    return std::exp(-c->value() * travel_time(spec, x, y));
  }
  const auto& g = spec.growth();
  const double lx = std::log(x);
  const double integral = integrate(
      [&](double u) {
        const double z = std::exp(u);
        return k.total_rate(z) / g.relative_rate(z);
      },
      lx, lx + std::log1p((y - x) / x));
  return std::exp(-integral);
}

}  // namespace gfsim
