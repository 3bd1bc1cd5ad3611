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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gfsim {

// ---------------------------------------------------------------- growth

class GrowthRate {
 public:
  virtual ~GrowthRate() = default;

  virtual double evaluate(double x) const = 0;
  virtual double relative_rate(double x) const { return evaluate(x) / x; }

  // s(x, y) = int_x^y dz / c(z) for 0 < x <= y.  The default uses adaptive quadrature.
  virtual double travel_time(double x, double y) const;
  // Position after flowing for time t from x; inverse of travel_time in y.
  virtual double flow_map(double x, double t) const;

  virtual bool is_linear() const { return false; }
  // Limits of c(x)/x at 0 and infinity when known in closed form.
  virtual std::optional<double> relative_rate_limit_at_zero() const { return std::nullopt; }
  virtual std::optional<double> relative_rate_limit_at_infinity() const { return std::nullopt; }
  // Range of x where the rate is backed by data (tabulated forms only).
  virtual std::optional<std::pair<double, double>> data_range() const { return std::nullopt; }
  virtual std::string canonical() const = 0;
};

// c(x) = a x.
class LinearGrowth final : public GrowthRate {
 public:
  explicit LinearGrowth(double a);
  double a() const { return a_; }
  double evaluate(double x) const override { return a_ * x; }
  double relative_rate(double) const override { return a_; }
  double travel_time(double x, double y) const override;
  double flow_map(double x, double t) const override;
  bool is_linear() const override { return true; }
  std::optional<double> relative_rate_limit_at_zero() const override { return a_; }
  std::optional<double> relative_rate_limit_at_infinity() const override { return a_; }
  std::string canonical() const override;

 private:
  double a_;
};

// c(x) = coef * x^alpha / (1 + beta * x^gamma), alpha >= 1, and for beta > 0
// gamma >= alpha - 1 (otherwise c/x is unbounded).  Travel time is closed form.
class PowerRationalGrowth final : public GrowthRate {
 public:
  PowerRationalGrowth(double coef, double alpha, double beta, double gamma);
  double evaluate(double x) const override;
  double relative_rate(double x) const override;
  double travel_time(double x, double y) const override;
  double flow_map(double x, double t) const override;
  bool is_linear() const override { return alpha_ == 1.0 && beta_ == 0.0; }
  std::optional<double> relative_rate_limit_at_zero() const override;
  std::optional<double> relative_rate_limit_at_infinity() const override;
  std::string canonical() const override;

 private:
  double coef_, alpha_, beta_, gamma_;
};

// Monotone cubic (PCHIP) interpolation of c on a table; c(x)/x is frozen
// outside the table.
class TabulatedGrowth final : public GrowthRate {
 public:
  TabulatedGrowth(std::vector<double> x, std::vector<double> c);
  ~TabulatedGrowth() override;
  double evaluate(double x) const override;
  double travel_time(double x, double y) const override;
  double flow_map(double x, double t) const override;
  std::optional<std::pair<double, double>> data_range() const override;
  std::string canonical() const override;

 private:
  double potential(double x) const;  // antiderivative of 1/c, zero at the first node
  struct Impl;
  std::vector<double> x_, c_;
  std::vector<double> cumulative_;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------- kernel

class TotalRate {
 public:
  virtual ~TotalRate() = default;
  virtual double evaluate(double x) const = 0;
  // Exact supremum over (0, inf) when the form knows it.
  virtual std::optional<double> supremum() const { return std::nullopt; }
  virtual std::string canonical() const = 0;
};

class ConstantRate final : public TotalRate {
 public:
  explicit ConstantRate(double value);
  double evaluate(double) const override { return value_; }
  std::optional<double> supremum() const override { return value_; }
  double value() const { return value_; }
  std::string canonical() const override;

 private:
  double value_;
};

// K(x) = k_max * (x/x_half)^m / (1 + (x/x_half)^m)
class HillRate final : public TotalRate {
 public:
  HillRate(double k_max, double x_half, double exponent);
  double evaluate(double x) const override;
  std::optional<double> supremum() const override { return k_max_; }
  std::string canonical() const override;

 private:
  double k_max_, x_half_, m_;
};

// Fragment density p(u) on (0, 1) of a self-similar kernel.
class FragmentDensity {
 public:
  virtual ~FragmentDensity() = default;
  virtual double evaluate(double u) const = 0;
  // Draw from the size-biased law u p(u) du (normalized), by inversion.
  virtual double sample_size_biased(double uniform) const = 0;
  virtual std::string canonical() const = 0;
};

// p(u) = coef * u^theta, theta > -2.  Normalized iff coef = theta + 2.
class PowerDensity final : public FragmentDensity {
 public:
  PowerDensity(double coef, double theta);
  double evaluate(double u) const override;
  double sample_size_biased(double uniform) const override;
  std::string canonical() const override;
  double coef() const { return coef_; }
  double theta() const { return theta_; }

 private:
  double coef_, theta_;
};

// p(u) = coef * u^(a-1) (1-u)^(b-1); coef defaults to the normalizing value 1/B(a+1, b).
class BetaDensity final : public FragmentDensity {
 public:
  BetaDensity(double a, double b, std::optional<double> coef = std::nullopt);
  double evaluate(double u) const override;
  double sample_size_biased(double uniform) const override;
  std::string canonical() const override;

 private:
  double a_, b_, coef_;
};

class FragmentationKernel {
 public:
  virtual ~FragmentationKernel() = default;

  virtual double total_rate(double x) const = 0;
  virtual double density(double x, double y) const = 0;  // k(x, y), 0 < y < x
  double mass_weighted(double x, double y) const { return y / x * density(x, y); }
  double target_density(double x, double y) const;
  // Post-jump position from x with density target_density(x, .).
  virtual double sample_target(double x, double uniform) const = 0;
  // int_0^x (y/x) k(x, y) dy computed from the density alone.
  virtual double conserved_rate(double x) const;

  virtual const FragmentDensity* fragment_density() const { return nullptr; }
  virtual const TotalRate* total_rate_form() const { return nullptr; }
  virtual std::string canonical() const = 0;
};

// k(x, y) = K(x)/x * p(y/x).
class SelfSimilarKernel final : public FragmentationKernel {
 public:
  SelfSimilarKernel(std::shared_ptr<const TotalRate> rate, std::shared_ptr<const FragmentDensity> p);
  double total_rate(double x) const override { return rate_->evaluate(x); }
  double density(double x, double y) const override;
  double sample_target(double x, double uniform) const override;
  double conserved_rate(double x) const override;
  const FragmentDensity* fragment_density() const override { return p_.get(); }
  const TotalRate* total_rate_form() const override { return rate_.get(); }
  std::string canonical() const override;

 private:
  std::shared_ptr<const TotalRate> rate_;
  std::shared_ptr<const FragmentDensity> p_;
};

// Arbitrary density k(x, y).  K is either supplied or derived from the density.
class GeneralKernel final : public FragmentationKernel {
 public:
  using Density = std::function<double(double, double)>;
  GeneralKernel(Density k, std::string description, std::shared_ptr<const TotalRate> supplied = nullptr);
  double total_rate(double x) const override;
  double density(double x, double y) const override { return k_(x, y); }
  double sample_target(double x, double uniform) const override;
  const TotalRate* total_rate_form() const override { return supplied_.get(); }
  std::string canonical() const override;

  // k(x, y) = coef * y^theta / x^(theta + 1).
  static Density power(double coef, double theta);

 private:
  Density k_;
  std::string description_;
  std::shared_ptr<const TotalRate> supplied_;
};

// ---------------------------------------------------------------- model

struct Domain {
  double x_min = 0.0;
  double x_max = 0.0;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  bool advisory = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool valid() const;
  const ValidationCheck* find(const std::string& name) const;
};

class ModelSpec {
 public:
  ModelSpec(std::shared_ptr<const GrowthRate> growth, std::shared_ptr<const FragmentationKernel> kernel,
            Domain domain);

  const GrowthRate& growth() const { return *growth_; }
  const FragmentationKernel& kernel() const { return *kernel_; }
  const Domain& domain() const { return domain_; }

  bool validated() const { return validated_; }
  // Available after validation.
  double thinning_bound() const;
  double sup_relative_rate() const;
  double q_c() const { return 1.0 + sup_relative_rate(); }

  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a of canonical()

 private:
  friend ValidationReport validate_model(ModelSpec& spec);
  std::shared_ptr<const GrowthRate> growth_;
  std::shared_ptr<const FragmentationKernel> kernel_;
  Domain domain_;
  bool validated_ = false;
  double thinning_bound_ = 0.0;
  double sup_relative_rate_ = 0.0;
};

inline constexpr std::size_t kValidationGridSize = 512;
inline constexpr double kConservationTolerance = 1e-9;

ValidationReport validate_model(ModelSpec& spec);

// Same as validate_model but throws ModelError naming the first failed check.
std::shared_ptr<const ModelSpec> validated(ModelSpec spec);

double travel_time(const ModelSpec& spec, double x, double y);

struct FlowResult {
  double position;
  bool clamped;  // true when the exact position left the working domain above
};
FlowResult flow_map(const ModelSpec& spec, double x, double t);

double no_jump_probability(const ModelSpec& spec, double x, double y);

}  // namespace gfsim
