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

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gfsim/feynman_kac.hpp"
#include "gfsim/model.hpp"

namespace gfsim {

struct GridConfig {
  std::size_t n_nodes = 512;
  std::optional<double> x_min;  // default: working domain
  std::optional<double> x_max;
};

inline constexpr std::size_t kMinKernelNodes = 8;

// Discretization of A f = c f' + int_0^x f(y) k(x,y) dy - K f on log-spaced
// nodes.  Transport is upwind from the node above (zero inflow past the top);
// gain rows are trapezoidal and rescaled so that A applied to f(x) = x gives c
// exactly at interior nodes.
class GridOperator {
 public:
  GridOperator(const ModelSpec& spec, const GridConfig& cfg);

  std::size_t size() const { return x_.size(); }
  const std::vector<double>& nodes() const { return x_; }
  double q_c() const { return q_c_; }
  double sup_relative_rate() const { return sup_rr_; }
  double max_diagonal() const;

  // Copy with rows outside [a, b) replaced by pure decay at rate q_c; inside
  // rows see zero values outside, with both edges at their exact positions.
  GridOperator killed(double a, double b) const;
  std::optional<std::pair<double, double>> kill_window() const { return kill_; }
  bool inside(std::size_t i) const { return inside_.empty() || inside_[i]; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  Eigen::MatrixXd dense() const;
  const Eigen::MatrixXd& gain() const { return gain_; }

  // max_i |(A id)_i - c(x_i)| / c(x_i) over interior nodes (all but the top).
  double identity_residual() const;

 private:
  std::vector<double> x_, c_, k_, up_;
  Eigen::MatrixXd gain_;
  double q_c_ = 0.0;
  double sup_rr_ = 0.0;
  std::optional<std::pair<double, double>> kill_;
  std::vector<bool> inside_;
};

GridOperator build_operator(const ModelSpec& spec, const GridConfig& cfg);

struct StepperConfig {
  double rtol = 1e-7;
  double atol = 1e-12;
  double cfl = 1.0;
};

// Values of T_t f on the grid at each requested time (increasing).
std::vector<std::vector<double>> step_semigroup(const GridOperator& op, const TestFunction& f,
                                                const std::vector<double>& times, const StepperConfig& cfg = {});
std::vector<double> step_semigroup(const GridOperator& op, const TestFunction& f, double t,
                                   const StepperConfig& cfg = {});

// Linear interpolation of grid values at x.
double grid_value(const GridOperator& op, std::span<const double> values, double x);

struct EigenResult {
  double rho_ab = 0.0;
  std::vector<double> eigenfunction;  // A-eigenfunction, max-normalized, zero outside the window
  std::vector<double> nodes;
  double residual = 0.0;
  std::pair<double, double> interval;
  std::size_t iterations = 0;
  double resolvent_radius = 0.0;  // r in rho = q_c - 1/r at the final shift

  // Weighted-process eigenfunction F(x)/x interpolated log-linearly on inside nodes.
  double conjugated(double x) const;
};

struct EigenConfig {
  double tol = 1e-12;
  std::size_t max_iter = 20'000;
};

EigenResult killed_principal_eigenpair(const GridOperator& op, double a, double b, const EigenConfig& cfg = {});

std::vector<EigenResult> eigen_sweep(const GridOperator& op, const std::vector<std::pair<double, double>>& windows,
                                     unsigned workers = 0, const EigenConfig& cfg = {});

struct HittingIdentityCheck {
  double x = 0.0;
  double y = 0.0;
  double rho = 0.0;
  double rho_used = 0.0;
  double grid_ratio = 0.0;
  double grid_tolerance = 0.0;
  MCEstimate estimate;
  MCEstimate derivative;
  bool pass = false;
};

// Compares E_x[E_H e^{-rho H}; H(y) before leaving (a, b)] with
// (F(x)/x) / (F(y)/y) from the grid eigenfunction; the grid tolerance is the
// change of the ratio under halving the grid plus the induced change through rho.
HittingIdentityCheck check_killed_hitting_identity(std::shared_ptr<const ModelSpec> spec, const EigenResult& fine,
                                                   const EigenResult& coarse, double x, double y,
                                                   const SampleConfig& sample, const AdaptiveHorizon& horizon = {},
                                                   double rho_offset = 0.0, double significance = 3.0);

}  // namespace gfsim
