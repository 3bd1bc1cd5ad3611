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

#include "gfsim/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "format.hpp"
#include "gfsim/error.hpp"
#include "gfsim/numerics.hpp"
#include "gfsim/parallel.hpp"

namespace gfsim {

using detail::num;

GridOperator::GridOperator(const ModelSpec& spec, const GridConfig& cfg) {
  if (!spec.validated()) throw ModelError("grid operator needs a validated model");
  const std::size_t n = cfg.n_nodes;
  if (n < 2 * kMinKernelNodes) throw GridError("grid too coarse: need at least " + std::to_string(2 * kMinKernelNodes) + " nodes");
  const double lo = cfg.x_min.value_or(spec.domain().x_min);
  const double hi = cfg.x_max.value_or(spec.domain().x_max);
  x_ = log_space(lo, hi, n);
  c_.resize(n);
  k_.resize(n);
  up_.resize(n);
  const auto& growth = spec.growth();
  const auto& kernel = spec.kernel();
  for (std::size_t i = 0; i < n; ++i) {
    c_[i] = growth.evaluate(x_[i]);
    k_[i] = kernel.total_rate(x_[i]);
    const double h = i + 1 < n ? x_[i + 1] - x_[i] : x_[i] - x_[i - 1];
    up_[i] = c_[i] / h;
  }
  gain_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) {
    if (!(k_[i] > 0.0)) continue;
    double mass = 0.0;
    std::size_t support = 0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double left = j > 0 ? x_[j] - x_[j - 1] : 0.0;
      const double right = j < i ? x_[j + 1] - x_[j] : 0.0;
      const double y = j < i ? x_[j] : std::nextafter(x_[i], 0.0);
      const double w = 0.5 * (left + right) * kernel.density(x_[i], y);
      gain_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      mass += w * x_[j];
      if (w > 0.0) ++support;
    }
    if (i >= kMinKernelNodes && support < kMinKernelNodes)
      throw GridError("grid too coarse for the kernel support: " + std::to_string(support) + " nodes under x=" + num(x_[i]));
    if (!(mass > 0.0)) continue;
    gain_.row(static_cast<Eigen::Index>(i)) *= k_[i] * x_[i] / mass;
  }
  q_c_ = spec.q_c();
  sup_rr_ = spec.sup_relative_rate();
}

GridOperator build_operator(const ModelSpec& spec, const GridConfig& cfg) { return GridOperator(spec, cfg); }

double GridOperator::max_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, inside(i) ? up_[i] + k_[i] - gain_(i, i) : q_c_);
  return m;
}

GridOperator GridOperator::killed(double a, double b) const {
  if (!(b > a)) throw GridError("kill window needs a < b");
  GridOperator op = *this;
  op.kill_ = std::pair{a, b};
  op.inside_.assign(size(), false);
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    op.inside_[i] = x_[i] >= a && x_[i] < b;
    count += op.inside_[i];
  }
  if (count < 2) throw GridError("kill window [" + num(a) + ", " + num(b) + ") holds fewer than 2 grid nodes");

  // Place both edges at their exact positions: the top inside node flows into
  // a zero value at b, and the lowest gain cell starts at a.
  const std::size_t n = size();
  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (op.inside_[i]) {
      first = std::min(first, i);
      last = i;
    }
  if (last + 1 < n) op.up_[last] = c_[last] / (b - x_[last]);
  const double edge = std::max(a, x_.front());
  for (std::size_t i = first; i <= last; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < first; ++j) op.gain_(r, static_cast<Eigen::Index>(j)) = 0.0;
    const double left = first > 0 ? x_[first] - x_[first - 1] : 0.0;
    const double right = first < i ? x_[first + 1] - x_[first] : 0.0;
    if (left + right > 0.0)
      op.gain_(r, static_cast<Eigen::Index>(first)) *= ((x_[first] - edge) + 0.5 * right) / (0.5 * (left + right));
  }
  return op;
}

Eigen::VectorXd GridOperator::apply(const Eigen::VectorXd& f) const {
  const Eigen::Index n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd out = gain_.triangularView<Eigen::Lower>() * f;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!inside(u)) {
      out[i] = -q_c_ * f[i];
      continue;
    }
    const double above = i + 1 < n && inside(u + 1) ? f[i + 1] : 0.0;
    out[i] += up_[u] * (above - f[i]) - k_[u] * f[i];
  }
  return out;
}

Eigen::MatrixXd GridOperator::dense() const {
  const Eigen::Index n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = gain_;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!inside(u)) {
      m.row(i).setZero();
      m(i, i) = -q_c_;
      continue;
    }
    m(i, i) -= up_[u] + k_[u];
    if (i + 1 < n && inside(u + 1)) m(i, i + 1) += up_[u];
  }
  return m;
}

double GridOperator::identity_residual() const {
  Eigen::VectorXd id(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) id[static_cast<Eigen::Index>(i)] = x_[i];
  GridOperator plain = *this;
  plain.kill_.reset();
  plain.inside_.clear();
  const Eigen::VectorXd a = plain.apply(id);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < size(); ++i) {
    worst = std::max(worst, std::abs(a[static_cast<Eigen::Index>(i)] - c_[i]) / c_[i]);
  }
  return worst;
}

// ------------------------------------------------------------------ stepper

std::vector<std::vector<double>> step_semigroup(const GridOperator& op, const TestFunction& f,
                                                const std::vector<double>& times, const StepperConfig& cfg) {
  for (std::size_t j = 0; j < times.size(); ++j)
    if (times[j] < 0.0 || (j > 0 && times[j] < times[j - 1]))
      throw Error(ErrorCode::invalid_argument, "stepper times must be nonnegative and increasing");
  const auto support = f.support();
  if (!support) throw GridError("grid stepper needs a compactly supported test function");
  if (!times.empty()) {
    const double need = support->second * std::exp(op.sup_relative_rate() * times.back()) * 1.5;
    if (op.nodes().back() < need)
      throw GridError("top-of-domain buffer too small: x_max must be at least " + num(need));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(op.size());
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = f(op.nodes()[static_cast<std::size_t>(i)]);
  const double dt_max = cfg.cfl / op.max_diagonal();
  double t = 0.0;
  double dt = dt_max;
  std::vector<std::vector<double>> out;
  for (double target : times) {
    while (t < target) {
      const double h = std::min(dt, target - t);
      const Eigen::VectorXd k1 = op.apply(u);
      const Eigen::VectorXd u1 = u + h * k1;
      const Eigen::VectorXd k2 = op.apply(u1);
      const Eigen::VectorXd u2 = 0.75 * u + 0.25 * (u1 + h * k2);
      const Eigen::VectorXd k3 = op.apply(u2);
      const Eigen::VectorXd u3 = (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + h * k3);
      const Eigen::VectorXd heun = u + 0.5 * h * (k1 + k2);
      const double scale = cfg.atol + cfg.rtol * std::max(u.lpNorm<Eigen::Infinity>(), u3.lpNorm<Eigen::Infinity>());
      const double err = (u3 - heun).lpNorm<Eigen::Infinity>() / scale;
      if (err <= 1.0) {
        u = u3;
        t = (h == target - t) ? target : t + h;
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 2.0;
      dt = std::min(dt_max, h * std::clamp(factor, 0.2, 2.0));
    }
    out.emplace_back(u.data(), u.data() + n);
  }
  return out;
}

std::vector<double> step_semigroup(const GridOperator& op, const TestFunction& f, double t, const StepperConfig& cfg) {
  return step_semigroup(op, f, std::vector<double>{t}, cfg).front();
}

double grid_value(const GridOperator& op, std::span<const double> values, double x) {
  const auto& xs = op.nodes();
  if (values.size() != xs.size()) throw Error(ErrorCode::invalid_argument, "grid values do not match the grid");
  if (x < xs.front() || x > xs.back()) throw DomainError("point outside the grid");
  if (x == xs.back()) return values.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

// ---------------------------------------------------------------- eigenpair

double EigenResult::conjugated(double x) const {
  std::size_t first = nodes.size(), last = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (eigenfunction[i] > 0.0) {
      first = std::min(first, i);
      last = i;
    }
  if (first >= nodes.size() || x < nodes[first] || x > nodes[last])
    throw DomainError("point " + num(x) + " outside the window nodes of the eigenfunction");
  if (x == nodes[last]) return eigenfunction[last] / x;
  const auto k = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()) - 1;
  const double w = std::log(x / nodes[k]) / std::log(nodes[k + 1] / nodes[k]);
  const double f = std::exp((1.0 - w) * std::log(eigenfunction[k]) + w * std::log(eigenfunction[k + 1]));
  return f / x;
}

EigenResult killed_principal_eigenpair(const GridOperator& base, double a, double b, const EigenConfig& cfg) {
  const GridOperator op = base.killed(a, b);
  const Eigen::Index n = static_cast<Eigen::Index>(op.size());
  const Eigen::MatrixXd A = op.dense();
  const double qc = op.q_c();

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = op.inside(static_cast<std::size_t>(i)) ? 1.0 : 0.0;

  double mu = qc;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mu * Eigen::MatrixXd::Identity(n, n) - A);
  std::vector<double> history;
  double r_prev = 0.0;
  bool shifted = false;
  std::size_t it = 0;
  double rho = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (; it < cfg.max_iter; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    const double r = w.lpNorm<Eigen::Infinity>();
    if (!(r > 0.0) || !std::isfinite(r)) throw ConvergenceError("resolvent iteration broke down", history);
    w /= r;
    if (w.sum() < 0.0) w = -w;
    v = w;
    rho = mu - 1.0 / r;
    history.push_back(rho);
    if (!shifted && it >= 30) {
      // Move the shift closer to the estimate; the Perron root stays dominant.
      mu = rho + 0.25 * (qc - rho);
      lu.compute(mu * Eigen::MatrixXd::Identity(n, n) - A);
      shifted = true;
      r_prev = 0.0;
      continue;
    }
    if (r_prev > 0.0 && std::abs(r - r_prev) <= cfg.tol * r) {
      const Eigen::VectorXd av = A * v;
      residual = (av - rho * v).lpNorm<Eigen::Infinity>() / (av.lpNorm<Eigen::Infinity>() + std::abs(rho));
      if (residual < 1e-8) break;
    }
    r_prev = r;
  }
  if (it >= cfg.max_iter) throw ConvergenceError("killed eigenpair did not converge in " + std::to_string(cfg.max_iter) + " iterations", history);

  EigenResult res;
  res.rho_ab = rho;
  res.residual = residual;
  res.interval = {a, b};
  res.iterations = it + 1;
  res.resolvent_radius = 1.0 / (mu - rho);
  res.nodes = op.nodes();
  res.eigenfunction.assign(v.data(), v.data() + n);
  for (std::size_t i = 0; i < res.eigenfunction.size(); ++i) {
    if (!op.inside(i)) {
      res.eigenfunction[i] = 0.0;
    } else if (!(res.eigenfunction[i] > 0.0)) {
      throw ConvergenceError("killed eigenfunction is not positive on the window", history);
    }
  }
  return res;
}

std::vector<EigenResult> eigen_sweep(const GridOperator& op, const std::vector<std::pair<double, double>>& windows,
                                     unsigned workers, const EigenConfig& cfg) {
  std::vector<EigenResult> out(windows.size());
  parallel_for(0, windows.size(), workers,
               [&](std::size_t i) { out[i] = killed_principal_eigenpair(op, windows[i].first, windows[i].second, cfg); });
  return out;
}

HittingIdentityCheck check_killed_hitting_identity(std::shared_ptr<const ModelSpec> spec, const EigenResult& fine,
                                                   const EigenResult& coarse, double x, double y,
                                                   const SampleConfig& sample, const AdaptiveHorizon& horizon,
                                                   double rho_offset, double significance) {
  HittingIdentityCheck out;
  out.x = x;
  out.y = y;
  out.rho = fine.rho_ab;
  out.rho_used = fine.rho_ab + rho_offset;
  out.grid_ratio = fine.conjugated(x) / fine.conjugated(y);
  const double coarse_ratio = coarse.conjugated(x) / coarse.conjugated(y);

  StoppingSpec stop;
  stop.hit_target = y;
  stop.lower_barrier = fine.interval.first;
  stop.upper_exit = fine.interval.second;
  stop.max_events = sample.max_events;
  stop.horizon = initial_horizon(spec, x, stop, sample, horizon);
  HittingSample hs(spec, x, stop, sample);
  hs.adapt_horizon(out.rho_used, horizon.cap);
  out.estimate = hs.laplace(out.rho_used);
  out.derivative = hs.laplace_derivative(out.rho_used);
  out.grid_tolerance = std::abs(out.grid_ratio - coarse_ratio) + out.derivative.mean * std::abs(fine.rho_ab - coarse.rho_ab);
  out.pass = out.estimate.reliable &&
             std::abs(out.estimate.mean - out.grid_ratio) <= significance * out.estimate.std_error + out.grid_tolerance;
  return out;
}

}  // namespace gfsim
