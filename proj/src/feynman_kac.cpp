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

#include "gfsim/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "gfsim/error.hpp"
#include "gfsim/numerics.hpp"
#include "gfsim/parallel.hpp"

namespace gfsim {

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  // One Philox block keyed by (master, label hash) gives a well-mixed key.
  return philox4x64_10({0x6766736d2d736565ULL, 0, 0, 0}, {master, h})[0];
}

// ------------------------------------------------------------ test functions

TestFunction TestFunction::indicator(double lo, double hi) {
  if (!(hi > lo) || !(lo >= 0.0)) throw Error(ErrorCode::invalid_argument, "indicator needs 0 <= lo < hi");
  return TestFunction{Form::indicator, lo, hi, false};
}

TestFunction TestFunction::tent(double lo, double hi) {
  if (!(hi > lo) || !(lo >= 0.0)) throw Error(ErrorCode::invalid_argument, "tent needs 0 <= lo < hi");
  return TestFunction{Form::tent, lo, hi, false};
}

TestFunction TestFunction::identity() { return TestFunction{Form::identity, 0.0, 0.0, false}; }

TestFunction TestFunction::reciprocal() const {
  TestFunction f = *this;
  f.reciprocal_weighted = true;
  return f;
}

double TestFunction::operator()(double x) const {
  double v = 0.0;
  switch (form) {
    case Form::indicator: v = (x >= lo && x <= hi) ? 1.0 : 0.0; break;
    case Form::tent: {
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      v = std::max(0.0, 1.0 - std::abs(x - mid) / half);
      break;
    }
    case Form::identity: v = x; break;
  }
  return reciprocal_weighted ? v / x : v;
}

std::optional<std::pair<double, double>> TestFunction::support() const {
  if (form == Form::identity) return std::nullopt;
  return std::pair{lo, hi};
}

// ----------------------------------------------------------------- reduction

namespace {

MCEstimate summarize(const std::vector<double>& values, const std::vector<std::uint8_t>& excluded, std::size_t censored,
                     std::size_t truncated, const SampleConfig& cfg) {
  std::vector<double> kept;
  kept.reserve(values.size());
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!excluded.empty() && excluded[i]) {
      ++dropped;
      continue;
    }
    kept.push_back(values[i]);
  }
  const SampleStats st = sample_stats(kept);
  MCEstimate e;
  e.mean = st.mean;
  e.std_error = st.std_error;
  e.n_paths = kept.size();
  const double n = values.empty() ? 1.0 : static_cast<double>(values.size());
  e.censored_fraction = static_cast<double>(censored) / n;
  e.truncated_fraction = static_cast<double>(truncated) / n;
  e.max_events_fraction = static_cast<double>(dropped) / n;
  e.seed = {cfg.seed, cfg.first_index};
  e.reliable = std::isfinite(e.mean) && std::isfinite(e.std_error) && !kept.empty() &&
               !(e.mean != 0.0 && e.std_error > kUnreliableRelativeError * std::abs(e.mean)) &&
               !(e.mean == 0.0 && e.std_error > 0.0);
  return e;
}

}  // namespace

MCEstimate estimate_semigroup(const ModelSpec& spec, double x, double t, const TestFunction& f,
                              const SampleConfig& cfg) {
  if (t < 0.0) throw DomainError("semigroup needs t >= 0");
  if (t == 0.0) {
    MCEstimate e;
    e.mean = f(x);
    e.n_paths = cfg.n_paths;
    e.seed = {cfg.seed, cfg.first_index};
    return e;
  }
  std::vector<double> v(cfg.n_paths, 0.0);
  std::vector<std::uint8_t> excluded(cfg.n_paths, 0);
  StoppingSpec stop;
  stop.horizon = t;
  stop.max_events = cfg.max_events;
  parallel_for(0, cfg.n_paths, cfg.workers, [&](std::size_t i) {
    PathSimulator sim(spec, x, RngStream(cfg.seed, cfg.first_index + i));
    if (sim.run(stop) == StopReason::max_events) {
      excluded[i] = 1;
      return;
    }
    const double z = sim.position();
    v[i] = x * std::exp(sim.log_weight()) * f(z) / z;
  });
  return summarize(v, excluded, 0, 0, cfg);
}

// ------------------------------------------------------------ hitting sample

HittingSample::HittingSample(std::shared_ptr<const ModelSpec> spec, double x, StoppingSpec stop, SampleConfig cfg)
    : spec_(std::move(spec)), x_(x), stop_(std::move(stop)), cfg_(cfg) {
  if (!stop_.hit_target) throw Error(ErrorCode::invalid_argument, "hitting sample needs a hit target");
  cfg_.max_events = stop_.max_events;
  extend_paths(cfg.n_paths);
}

HittingSample::~HittingSample() = default;
HittingSample::HittingSample(HittingSample&&) noexcept = default;
HittingSample& HittingSample::operator=(HittingSample&&) noexcept = default;

void HittingSample::simulate_range(std::size_t lo, std::size_t hi) {
  parallel_for(lo, hi, cfg_.workers, [&](std::size_t i) {
    auto& sim = open_[i];
    if (!sim) sim = std::make_unique<PathSimulator>(*spec_, x_, RngStream(cfg_.seed, cfg_.first_index + i));
    const StopReason r = sim->run(stop_);
    reason_[i] = static_cast<std::uint8_t>(r);
    Record& rec = records_[i];
    rec.hit = r == StopReason::hit_target;
    rec.max_events = r == StopReason::max_events;
    if (rec.hit) {
      rec.hit_time = sim->time();
      rec.log_weight = sim->log_weight();
    }
    if (r != StopReason::horizon) sim.reset();
  });
}

void HittingSample::extend_paths(std::size_t n_total) {
  const std::size_t old = records_.size();
  if (n_total <= old) return;
  records_.resize(n_total);
  open_.resize(n_total);
  reason_.resize(n_total, 0);
  simulate_range(old, n_total);
  cfg_.n_paths = n_total;
}

void HittingSample::extend_horizon(double horizon) {
  if (stop_.horizon && horizon <= *stop_.horizon) return;
  stop_.horizon = horizon;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < open_.size(); ++i)
    if (open_[i]) idx.push_back(i);
  parallel_for(0, idx.size(), cfg_.workers, [&](std::size_t k) {
    const std::size_t i = idx[k];
    auto& sim = open_[i];
    const StopReason r = sim->run(stop_);
    reason_[i] = static_cast<std::uint8_t>(r);
    Record& rec = records_[i];
    rec.hit = r == StopReason::hit_target;
    rec.max_events = r == StopReason::max_events;
    if (rec.hit) {
      rec.hit_time = sim->time();
      rec.log_weight = sim->log_weight();
    }
    if (r != StopReason::horizon) sim.reset();
  });
}

std::size_t HittingSample::open_paths() const {
  return static_cast<std::size_t>(std::count_if(open_.begin(), open_.end(), [](const auto& p) { return p != nullptr; }));
}

double HittingSample::horizon() const {
  return stop_.horizon ? *stop_.horizon : std::numeric_limits<double>::infinity();
}

MCEstimate HittingSample::reduce(const std::vector<double>& values) const {
  std::vector<std::uint8_t> excluded(records_.size());
  std::size_t censored = 0;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    excluded[i] = records_[i].max_events ? 1 : 0;
    if (!records_[i].hit && !records_[i].max_events) {
      ++censored;
      if (static_cast<StopReason>(reason_[i]) == StopReason::horizon) ++truncated;
    }
  }
  return summarize(values, excluded, censored, truncated, cfg_);
}

std::vector<double> HittingSample::per_path_laplace(double q) const {
  std::vector<double> v(records_.size(), 0.0);
  for (std::size_t i = 0; i < records_.size(); ++i)
    if (records_[i].hit) v[i] = std::exp(records_[i].log_weight - q * records_[i].hit_time);
  return v;
}

MCEstimate HittingSample::laplace(double q) const { return reduce(per_path_laplace(q)); }

MCEstimate HittingSample::laplace_derivative(double q) const {
  std::vector<double> v(records_.size(), 0.0);
  for (std::size_t i = 0; i < records_.size(); ++i)
    if (records_[i].hit) v[i] = records_[i].hit_time * std::exp(records_[i].log_weight - q * records_[i].hit_time);
  return reduce(v);
}

double HittingSample::tail_contribution(double q, double fraction) const {
  const double T = horizon();
  if (!std::isfinite(T)) return 0.0;
  const double from = (1.0 - fraction) * T;
  std::vector<double> v(records_.size(), 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].max_events) continue;
    ++n;
    if (records_[i].hit && records_[i].hit_time > from)
      v[i] = std::exp(records_[i].log_weight - q * records_[i].hit_time);
  }
  return n ? pairwise_sum(v) / static_cast<double>(n) : 0.0;
}

bool HittingSample::adapt_horizon(double q, double cap) {
  for (;;) {
    const MCEstimate e = laplace(q);
    const double tail = tail_contribution(q);
    if (tail <= 0.1 * e.std_error && (tail == 0.0 || e.std_error > 0.0)) return true;
    if (!std::isfinite(e.mean)) return false;
    const double T = horizon();
    if (!std::isfinite(T) || T >= cap || open_paths() == 0) return tail <= 0.1 * e.std_error;
    extend_horizon(std::min(2.0 * T, cap));
  }
}

double HittingSample::hit_fraction() const {
  if (records_.empty()) return 0.0;
  const auto hits = std::count_if(records_.begin(), records_.end(), [](const Record& r) { return r.hit; });
  return static_cast<double>(hits) / static_cast<double>(records_.size());
}

double HittingSample::median_hit_time() const {
  std::vector<double> h;
  for (const auto& r : records_)
    if (r.hit) h.push_back(r.hit_time);
  if (h.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = h.begin() + static_cast<std::ptrdiff_t>(h.size() / 2);
  std::nth_element(h.begin(), mid, h.end());
  return *mid;
}

double initial_horizon(std::shared_ptr<const ModelSpec> spec, double x, const StoppingSpec& stop,
                       const SampleConfig& cfg, const AdaptiveHorizon& policy) {
  SampleConfig pilot = cfg;
  pilot.n_paths = std::min(policy.pilot_paths, cfg.n_paths);
  // The pilot uses its own stream block so it never overlaps the main sample.
  pilot.seed = derive_seed(cfg.seed, "horizon-pilot");
  StoppingSpec s = stop;
  s.horizon = std::min(policy.initial, policy.cap);
  HittingSample sample(std::move(spec), x, s, pilot);
  while (2 * sample.open_paths() > sample.size() && sample.horizon() < policy.cap)
    sample.extend_horizon(std::min(2.0 * sample.horizon(), policy.cap));
  const double m = sample.median_hit_time();
  if (!std::isfinite(m) || m <= 0.0) return sample.horizon();
  return std::min(10.0 * m, policy.cap);
}

MCEstimate estimate_laplace(std::shared_ptr<const ModelSpec> spec, double x, double y, double q,
                            const StoppingSpec& stop, const SampleConfig& cfg) {
  StoppingSpec s = stop;
  s.hit_target = y;
  return HittingSample(std::move(spec), x, s, cfg).laplace(q);
}

MCEstimate estimate_laplace_derivative(std::shared_ptr<const ModelSpec> spec, double x, double y, double q,
                                       const StoppingSpec& stop, const SampleConfig& cfg) {
  StoppingSpec s = stop;
  s.hit_target = y;
  return HittingSample(std::move(spec), x, s, cfg).laplace_derivative(q);
}

// ---------------------------------------------------------------- ell table

EllTable::EllTable(std::shared_ptr<const ModelSpec> spec, std::vector<double> y, std::vector<double> values, double q,
                   double target)
    : spec_(std::move(spec)), y_(std::move(y)), v_(std::move(values)), q_(q), target_(target) {
  if (y_.size() < 2 || y_.size() != v_.size()) throw Error(ErrorCode::invalid_argument, "ell table needs >= 2 matching nodes");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!(v_[i] > 0.0)) throw Error(ErrorCode::numeric_error, "ell table values must be positive");
    if (i > 0 && !(y_[i] > y_[i - 1])) throw Error(ErrorCode::invalid_argument, "ell table nodes must increase");
  }
}

double EllTable::operator()(double z) const {
  if (z < y_.front()) {
    const double z0 = y_.front();
    return no_jump_probability(*spec_, z, z0) * std::exp(-q_ * travel_time(*spec_, z, z0)) * (z0 / z) * v_.front();
  }
  if (z >= y_.back()) return v_.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(y_.begin(), y_.end(), z) - y_.begin()) - 1;
  const double w = std::log(z / y_[k]) / std::log(y_[k + 1] / y_[k]);
  return std::exp((1.0 - w) * std::log(v_[k]) + w * std::log(v_[k + 1]));
}

EllTable build_ell_table(std::shared_ptr<const ModelSpec> spec, double target, double q, const std::vector<double>& y,
                         const SampleConfig& cfg, const AdaptiveHorizon& policy) {
  std::vector<double> values(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    SampleConfig c = cfg;
    c.first_index = cfg.first_index + i * cfg.n_paths;
    StoppingSpec stop;
    stop.hit_target = target;
    stop.max_events = cfg.max_events;
    stop.horizon = initial_horizon(spec, y[i], stop, c, policy);
    HittingSample sample(spec, y[i], stop, c);
    sample.adapt_horizon(q, policy.cap);
    values[i] = sample.laplace(q).mean;
  }
  return EllTable(std::move(spec), y, std::move(values), q, target);
}

TiltedEstimate tilted_expectation(const ModelSpec& spec, double x, double t, const std::optional<TestFunction>& f,
                                  double q, const EllTable& ell, const SampleConfig& cfg) {
  if (t < 0.0) throw DomainError("tilted expectation needs t >= 0");
  std::vector<double> v(cfg.n_paths, 0.0);
  std::vector<std::uint8_t> excluded(cfg.n_paths, 0);
  std::vector<std::uint8_t> outside(cfg.n_paths, 0);
  StoppingSpec stop;
  stop.horizon = t;
  stop.max_events = cfg.max_events;
  const double lx = ell(x);
  parallel_for(0, cfg.n_paths, cfg.workers, [&](std::size_t i) {
    PathSimulator sim(spec, x, RngStream(cfg.seed, cfg.first_index + i));
    if (t > 0.0 && sim.run(stop) == StopReason::max_events) {
      excluded[i] = 1;
      return;
    }
    const double z = sim.position();
    const double w = std::exp(sim.log_weight() - q * t);
    if (f) {
      v[i] = w * (*f)(z) / z / lx;
    } else {
      if (!ell.covers(z)) outside[i] = 1;
      v[i] = w * ell(z) / lx;
    }
  });
  TiltedEstimate out;
  out.estimate = summarize(v, excluded, 0, 0, cfg);
  out.extrapolated = static_cast<std::size_t>(std::count(outside.begin(), outside.end(), 1));
  if (out.extrapolated > 0)
    spdlog::warn("tilted expectation: {} of {} end points outside the l table [{}, {}]", out.extrapolated, cfg.n_paths,
                 ell.nodes().front(), ell.nodes().back());
  return out;
}

}  // namespace gfsim
