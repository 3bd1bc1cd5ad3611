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

#include "gfsim/pdmp.hpp"

#include <algorithm>
#include <cmath>

#include "gfsim/error.hpp"

namespace gfsim {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::horizon: return "horizon";
    case StopReason::hit_target: return "hit_target";
    case StopReason::exited_interval: return "exited_interval";
    case StopReason::max_events: return "max_events";
  }
  return "unknown";
}

double Path::telescoping_log_weight() const {
  double s = std::log(final_position / start);
  for (const auto& e : events) s += std::log(e.pre / e.post);
  return s;
}

PathSimulator::PathSimulator(const ModelSpec& spec, double x0, RngStream rng, bool record_events)
    : spec_(&spec), start_(x0), x_(x0), rng_(rng), record_(record_events) {
  if (!spec.validated()) throw ModelError("simulation needs a validated model");
  if (!(x0 >= spec.domain().x_min && x0 <= spec.domain().x_max))
    throw DomainError("start position must lie in the working domain");
}

StopReason PathSimulator::run(const StoppingSpec& stop) {
  if (!stop.has_clause()) throw Error(ErrorCode::invalid_argument, "stopping rule needs at least one clause");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto& growth = spec_->growth();
  const auto& kernel = spec_->kernel();
  const double kbar = spec_->thinning_bound();
  const double horizon = stop.horizon ? *stop.horizon : inf;

  if (stop.lower_barrier && x_ < *stop.lower_barrier) return StopReason::exited_interval;
  if (stop.upper_exit && x_ > *stop.upper_exit) return StopReason::exited_interval;
  if (t_ >= horizon) return StopReason::horizon;

  for (;;) {
    if (n_events_ >= stop.max_events) return StopReason::max_events;
    if (std::isnan(pending_)) pending_ = kbar > 0.0 ? rng_.exponential(kbar) : inf;
    const double tau = pending_;

    double d_hit = inf;
    if (stop.hit_target && x_ < *stop.hit_target) d_hit = growth.travel_time(x_, *stop.hit_target);
    double d_exit = inf;
    if (stop.upper_exit && x_ <= *stop.upper_exit) d_exit = growth.travel_time(x_, *stop.upper_exit);
    const double d_hor = horizon - t_;
    const double d = std::min({d_hit, d_exit, d_hor});

    if (d <= tau) {
      if (!std::isfinite(d)) {
        // No jumps and no reachable clause: the path flows forever.
        t_ = inf;
        return StopReason::horizon;
      }
      StopReason reason;
      double next;
      if (d == d_hit) {
        next = *stop.hit_target;
        reason = StopReason::hit_target;
      } else if (d == d_exit) {
        next = *stop.upper_exit;
        reason = StopReason::exited_interval;
      } else {
        next = growth.flow_map(x_, d_hor);
        reason = StopReason::horizon;
      }
      log_w_ += std::log(next / x_);
      x_ = next;
      t_ = reason == StopReason::horizon ? horizon : t_ + d;
      pending_ = tau - d;
      return reason;
    }

    const double next = growth.flow_map(x_, tau);
    log_w_ += std::log(next / x_);
    x_ = next;
    t_ += tau;
    pending_ = std::numeric_limits<double>::quiet_NaN();

    const double k = kernel.total_rate(x_);
    if (k > kbar) throw Error(ErrorCode::internal, "thinning bound exceeded by the total rate");
    if (rng_.uniform() * kbar < k) {
      double y = kernel.sample_target(x_, rng_.uniform());
      if (!(y < x_)) y = std::nextafter(x_, 0.0);
      if (!(y > 0.0)) y = std::numeric_limits<double>::denorm_min();
      if (record_) log_.push_back({t_, x_, y});
      x_ = y;
      ++n_events_;
      if (stop.lower_barrier && x_ < *stop.lower_barrier) return StopReason::exited_interval;
      if (stop.hit_target && x_ == *stop.hit_target) return StopReason::hit_target;
    }
  }
}

Path simulate_path(const ModelSpec& spec, double x0, const StoppingSpec& stop, RngStream rng) {
  PathSimulator sim(spec, x0, rng, true);
  const StopReason reason = sim.run(stop);
  Path p;
  p.start = x0;
  p.events = sim.event_log();
  p.final_time = sim.time();
  p.final_position = sim.position();
  p.log_weight = sim.log_weight();
  p.stop_reason = reason;
  return p;
}

HittingOutcome hitting_functional(const ModelSpec& spec, double x0, const StoppingSpec& stop, RngStream rng) {
  if (!stop.hit_target) throw Error(ErrorCode::invalid_argument, "hitting functional needs a hit target");
  PathSimulator sim(spec, x0, rng, false);
  HittingOutcome out;
  out.stop_reason = sim.run(stop);
  if (out.stop_reason == StopReason::hit_target) {
    out.hit = true;
    out.hit_time = sim.time();
    out.log_weight = sim.log_weight();
  }
  return out;
}

}  // namespace gfsim
