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
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "gfsim/model.hpp"
#include "gfsim/rng.hpp"

namespace gfsim {

inline constexpr std::uint64_t kDefaultMaxEvents = 10'000'000;

struct StoppingSpec {
  std::optional<double> horizon;        // stop at this time
  std::optional<double> hit_target;     // stop when the flow reaches y (t > 0)
  std::optional<double> lower_barrier;  // stop when a jump lands below a
  std::optional<double> upper_exit;     // stop when the flow crosses b
  std::uint64_t max_events = kDefaultMaxEvents;

  bool has_clause() const { return horizon || hit_target || lower_barrier || upper_exit; }
};

enum class StopReason { horizon, hit_target, exited_interval, max_events };

const char* to_string(StopReason r);

struct JumpEvent {
  double time;  // end of the flow segment, i.e. the jump epoch
  double pre;
  double post;
};

struct Path {
  double start = 0.0;
  std::vector<JumpEvent> events;
  double final_time = 0.0;
  double final_position = 0.0;
  double log_weight = 0.0;
  StopReason stop_reason = StopReason::horizon;

  // ln(final/start) + sum ln(pre/post), the closed form of the weight.
  double telescoping_log_weight() const;
};

// Resumable simulator for one trajectory.  The pending thinning proposal is kept
// across stops, so running to t and then to t + s consumes exactly the same
// random numbers as running to t + s directly.
class PathSimulator {
 public:
  PathSimulator(const ModelSpec& spec, double x0, RngStream rng, bool record_events = false);

  // Advance until the first clause of `stop` fires.  Clauses are absolute
  // (horizon is an absolute time).  May be called again with a later horizon.
  StopReason run(const StoppingSpec& stop);

  double time() const { return t_; }
  double position() const { return x_; }
  double log_weight() const { return log_w_; }
  std::uint64_t events() const { return n_events_; }
  double start() const { return start_; }
  const std::vector<JumpEvent>& event_log() const { return log_; }

 private:
  const ModelSpec* spec_;
  double start_;
  double t_ = 0.0;
  double x_;
  double log_w_ = 0.0;
  std::uint64_t n_events_ = 0;
  double pending_ = std::numeric_limits<double>::quiet_NaN();
  RngStream rng_;
  bool record_;
  std::vector<JumpEvent> log_;
};

Path simulate_path(const ModelSpec& spec, double x0, const StoppingSpec& stop, RngStream rng);

struct HittingOutcome {
  bool hit = false;
  double hit_time = std::numeric_limits<double>::infinity();
  double log_weight = 0.0;  // ln of the weight at H when hit
  StopReason stop_reason = StopReason::horizon;
};

HittingOutcome hitting_functional(const ModelSpec& spec, double x0, const StoppingSpec& stop, RngStream rng);

}  // namespace gfsim
