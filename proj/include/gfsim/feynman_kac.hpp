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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gfsim/model.hpp"
#include "gfsim/pdmp.hpp"

namespace gfsim {

struct SeedProvenance {
  std::uint64_t master_seed = 0;
  std::uint64_t first_index = 0;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;             // paths entering the average
  double censored_fraction = 0.0;      // paths stopped by a clause other than the hit
  double truncated_fraction = 0.0;     // subset of the above stopped by the time horizon
  double max_events_fraction = 0.0;    // excluded from the average
  SeedProvenance seed;
  bool reliable = true;
};

inline constexpr double kUnreliableRelativeError = 0.5;

// Independent master key for a named experiment derived from a user seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

struct TestFunction {
  enum class Form { indicator, tent, identity };
  Form form = Form::identity;
  double lo = 0.0;
  double hi = 0.0;
  bool reciprocal_weighted = false;  // evaluate f(x)/x instead of f(x)

  static TestFunction indicator(double lo, double hi);
  static TestFunction tent(double lo, double hi);
  static TestFunction identity();
  TestFunction reciprocal() const;

  double operator()(double x) const;
  std::optional<std::pair<double, double>> support() const;
};

struct SampleConfig {
  std::size_t n_paths = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t first_index = 0;
  unsigned workers = 0;
  std::uint64_t max_events = kDefaultMaxEvents;
};

// T_t f(x) = x E_x[E_t f(X_t) / X_t].
MCEstimate estimate_semigroup(const ModelSpec& spec, double x, double t, const TestFunction& f,
                              const SampleConfig& cfg);

// Per-path hitting records from x, reusable for any q (common random numbers).
// Paths stopped by the time horizon are kept resumable so the horizon can be
// extended without resimulating.
class HittingSample {
 public:
  HittingSample(std::shared_ptr<const ModelSpec> spec, double x, StoppingSpec stop, SampleConfig cfg);
  ~HittingSample();
  HittingSample(HittingSample&&) noexcept;
  HittingSample& operator=(HittingSample&&) noexcept;

  void extend_paths(std::size_t n_total);
  void extend_horizon(double horizon);

  // E_x[e^{-qH} E_H; H before censoring]
  MCEstimate laplace(double q) const;
  // E_x[H e^{-qH} E_H; H before censoring] = -L'(q)
  MCEstimate laplace_derivative(double q) const;
  std::vector<double> per_path_laplace(double q) const;
  // Part of laplace(q) coming from hits in the last `fraction` of the horizon.
  double tail_contribution(double q, double fraction = 0.1) const;

  // Double the horizon until the tail part of laplace(q) is below 0.1 SE or the
  // cap is reached.  Returns true when the tail criterion holds.
  bool adapt_horizon(double q, double cap);

  std::size_t size() const { return records_.size(); }
  std::size_t open_paths() const;
  double horizon() const;
  double start() const { return x_; }
  const StoppingSpec& stopping() const { return stop_; }
  double hit_fraction() const;
  double median_hit_time() const;  // over hitting paths
  const SampleConfig& config() const { return cfg_; }

 private:
  struct Record {
    bool hit = false;
    bool max_events = false;
    double hit_time = 0.0;
    double log_weight = 0.0;
  };
  MCEstimate reduce(const std::vector<double>& values) const;
  void simulate_range(std::size_t lo, std::size_t hi);

  std::shared_ptr<const ModelSpec> spec_;
  double x_;
  StoppingSpec stop_;
  SampleConfig cfg_;
  std::vector<Record> records_;
  std::vector<std::unique_ptr<PathSimulator>> open_;
  std::vector<std::uint8_t> reason_;  // StopReason per path
};

struct AdaptiveHorizon {
  double cap = 1e4;
  std::size_t pilot_paths = 1000;
  double initial = 1.0;  // pilot starts here and doubles
};

// 10 x the median hitting time over pilot paths, where the pilot horizon doubles
// until at most half of the pilot paths are still running.
double initial_horizon(std::shared_ptr<const ModelSpec> spec, double x, const StoppingSpec& stop,
                       const SampleConfig& cfg, const AdaptiveHorizon& policy);

MCEstimate estimate_laplace(std::shared_ptr<const ModelSpec> spec, double x, double y, double q,
                            const StoppingSpec& stop, const SampleConfig& cfg);
MCEstimate estimate_laplace_derivative(std::shared_ptr<const ModelSpec> spec, double x, double y, double q,
                                       const StoppingSpec& stop, const SampleConfig& cfg);

// Tabulated l(z) = L_{z, x1}(q) with log-log interpolation.  Below the table it
// uses the strong Markov bound l(z) >= p(z, z0) e^{-q s(z, z0)} (z0/z) l(z0), which
// holds because paths from z reach x1 only by flowing through z0; above it holds
// the last value.
class EllTable {
 public:
  EllTable(std::shared_ptr<const ModelSpec> spec, std::vector<double> y, std::vector<double> values, double q,
           double target);
  double operator()(double z) const;
  bool covers(double z) const { return z >= y_.front() && z <= y_.back(); }
  double q() const { return q_; }
  double target() const { return target_; }
  const std::vector<double>& nodes() const { return y_; }
  const std::vector<double>& values() const { return v_; }

 private:
  std::shared_ptr<const ModelSpec> spec_;
  std::vector<double> y_, v_;
  double q_, target_;
};

EllTable build_ell_table(std::shared_ptr<const ModelSpec> spec, double target, double q, const std::vector<double>& y,
                         const SampleConfig& cfg, const AdaptiveHorizon& policy = {});

struct TiltedEstimate {
  MCEstimate estimate;
  std::size_t extrapolated = 0;  // paths whose end point fell outside the table
};

// E_x[e^{-q t} l(X_t) E_t phi(X_t)] / l(x) with phi = f(z) / (z l(z)), or phi = 1
// when f is empty (the survival functional).
TiltedEstimate tilted_expectation(const ModelSpec& spec, double x, double t, const std::optional<TestFunction>& f,
                                  double q, const EllTable& ell, const SampleConfig& cfg);

}  // namespace gfsim
