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

#include "gfsim/malthus.hpp"

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "format.hpp"
#include "gfsim/numerics.hpp"
#include "gfsim/parallel.hpp"

namespace gfsim {

const char* to_string(TriState s) {
  switch (s) {
    case TriState::pass: return "pass";
    case TriState::fail: return "fail";
    case TriState::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

enum class Sign { above, below, undecided };

const char* sign_name(Sign s) {
  switch (s) {
    case Sign::above: return "above";
    case Sign::below: return "below";
    case Sign::undecided: return "undecided";
  }
  return "";
}

// Sign of L(q) - 1.  Truncation only lowers the estimate, so a significant
// excess is final; a significant deficit also needs a negligible tail.
Sign decide(HittingSample& sample, double q, const BisectionConfig& cfg, std::vector<BisectionStep>& trace) {
  for (;;) {
    const MCEstimate e = sample.laplace(q);
    const double k = cfg.significance;
    Sign s = Sign::undecided;
    bool retry = false;
    if (e.reliable && e.mean - 1.0 > k * e.std_error) {
      s = Sign::above;
    } else if (e.reliable && 1.0 - e.mean > k * e.std_error) {
      const double tail = sample.tail_contribution(q);
      if (tail <= 0.1 * e.std_error) {
        s = Sign::below;
      } else if (sample.horizon() < cfg.horizon.cap && sample.open_paths() > 0) {
        sample.extend_horizon(std::min(2.0 * sample.horizon(), cfg.horizon.cap));
        retry = true;
      }
    } else if (!std::isfinite(e.mean)) {
      // Overflowing weights mean L is astronomically large at this q.
      if (e.mean > 0.0) s = Sign::above;
    } else if (sample.size() < cfg.n_max) {
      sample.extend_paths(std::min(4 * sample.size(), cfg.n_max));
      retry = true;
    }
    if (retry) continue;
    trace.push_back({q, e.mean, e.std_error, e.n_paths, sample.horizon(), sign_name(s)});
    return s;
  }
}

MalthusResult solve_unit_root(std::shared_ptr<const ModelSpec> spec, double x, StoppingSpec stop,
                              const BisectionConfig& cfg, const SampleConfig& base, const std::string& what) {
  if (!spec->validated()) throw ModelError(what + " needs a validated model");
  const double qc = spec->q_c();
  double lo = cfg.q_lo.value_or(-(qc - 1.0));
  double hi = cfg.q_hi.value_or(qc);
  if (!(hi > lo)) throw Error(ErrorCode::invalid_argument, what + ": empty q range");

  SampleConfig sc = base;
  sc.n_paths = cfg.n_initial;
  stop.hit_target = x;
  stop.horizon = initial_horizon(spec, x, stop, sc, cfg.horizon);
  HittingSample sample(spec, x, stop, sc);

  MalthusResult r;
  r.anchor_x = x;
  const Sign s_lo = decide(sample, lo, cfg, r.trace);
  const Sign s_hi = s_lo == Sign::above ? decide(sample, hi, cfg, r.trace) : Sign::undecided;
  if (s_lo != Sign::above || s_hi != Sign::below) {
    std::vector<ScanPoint> curve;
    for (double q : lin_space(lo, hi, std::max<std::size_t>(cfg.scan_points, 2))) {
      const MCEstimate e = sample.laplace(q);
      curve.push_back({q, e.mean, e.std_error});
    }
    std::string msg = what + ": no bracket on [" + detail::num(lo) + ", " + detail::num(hi) + "]: ";
    msg += s_lo != Sign::above ? "estimate is not significantly above 1 at the lower end"
                               : "estimate is not significantly below 1 at the upper end";
    throw BracketError(msg, std::move(curve));
  }

  // An undecided midpoint sits within noise of the root; probe either side of
  // it at half the target width before giving up.
  r.converged = true;
  std::size_t recoveries = 0;
  while (hi - lo > cfg.width) {
    const double mid = 0.5 * (lo + hi);
    const Sign s = decide(sample, mid, cfg, r.trace);
    if (s == Sign::above) {
      lo = mid;
      continue;
    }
    if (s == Sign::below) {
      hi = mid;
      continue;
    }
    const double w = 0.5 * cfg.width;
    const Sign s_left = mid - w > lo ? decide(sample, mid - w, cfg, r.trace) : Sign::above;
    const Sign s_right = mid + w < hi ? decide(sample, mid + w, cfg, r.trace) : Sign::below;
    if (s_left == Sign::above) lo = std::max(lo, mid - w);
    if (s_right == Sign::below) hi = std::min(hi, mid + w);
    if ((s_left != Sign::above && s_right != Sign::below) || ++recoveries > 8) {
      r.converged = hi - lo <= cfg.width;
      break;
    }
  }
  r.q_lo = lo;
  r.q_hi = hi;
  r.lambda_hat = 0.5 * (lo + hi);
  r.L_at_lambda = sample.laplace(r.lambda_hat);
  r.L_prime_at_lambda = sample.laplace_derivative(r.lambda_hat);
  r.final_horizon = sample.horizon();
  r.final_paths = sample.size();

  const double slack = cfg.significance * r.L_at_lambda.std_error + r.L_prime_at_lambda.mean * r.half_width();
  const bool derivative_ok = r.L_prime_at_lambda.reliable && std::isfinite(r.L_prime_at_lambda.mean);
  if (!r.converged) {
    r.condition = TriState::inconclusive;
  } else if (std::abs(r.L_at_lambda.mean - 1.0) <= slack && derivative_ok) {
    r.condition = TriState::pass;
  } else if (r.L_at_lambda.mean < 1.0 - slack && r.L_at_lambda.reliable) {
    r.condition = TriState::fail;
  } else {
    r.condition = TriState::inconclusive;
  }
  return r;
}

}  // namespace

MalthusResult solve_malthus(std::shared_ptr<const ModelSpec> spec, double x, const BisectionConfig& cfg,
                            const SampleConfig& sample) {
  StoppingSpec stop;
  stop.max_events = sample.max_events;
  return solve_unit_root(std::move(spec), x, stop, cfg, sample, "malthus exponent");
}

ExponentialConditionResult check_exponential_condition(std::shared_ptr<const ModelSpec> spec, double x,
                                                       double lambda_hat, const SampleConfig& sample,
                                                       const AdaptiveHorizon& horizon,
                                                       const std::vector<double>& ladder) {
  ExponentialConditionResult out;
  StoppingSpec stop;
  stop.hit_target = x;
  stop.max_events = sample.max_events;
  stop.horizon = initial_horizon(spec, x, stop, sample, horizon);
  HittingSample hs(spec, x, stop, sample);
  std::size_t divergent = 0;
  for (double delta : ladder) {
    if (!(delta > 0.0)) continue;
    const double q = lambda_hat - delta;
    const bool converged = hs.adapt_horizon(q, horizon.cap);
    const MCEstimate e = hs.laplace(q);
    out.ladder.push_back({delta, q, e, converged});
    if (converged && e.reliable && std::isfinite(e.mean)) {
      out.status = TriState::pass;
      return out;
    }
    ++divergent;
  }
  out.status = (divergent > 0 && divergent == out.ladder.size()) ? TriState::fail : TriState::inconclusive;
  return out;
}

// ------------------------------------------------------------------ profile

double ProfileResult::h_at(double x) const {
  if (x <= y.front()) return h.front();
  if (x >= y.back()) return h.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), x) - y.begin()) - 1;
  const double w = std::log(x / y[k]) / std::log(y[k + 1] / y[k]);
  return std::exp((1.0 - w) * std::log(h[k]) + w * std::log(h[k + 1]));
}

double ProfileResult::pair(const TestFunction& f, std::size_t refine) const {
  // Interpolate nu log-linearly between usable nodes, then trapezoid on a fine grid.
  std::vector<double> ys, ns;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!flagged[i] && nu[i] > 0.0) {
      ys.push_back(y[i]);
      ns.push_back(nu[i]);
    }
  if (ys.size() < 2) return 0.0;
  std::vector<double> parts;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double r = std::log(ys[k + 1] / ys[k]);
    double prev_z = ys[k];
    double prev_v = ns[k] * f(ys[k]);
    for (std::size_t j = 1; j <= refine; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(refine);
      const double z = ys[k] * std::exp(w * r);
      const double v = std::exp((1.0 - w) * std::log(ns[k]) + w * std::log(ns[k + 1])) * f(z);
      parts.push_back(0.5 * (v + prev_v) * (z - prev_z));
      prev_z = z;
      prev_v = v;
    }
  }
  return pairwise_sum(parts);
}

ProfileResult compute_profile(std::shared_ptr<const ModelSpec> spec, double lambda_hat, double x0,
                              const std::vector<double>& y_grid, const SampleConfig& sample,
                              const AdaptiveHorizon& horizon) {
  if (y_grid.size() < 2) throw Error(ErrorCode::invalid_argument, "profile needs at least two grid points");
  for (std::size_t i = 1; i < y_grid.size(); ++i)
    if (!(y_grid[i] > y_grid[i - 1])) throw Error(ErrorCode::invalid_argument, "profile grid must increase");
  ProfileResult p;
  p.x0 = x0;
  p.lambda_hat = lambda_hat;
  p.y = y_grid;
  const std::size_t n = y_grid.size();
  p.h.resize(n);
  p.h_se.resize(n);
  p.nu.assign(n, 0.0);
  p.nu_se.assign(n, 0.0);
  p.flagged.assign(n, false);

  const std::uint64_t seed_h = derive_seed(sample.seed, "profile-h");
  for (std::size_t i = 0; i < n; ++i) {
    SampleConfig c = sample;
    c.seed = seed_h;
    c.first_index = sample.first_index + i * sample.n_paths;
    StoppingSpec to_x0;
    to_x0.hit_target = x0;
    to_x0.max_events = sample.max_events;
    to_x0.horizon = initial_horizon(spec, y_grid[i], to_x0, c, horizon);
    HittingSample a(spec, y_grid[i], to_x0, c);
    a.adapt_horizon(lambda_hat, horizon.cap);
    const MCEstimate L = a.laplace(lambda_hat);
    p.h[i] = y_grid[i] * L.mean;
    p.h_se[i] = y_grid[i] * L.std_error;
    if (!L.reliable || !(p.h[i] > 0.0)) p.flagged[i] = true;
  }

  // Cycle formula from x0: nu(y) = E[sum over up-crossings tau of y before
  // H(x0) of e^{-q tau} E_tau] / (y c(y) |L'_{x0,x0}(q)|).
  SampleConfig c = sample;
  c.seed = derive_seed(sample.seed, "profile-cycle");
  StoppingSpec cycle;
  cycle.hit_target = x0;
  cycle.max_events = sample.max_events;
  cycle.horizon = initial_horizon(spec, x0, cycle, c, horizon);
  {
    HittingSample probe(spec, x0, cycle, c);
    probe.adapt_horizon(lambda_hat, horizon.cap);
    cycle.horizon = probe.horizon();
  }
  const std::size_t m = sample.n_paths;
  std::vector<double> crossings(m * n, 0.0), cycle_length(m, 0.0);
  std::vector<std::uint8_t> excluded(m, 0);
  const auto& growth = spec->growth();
  parallel_for(0, m, sample.workers, [&](std::size_t k) {
    PathSimulator sim(*spec, x0, RngStream(c.seed, c.first_index + k), true);
    const StopReason reason = sim.run(cycle);
    if (reason == StopReason::max_events) {
      excluded[k] = 1;
      return;
    }
    double u = x0, t0 = 0.0, log_w = 0.0;
    auto segment = [&](double v) {
      auto it = std::lower_bound(y_grid.begin(), y_grid.end(), u);
      for (; it != y_grid.end() && *it < v; ++it) {
        const double tau = t0 + travel_time(*spec, u, *it);
        crossings[static_cast<std::size_t>(it - y_grid.begin()) * m + k] +=
            std::exp(log_w + std::log(*it / u) - lambda_hat * tau);
      }
    };
    for (const JumpEvent& e : sim.event_log()) {
      segment(e.pre);
      log_w += std::log(e.pre / u);
      u = e.post;
      t0 = e.time;
    }
    segment(sim.position());
    if (reason == StopReason::hit_target)
      cycle_length[k] = sim.time() * std::exp(sim.log_weight() - lambda_hat * sim.time());
  });
  std::vector<double> kept;
  kept.reserve(m);
  for (std::size_t k = 0; k < m; ++k)
    if (!excluded[k]) kept.push_back(cycle_length[k]);
  const SampleStats D = sample_stats(kept);
  p.cycle_derivative = D.mean;
  if (!(D.mean > 0.0)) throw Error(ErrorCode::numeric_error, "profile: no cycle returned to x0 within the horizon");
  for (std::size_t i = 0; i < n; ++i) {
    kept.clear();
    for (std::size_t k = 0; k < m; ++k)
      if (!excluded[k]) kept.push_back(crossings[i * m + k]);
    const SampleStats s = sample_stats(kept);
    const double scale = 1.0 / (y_grid[i] * growth.evaluate(y_grid[i]) * D.mean);
    p.nu[i] = s.mean * scale;
    p.nu_se[i] = s.std_error * scale;
    if (!(p.nu[i] > 0.0) || p.nu_se[i] > kUnreliableRelativeError * p.nu[i]) p.flagged[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (p.flagged[i]) spdlog::warn("profile: unreliable estimate at y={}", y_grid[i]);

  std::vector<double> parts;
  std::size_t prev = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.flagged[i]) continue;
    if (prev < n)
      parts.push_back(0.5 * (p.nu[i] * p.h[i] + p.nu[prev] * p.h[prev]) * (p.y[i] - p.y[prev]));
    prev = i;
  }
  p.normalization = pairwise_sum(parts);
  return p;
}

// --------------------------------------------------------------- restricted

RestrictedResult restricted_exponent(std::shared_ptr<const ModelSpec> spec, const RestrictedWindow& window,
                                     const BisectionConfig& cfg, const SampleConfig& sample,
                                     std::optional<MalthusResult> reference) {
  StoppingSpec stop;
  stop.max_events = sample.max_events;
  if (window.mode == RestrictedWindow::Mode::lower) {
    if (!(window.barrier < window.anchor)) throw Error(ErrorCode::invalid_argument, "lower window needs a < b'");
    stop.lower_barrier = window.barrier;
  } else {
    if (!(window.anchor < window.barrier)) throw Error(ErrorCode::invalid_argument, "upper window needs a' < b''");
    stop.upper_exit = window.barrier;
  }
  RestrictedResult out{solve_unit_root(std::move(spec), window.anchor, stop, cfg, sample, "restricted exponent"),
                       std::nullopt};
  if (reference) out.below_malthus = out.solve.q_hi <= reference->q_lo;
  return out;
}

// ------------------------------------------------------------- growth fit

std::vector<MCEstimate> semigroup_trajectory(const ModelSpec& spec, double x, const TestFunction& f,
                                             const std::vector<double>& t_grid, const SampleConfig& sample) {
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    if (t_grid[j] < 0.0 || (j > 0 && !(t_grid[j] > t_grid[j - 1])))
      throw Error(ErrorCode::invalid_argument, "time grid must be nonnegative and increasing");
  const std::size_t n = sample.n_paths;
  const std::size_t m = t_grid.size();
  std::vector<double> v(n * m, 0.0);
  std::vector<std::uint8_t> excluded(n, 0);
  parallel_for(0, n, sample.workers, [&](std::size_t i) {
    PathSimulator sim(spec, x, RngStream(sample.seed, sample.first_index + i));
    StoppingSpec stop;
    stop.max_events = sample.max_events;
    for (std::size_t j = 0; j < m; ++j) {
      if (t_grid[j] > 0.0) {
        stop.horizon = t_grid[j];
        if (sim.run(stop) == StopReason::max_events) {
          excluded[i] = 1;
          return;
        }
      }
      const double z = sim.position();
      v[j * n + i] = x * std::exp(sim.log_weight()) * f(z) / z;
    }
  });
  std::vector<MCEstimate> out;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> col;
    col.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!excluded[i]) col.push_back(v[j * n + i]);
    const SampleStats st = sample_stats(col);
    MCEstimate e;
    e.mean = st.mean;
    e.std_error = st.std_error;
    e.n_paths = col.size();
    e.max_events_fraction = static_cast<double>(n - col.size()) / static_cast<double>(std::max<std::size_t>(n, 1));
    e.seed = {sample.seed, sample.first_index};
    e.reliable = std::isfinite(e.mean) && !(e.mean != 0.0 && e.std_error > kUnreliableRelativeError * std::abs(e.mean));
    out.push_back(e);
  }
  return out;
}

GrowthFit fit_growth_rate(const ModelSpec& spec, double x, const TestFunction& f, const std::vector<double>& t_grid,
                          const SampleConfig& sample) {
  if (t_grid.size() < 4) throw Error(ErrorCode::invalid_argument, "growth fit needs at least 4 times");
  GrowthFit fit;
  fit.t = t_grid;
  fit.estimates = semigroup_trajectory(spec, x, f, t_grid, sample);
  std::vector<double> ts, ls;
  for (std::size_t j = t_grid.size() / 2; j < t_grid.size(); ++j) {
    if (!(fit.estimates[j].mean > 0.0))
      throw Error(ErrorCode::numeric_error,
                  "growth fit: nonpositive semigroup estimate at t=" + detail::num(t_grid[j]) +
                      " (increase the number of paths or the time range)");
    ts.push_back(t_grid[j]);
    ls.push_back(std::log(fit.estimates[j].mean));
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    mt += ts[j] / n;
    ml += ls[j] / n;
  }
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    stt += (ts[j] - mt) * (ts[j] - mt);
    stl += (ts[j] - mt) * (ls[j] - ml);
    sll += (ls[j] - ml) * (ls[j] - ml);
  }
  fit.rho_hat = stl / stt;
  fit.r_squared = sll > 0.0 ? (stl * stl) / (stt * sll) : 1.0;
  return fit;
}

}  // namespace gfsim
