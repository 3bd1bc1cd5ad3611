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

#include "gfsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "format.hpp"
#include "gfsim/criteria.hpp"
#include "gfsim/error.hpp"
#include "gfsim/malthus.hpp"
#include "gfsim/numerics.hpp"
#include "gfsim/pdmp.hpp"
#include "gfsim/spectral_grid.hpp"

#ifndef GFSIM_VERSION
#define GFSIM_VERSION "0.0.0"
#endif

namespace gfsim {

const char* version_string() { return GFSIM_VERSION; }

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"validate", "simulate", "semigroup", "laplace", "malthus",
                                              "profile",  "criteria", "oracle",    "compare"};
  return names;
}

namespace {

using detail::num;

std::string hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Context {
  const Json& cfg;
  RunSettings settings;
  std::shared_ptr<const ModelSpec> spec;
  std::filesystem::path out_dir;
  RunResult result;

  Json section(const char* name) const { return cfg.contains(name) ? cfg[name] : Json::object(); }

  SampleConfig sample(const std::string& label, std::size_t n_paths) const {
    SampleConfig s;
    s.n_paths = n_paths;
    s.seed = derive_seed(settings.seed, label);
    s.workers = settings.workers;
    s.max_events = settings.max_events;
    return s;
  }

  Json provenance() const {
    return Json{{"tool", "gfsim"},
                {"version", version_string()},
                {"model_hash", hex(spec->hash())},
                {"model", spec->canonical()},
                {"seed", settings.seed}};
  }

  std::ofstream open(const std::string& file) {
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
    result.artifacts.push_back(path.string());
    return out;
  }

  void write_json(const std::string& file, Json doc) {
    doc["provenance"] = provenance();
    auto out = open(file);
    out << doc.dump(2) << '\n';
  }

  std::ofstream csv(const std::string& file, const std::string& columns) {
    auto out = open(file);
    out << "# gfsim " << version_string() << '\n';
    out << "# model_hash=" << hex(spec->hash()) << '\n';
    out << "# seed=" << settings.seed << '\n';
    out << columns << '\n';
    return out;
  }
};

Json estimate_json(const MCEstimate& e) {
  return Json{{"mean", e.mean},
              {"se", e.std_error},
              {"n", e.n_paths},
              {"censored_fraction", e.censored_fraction},
              {"truncated_fraction", e.truncated_fraction},
              {"max_events_fraction", e.max_events_fraction},
              {"reliable", e.reliable},
              {"seed", e.seed.master_seed},
              {"first_index", e.seed.first_index}};
}

std::vector<double> numbers(const Json& sec, const char* key, std::vector<double> fallback) {
  return sec.contains(key) ? sec[key].get<std::vector<double>>() : fallback;
}

GridConfig grid_config(std::size_t nodes) {
  GridConfig g;
  g.n_nodes = nodes;
  return g;
}

double geometric_mid(const ModelSpec& spec) { return std::sqrt(spec.domain().x_min * spec.domain().x_max); }

AdaptiveHorizon horizon_policy(const Json& sec) {
  AdaptiveHorizon h;
  h.cap = static_cast<double>(sec.value("horizon_cap", static_cast<std::uint64_t>(h.cap)));
  h.pilot_paths = sec.value("pilot_paths", h.pilot_paths);
  return h;
}

BisectionConfig bisection_config(const Json& sec) {
  BisectionConfig b;
  if (sec.contains("q_lo")) b.q_lo = sec["q_lo"].get<double>();
  if (sec.contains("q_hi")) b.q_hi = sec["q_hi"].get<double>();
  b.width = sec.value("width", b.width);
  b.n_initial = sec.value("n_initial", b.n_initial);
  b.n_max = sec.value("n_max", b.n_max);
  b.significance = sec.value("significance", b.significance);
  b.horizon = horizon_policy(sec);
  return b;
}

Json malthus_json(const MalthusResult& m) {
  Json trace = Json::array();
  for (const auto& s : m.trace)
    trace.push_back({{"q", s.q}, {"mean", s.mean}, {"se", s.std_error}, {"n", s.n_paths}, {"horizon", s.horizon},
                     {"decision", s.decision}});
  return Json{{"lambda_hat", m.lambda_hat},
              {"q_lo", m.q_lo},
              {"q_hi", m.q_hi},
              {"half_width", m.half_width()},
              {"anchor_x", m.anchor_x},
              {"converged", m.converged},
              {"condition", to_string(m.condition)},
              {"L_at_lambda", estimate_json(m.L_at_lambda)},
              {"L_prime_at_lambda", estimate_json(m.L_prime_at_lambda)},
              {"final_horizon", m.final_horizon},
              {"final_paths", m.final_paths},
              {"trace", trace}};
}

MalthusResult solve_from_config(Context& ctx) {
  const Json sec = ctx.section("malthus");
  const double x = sec.value("x", 1.0);
  return solve_malthus(ctx.spec, x, bisection_config(sec), ctx.sample("malthus", sec.value("n_initial", 10'000u)));
}

// ------------------------------------------------------------ subcommands

void cmd_validate(Context& ctx, ModelSpec& raw) {
  const ValidationReport rep = validate_model(raw);
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"advisory", c.advisory}, {"residual", c.residual},
                      {"detail", c.detail}});
  Json doc{{"valid", rep.valid()}, {"checks", checks}};
  ctx.write_json("validate.json", doc);
  if (!rep.valid()) {
    ctx.result.exit_code = ExitCode::invalid_model;
    for (const auto& c : rep.checks)
      if (!c.passed && !c.advisory) {
        ctx.result.message = "check '" + c.name + "' failed (residual " + num(c.residual) + ")";
        break;
      }
  }
}

void cmd_simulate(Context& ctx) {
  const Json sec = ctx.section("simulate");
  const double x0 = sec.value("x0", geometric_mid(*ctx.spec));
  const double horizon = sec.value("horizon", 10.0);
  const std::size_t n = sec.value("n_paths", 10u);
  const std::uint64_t seed = derive_seed(ctx.settings.seed, "simulate");
  auto events = ctx.csv("simulate_events.csv", "path,t,pre,post");
  auto paths = ctx.csv("simulate_paths.csv", "path,final_time,final_position,log_weight,telescoping_log_weight,stop_reason,events");
  StoppingSpec stop;
  stop.horizon = horizon;
  stop.max_events = ctx.settings.max_events;
  for (std::size_t i = 0; i < n; ++i) {
    const Path p = simulate_path(*ctx.spec, x0, stop, RngStream(seed, i));
    for (const auto& e : p.events) events << i << ',' << num(e.time) << ',' << num(e.pre) << ',' << num(e.post) << '\n';
    paths << i << ',' << num(p.final_time) << ',' << num(p.final_position) << ',' << num(p.log_weight) << ','
          << num(p.telescoping_log_weight()) << ',' << to_string(p.stop_reason) << ',' << p.events.size() << '\n';
  }
}

void cmd_semigroup(Context& ctx) {
  const Json sec = ctx.section("semigroup");
  const auto xs = numbers(sec, "x", {geometric_mid(*ctx.spec)});
  const auto ts = numbers(sec, "t", {1.0});
  const TestFunction f = sec.contains("f") ? parse_test_function(sec["f"], "semigroup.f") : TestFunction::identity();
  const SampleConfig base = ctx.sample("semigroup", sec.value("n_paths", 10'000u));
  auto out = ctx.csv("semigroup.csv", "x,t,mean,se,n,censored_fraction,seed");
  Json rows = Json::array();
  bool unreliable = false;
  std::size_t block = 0;
  for (double x : xs)
    for (double t : ts) {
      SampleConfig sc = base;
      sc.first_index = block++ * base.n_paths;
      const MCEstimate e = estimate_semigroup(*ctx.spec, x, t, f, sc);
      unreliable |= !e.reliable;
      out << num(x) << ',' << num(t) << ',' << num(e.mean) << ',' << num(e.std_error) << ',' << e.n_paths << ','
          << num(e.censored_fraction) << ',' << sc.seed << '\n';
      Json r = estimate_json(e);
      r["x"] = x;
      r["t"] = t;
      rows.push_back(r);
    }
  ctx.write_json("semigroup.json", Json{{"estimates", rows}});
  if (unreliable) ctx.result.exit_code = ExitCode::unreliable;
}

void cmd_laplace(Context& ctx) {
  const Json sec = ctx.section("laplace");
  const auto xs = numbers(sec, "x", {1.0});
  const auto ys = numbers(sec, "y", {1.0});
  auto qs = numbers(sec, "q", {ctx.spec->q_c() - 1.0});
  std::sort(qs.begin(), qs.end());
  const bool derivative = sec.value("derivative", true);
  const AdaptiveHorizon policy = horizon_policy(sec);
  const SampleConfig base = ctx.sample("laplace", sec.value("n_paths", 10'000u));
  const std::string cols = "x,y,q,mean,se,n,censored_fraction,seed";
  auto out = ctx.csv("laplace.csv", cols);
  std::ofstream dout;
  if (derivative) dout = ctx.csv("laplace_derivative.csv", cols);
  Json rows = Json::array();
  bool unreliable = false;
  std::size_t block = 0;
  for (double x : xs)
    for (double y : ys) {
      SampleConfig sc = base;
      sc.first_index = block++ * base.n_paths;
      StoppingSpec stop;
      stop.hit_target = y;
      stop.max_events = ctx.settings.max_events;
      stop.horizon = initial_horizon(ctx.spec, x, stop, sc, policy);
      HittingSample hs(ctx.spec, x, stop, sc);
      for (double q : qs) {
        const bool tail_ok = hs.adapt_horizon(q, policy.cap);
        const MCEstimate e = hs.laplace(q);
        unreliable |= !e.reliable || !tail_ok;
        out << num(x) << ',' << num(y) << ',' << num(q) << ',' << num(e.mean) << ',' << num(e.std_error) << ','
            << e.n_paths << ',' << num(e.censored_fraction) << ',' << sc.seed << '\n';
        Json r{{"x", x}, {"y", y}, {"q", q}, {"horizon", hs.horizon()}, {"tail_converged", tail_ok},
               {"laplace", estimate_json(e)}};
        if (derivative) {
          const MCEstimate d = hs.laplace_derivative(q);
          dout << num(x) << ',' << num(y) << ',' << num(q) << ',' << num(d.mean) << ',' << num(d.std_error) << ','
               << d.n_paths << ',' << num(d.censored_fraction) << ',' << sc.seed << '\n';
          r["derivative"] = estimate_json(d);
        }
        rows.push_back(r);
      }
    }
  ctx.write_json("laplace.json", Json{{"estimates", rows}});
  if (unreliable) ctx.result.exit_code = ExitCode::unreliable;
}

void cmd_malthus(Context& ctx) {
  const Json sec = ctx.section("malthus");
  MalthusResult m;
  try {
    m = solve_from_config(ctx);
  } catch (const BracketError& e) {
    Json curve = Json::array();
    for (const auto& p : e.curve()) curve.push_back({{"q", p.q}, {"mean", p.mean}, {"se", p.std_error}});
    ctx.write_json("malthus.json", Json{{"error", "bracket_failure"}, {"message", e.what()}, {"curve", curve}});
    throw;
  }
  Json doc = malthus_json(m);
  if (sec.value("exponential_condition", true) && m.condition == TriState::pass) {
    const auto ladder = numbers(sec, "ladder", default_delta_ladder());
    const auto ec = check_exponential_condition(ctx.spec, m.anchor_x, m.lambda_hat,
                                                ctx.sample("exponential-condition", sec.value("n_initial", 10'000u)),
                                                horizon_policy(sec), ladder);
    Json pts = Json::array();
    for (const auto& p : ec.ladder)
      pts.push_back({{"delta", p.delta}, {"q", p.q}, {"horizon_converged", p.horizon_converged},
                     {"estimate", estimate_json(p.estimate)}});
    doc["exponential_condition"] = {{"status", to_string(ec.status)}, {"ladder", pts}};
  }
  ctx.write_json("malthus.json", doc);
  if (m.condition != TriState::pass || !m.converged) {
    ctx.result.exit_code = ExitCode::unreliable;
    ctx.result.message = "Malthus condition " + std::string(to_string(m.condition));
  }
}

void cmd_profile(Context& ctx) {
  const Json sec = ctx.section("profile");
  const double x0 = sec.value("x0", geometric_mid(*ctx.spec));
  double lambda = 0.0;
  if (sec.contains("lambda")) {
    lambda = sec["lambda"].get<double>();
  } else {
    const MalthusResult m = solve_from_config(ctx);
    if (m.condition != TriState::pass) {
      ctx.result.exit_code = ExitCode::unreliable;
      ctx.result.message = "Malthus condition not established; profile not computed";
      ctx.write_json("profile.json", Json{{"malthus", malthus_json(m)}, {"computed", false}});
      return;
    }
    lambda = m.lambda_hat;
  }
  const auto& d = ctx.spec->domain();
  const double y_min = sec.value("y_min", std::sqrt(d.x_min * x0));
  const double y_max = sec.value("y_max", std::sqrt(x0 * d.x_max));
  const std::size_t points = sec.value("points", 33u);
  const auto grid = log_space(y_min, y_max, points);
  const auto p = compute_profile(ctx.spec, lambda, x0, grid, ctx.sample("profile", sec.value("n_paths", 10'000u)),
                                 horizon_policy(sec));
  auto h = ctx.csv("profile_h.csv", "y,h,se");
  auto nu = ctx.csv("profile_nu.csv", "y,nu,nu_se,flagged");
  bool flagged = false;
  for (std::size_t i = 0; i < p.y.size(); ++i) {
    h << num(p.y[i]) << ',' << num(p.h[i]) << ',' << num(p.h_se[i]) << '\n';
    nu << num(p.y[i]) << ',' << num(p.nu[i]) << ',' << num(p.nu_se[i]) << ',' << (p.flagged[i] ? 1 : 0) << '\n';
    flagged |= p.flagged[i];
  }
  ctx.write_json("profile.json",
                 Json{{"computed", true},
                      {"x0", x0},
                      {"lambda", lambda},
                      {"normalization", p.normalization},
                      {"cycle_derivative", p.cycle_derivative},
                      {"flagged_points", std::count(p.flagged.begin(), p.flagged.end(), true)}});
  if (flagged) ctx.result.exit_code = ExitCode::unreliable;
}

Json limit_json(const BoundaryLimit& b) {
  return Json{{"estimate", b.estimate}, {"window_sups", b.window_sups}, {"trend", b.trend},
              {"converged", b.converged}, {"inconclusive", b.inconclusive}};
}

Json tail_json(const FosterTail& t) {
  Json j{{"status", to_string(t.status)}, {"worst", t.worst},     {"worst_x", t.worst_x},
         {"panel_agreement", t.panel_agreement}, {"x", t.x}, {"normalized_drift", t.drift},
         {"reduction_agreement", t.reduction_agreement}};
  j["reduction"] = t.reduction ? Json(*t.reduction) : Json();
  return j;
}

void cmd_criteria(Context& ctx) {
  const Json sec = ctx.section("criteria");
  MalthusResult m = solve_from_config(ctx);
  FosterInputs in;
  in.r = sec.value("r", in.r);
  in.q = sec.value("q", in.q);
  in.x_inf = sec.value("x_inf", 0.0);
  in.x_0 = sec.value("x_0", 0.0);
  FosterConfig fc;
  fc.points = sec.value("points", fc.points);
  fc.panels = sec.value("panels", fc.panels);
  const Recommendation rec = recommend(*ctx.spec, m, in, fc);
  Json doc{{"verdict", to_string(rec.verdict)},
           {"message", rec.message},
           {"malthus", malthus_json(m)},
           {"boundary",
            {{"status", to_string(rec.boundary.status)},
             {"threshold", rec.boundary.threshold},
             {"at_zero", limit_json(rec.boundary.at_zero)},
             {"at_infinity", limit_json(rec.boundary.at_infinity)}}},
           {"limits_at_infimum",
            {{"holds", rec.limits.holds},
             {"at_zero", rec.limits.at_zero},
             {"at_infinity", rec.limits.at_infinity},
             {"infimum", rec.limits.infimum},
             {"linear", rec.limits.linear}}},
           {"foster", {{"r", in.r}, {"q", in.q}, {"large", tail_json(rec.foster.large)}, {"small", tail_json(rec.foster.small)}}},
           {"composite", rec.composite}};
  ctx.write_json("criteria.json", doc);
  if (rec.verdict == Verdict::inconclusive) ctx.result.exit_code = ExitCode::unreliable;
}

std::vector<std::pair<double, double>> windows_from(const Json& sec, const ModelSpec& spec) {
  std::vector<std::pair<double, double>> w;
  if (sec.contains("windows")) {
    for (const auto& e : sec["windows"]) w.emplace_back(e[0].get<double>(), e[1].get<double>());
    return w;
  }
  const double m = geometric_mid(spec);
  const auto& d = spec.domain();
  for (double r = 2.0; m / r > d.x_min && m * r < d.x_max; r *= 2.0) w.emplace_back(m / r, m * r);
  if (w.empty()) throw ConfigError("working domain too narrow for the default window chain; set windows");
  return w;
}

void cmd_oracle(Context& ctx) {
  const Json sec = ctx.section("oracle");
  const GridOperator op = build_operator(*ctx.spec, grid_config(sec.value("nodes", std::size_t{512})));
  const auto wins = windows_from(sec, *ctx.spec);
  const auto eig = eigen_sweep(op, wins, ctx.settings.workers);
  auto out = ctx.csv("oracle_eigen.csv", "a,b,rho_ab,residual");
  for (const auto& e : eig)
    out << num(e.interval.first) << ',' << num(e.interval.second) << ',' << num(e.rho_ab) << ',' << num(e.residual) << '\n';
  const auto ts = numbers(sec, "t", {});
  if (!ts.empty()) {
    const TestFunction f = sec.contains("f") ? parse_test_function(sec["f"], "oracle.f") : TestFunction::tent(1.0, 2.0);
    const auto vals = step_semigroup(op, f, ts);
    auto s = ctx.csv("oracle_semigroup.csv", "x,t,value");
    for (std::size_t k = 0; k < ts.size(); ++k)
      for (std::size_t i = 0; i < op.size(); ++i)
        s << num(op.nodes()[i]) << ',' << num(ts[k]) << ',' << num(vals[k][i]) << '\n';
  }
}

void cmd_compare(Context& ctx) {
  const Json sec = ctx.section("compare");
  const double k = sec.value("significance", 3.0);
  const double budget = sec.value("budget", 0.02);
  Json doc;
  bool all = true;

  // Semigroup agreement.
  {
    const GridOperator op = build_operator(*ctx.spec, grid_config(sec.value("semigroup_nodes", std::size_t{2048})));
    const auto xs = numbers(sec, "x", {0.5, 1.0, 2.0});
    const auto ts = numbers(sec, "t", {1.0, 2.0, 5.0});
    const TestFunction f = sec.contains("f") ? parse_test_function(sec["f"], "compare.f") : TestFunction::tent(1.0, 2.0);
    const auto grid = step_semigroup(op, f, ts);
    const SampleConfig base = ctx.sample("compare-semigroup", sec.value("n_paths", 100'000u));
    Json rows = Json::array();
    std::size_t block = 0;
    bool ok = true;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      double sup = 0.0;
      for (double v : grid[j]) sup = std::max(sup, std::abs(v));
      for (double x : xs) {
        SampleConfig sc = base;
        sc.first_index = block++ * base.n_paths;
        const MCEstimate e = estimate_semigroup(*ctx.spec, x, ts[j], f, sc);
        const double g = grid_value(op, grid[j], x);
        const double tol = k * e.std_error + budget * sup;
        const bool pass = std::abs(e.mean - g) <= tol;
        ok &= pass;
        rows.push_back({{"x", x}, {"t", ts[j]}, {"mc", estimate_json(e)}, {"grid", g}, {"tolerance", tol}, {"pass", pass}});
      }
    }
    doc["semigroup"] = {{"pass", ok}, {"rows", rows}};
    all &= ok;
  }

  // Malthus exponent against the nested-window sup of rho_{a,b}.
  const MalthusResult m = solve_from_config(ctx);
  doc["malthus"] = malthus_json(m);
  {
    const GridOperator op = build_operator(*ctx.spec, grid_config(sec.value("nodes", std::size_t{512})));
    const auto eig = eigen_sweep(op, windows_from(sec, *ctx.spec), ctx.settings.workers);
    double sup = -std::numeric_limits<double>::infinity();
    Json ws = Json::array();
    for (const auto& e : eig) {
      sup = std::max(sup, e.rho_ab);
      ws.push_back({{"a", e.interval.first}, {"b", e.interval.second}, {"rho_ab", e.rho_ab}});
    }
    const double tol = sec.value("malthus_tolerance", 0.05) * (1.0 + std::abs(m.lambda_hat));
    const bool pass = std::abs(m.lambda_hat - sup) <= tol;
    doc["eigen"] = {{"windows", ws}, {"sup_rho", sup}, {"tolerance", tol}, {"pass", pass}};
    all &= pass;
  }

  // Empirical growth rate against lambda_hat.
  {
    const double x = sec.value("fit_x", 1.0);
    const auto t_grid = numbers(sec, "fit_t", {2.0, 4.0, 6.0, 8.0, 10.0, 12.0});
    const TestFunction f =
        sec.contains("fit_f") ? parse_test_function(sec["fit_f"], "compare.fit_f") : TestFunction::identity();
    const GrowthFit fit =
        fit_growth_rate(*ctx.spec, x, f, t_grid, ctx.sample("compare-fit", sec.value("n_paths", 100'000u)));
    const double tol = sec.value("fit_tolerance", 0.05);
    const bool pass = std::abs(fit.rho_hat - m.lambda_hat) <= tol;
    doc["growth_fit"] = {{"rho_hat", fit.rho_hat}, {"r_squared", fit.r_squared}, {"tolerance", tol}, {"pass", pass}};
    all &= pass;
  }
  doc["pass"] = all;
  ctx.write_json("compare.json", doc);
  if (!all) {
    ctx.result.exit_code = ExitCode::compare_failure;
    ctx.result.message = "agreement suite failed";
  }
}

ExitCode code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_argument:
    case ErrorCode::domain_error: return ExitCode::config_error;
    case ErrorCode::invalid_model: return ExitCode::invalid_model;
    default: return ExitCode::runtime_error;
  }
}

}  // namespace

RunResult run_subcommand(const std::string& subcommand, const Json& cfg) {
  RunResult fail;
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    fail.exit_code = ExitCode::config_error;
    fail.message = "unknown subcommand '" + subcommand + "'";
    return fail;
  }
  try {
    check_schema(cfg);
    ModelSpec raw = build_model(cfg);
    Context ctx{cfg, run_settings(cfg), nullptr, {}, {}};
    ctx.out_dir = ctx.settings.output_dir;
    if (subcommand == "validate") {
      ctx.spec = std::make_shared<const ModelSpec>(raw);
      cmd_validate(ctx, raw);
      return ctx.result;
    }
    ctx.spec = validated(raw);
    static const std::map<std::string, std::function<void(Context&)>> table{
        {"simulate", cmd_simulate}, {"semigroup", cmd_semigroup}, {"laplace", cmd_laplace},
        {"malthus", cmd_malthus},   {"profile", cmd_profile},     {"criteria", cmd_criteria},
        {"oracle", cmd_oracle},     {"compare", cmd_compare}};
    table.at(subcommand)(ctx);
    return ctx.result;
  } catch (const Error& e) {
    fail.exit_code = code_for(e);
    fail.message = e.what();
  } catch (const std::exception& e) {
    fail.exit_code = ExitCode::runtime_error;
    fail.message = e.what();
  }
  spdlog::error("{}: {}", subcommand, fail.message);
  return fail;
}

}  // namespace gfsim
