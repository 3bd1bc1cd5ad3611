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

#include "gfsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "gfsim/error.hpp"

namespace gfsim {

namespace {

enum class Kind { number, integer, boolean, string, number_array, window_array, test_function, object };

struct Field {
  const char* key;
  Kind kind;
};

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::number: return "a number";
    case Kind::integer: return "a non-negative integer";
    case Kind::boolean: return "a boolean";
    case Kind::string: return "a string";
    case Kind::number_array: return "an array of numbers";
    case Kind::window_array: return "an array of [a, b] pairs";
    case Kind::test_function: return "a test function object";
    case Kind::object: return "an object";
  }
  return "?";
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void check_test_function(const Json& j, const std::string& where);

bool kind_matches(const Json& v, Kind k, const std::string& where) {
  switch (k) {
    case Kind::number: return v.is_number();
    case Kind::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::boolean: return v.is_boolean();
    case Kind::string: return v.is_string();
    case Kind::number_array:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
    case Kind::window_array:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) return false;
      return true;
    case Kind::test_function:
      if (!v.is_object()) return false;
      check_test_function(v, where);
      return true;
    case Kind::object: return v.is_object();
  }
  return false;
}

void check_fields(const Json& j, const std::string& where, const std::vector<Field>& fields,
                  const std::vector<const char*>& required = {}) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const Field* f = nullptr;
    for (const auto& cand : fields)
      if (key == cand.key) f = &cand;
    if (!f) throw ConfigError("unknown key '" + join(where, key) + "'");
    if (!kind_matches(value, f->kind, join(where, key)))
      throw ConfigError("'" + join(where, key) + "' must be " + kind_name(f->kind));
  }
  for (const char* r : required)
    if (!j.contains(r)) throw ConfigError("missing required key '" + join(where, r) + "'");
}

std::string form_of(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (!j.contains("form") || !j["form"].is_string()) throw ConfigError("missing required key '" + where + ".form'");
  return j["form"].get<std::string>();
}

void check_test_function(const Json& j, const std::string& where) {
  const std::string form = form_of(j, where);
  if (form == "identity") {
    check_fields(j, where, {{"form", Kind::string}, {"reciprocal", Kind::boolean}});
  } else if (form == "tent" || form == "indicator") {
    check_fields(j, where, {{"form", Kind::string}, {"lo", Kind::number}, {"hi", Kind::number}, {"reciprocal", Kind::boolean}},
                 {"lo", "hi"});
  } else {
    throw ConfigError("'" + where + ".form' must be one of identity, tent, indicator");
  }
}

void check_rate(const Json& j, const std::string& where) {
  const std::string form = form_of(j, where);
  if (form == "constant") {
    check_fields(j, where, {{"form", Kind::string}, {"value", Kind::number}}, {"value"});
  } else if (form == "hill") {
    check_fields(j, where, {{"form", Kind::string}, {"k_max", Kind::number}, {"x_half", Kind::number}, {"m", Kind::number}},
                 {"k_max", "x_half", "m"});
  } else {
    throw ConfigError("'" + where + ".form' must be constant or hill");
  }
}

void check_density(const Json& j, const std::string& where, bool allow_beta) {
  const std::string form = form_of(j, where);
  if (form == "power") {
    check_fields(j, where, {{"form", Kind::string}, {"coef", Kind::number}, {"theta", Kind::number}}, {"coef", "theta"});
  } else if (form == "beta" && allow_beta) {
    check_fields(j, where, {{"form", Kind::string}, {"a", Kind::number}, {"b", Kind::number}, {"coef", Kind::number}},
                 {"a", "b"});
  } else {
    throw ConfigError("'" + where + ".form' must be " + (allow_beta ? "power or beta" : "power"));
  }
}

void check_growth(const Json& j) {
  check_fields(j, "growth", {{"form", Kind::string}, {"params", Kind::object}}, {"form", "params"});
  const std::string form = j["form"].get<std::string>();
  const Json& p = j["params"];
  if (form == "linear") {
    check_fields(p, "growth.params", {{"a", Kind::number}}, {"a"});
  } else if (form == "power_rational") {
    check_fields(p, "growth.params",
                 {{"coef", Kind::number}, {"alpha", Kind::number}, {"beta", Kind::number}, {"gamma", Kind::number}},
                 {"coef", "alpha", "beta", "gamma"});
  } else if (form == "tabulated") {
    check_fields(p, "growth.params", {{"x", Kind::number_array}, {"c", Kind::number_array}}, {"x", "c"});
  } else {
    throw ConfigError("'growth.form' must be one of linear, power_rational, tabulated");
  }
}

void check_kernel(const Json& j) {
  check_fields(j, "kernel", {{"form", Kind::string}, {"params", Kind::object}}, {"form", "params"});
  const std::string form = j["form"].get<std::string>();
  const Json& p = j["params"];
  if (form == "self_similar") {
    check_fields(p, "kernel.params", {{"total_rate", Kind::object}, {"density", Kind::object}}, {"total_rate", "density"});
    check_rate(p["total_rate"], "kernel.params.total_rate");
    check_density(p["density"], "kernel.params.density", true);
  } else if (form == "general") {
    check_fields(p, "kernel.params", {{"total_rate", Kind::object}, {"density", Kind::object}}, {"density"});
    if (p.contains("total_rate")) check_rate(p["total_rate"], "kernel.params.total_rate");
    check_density(p["density"], "kernel.params.density", false);
  } else {
    throw ConfigError("'kernel.form' must be self_similar or general");
  }
}

void check_sections(const Json& cfg) {
  const std::vector<Field> top{{"name", Kind::string},       {"seed", Kind::integer},    {"workers", Kind::integer},
                               {"max_events", Kind::integer}, {"output", Kind::object},   {"growth", Kind::object},
                               {"kernel", Kind::object},     {"domain", Kind::object},   {"simulate", Kind::object},
                               {"semigroup", Kind::object},  {"laplace", Kind::object},  {"malthus", Kind::object},
                               {"profile", Kind::object},    {"criteria", Kind::object}, {"oracle", Kind::object},
                               {"compare", Kind::object}};
  check_fields(cfg, "", top, {"growth", "kernel", "domain"});
  check_growth(cfg["growth"]);
  check_kernel(cfg["kernel"]);
  check_fields(cfg["domain"], "domain", {{"x_min", Kind::number}, {"x_max", Kind::number}}, {"x_min", "x_max"});
  if (cfg.contains("output")) check_fields(cfg["output"], "output", {{"dir", Kind::string}});
  if (cfg.contains("simulate"))
    check_fields(cfg["simulate"], "simulate",
                 {{"x0", Kind::number}, {"horizon", Kind::number}, {"n_paths", Kind::integer}});
  if (cfg.contains("semigroup"))
    check_fields(cfg["semigroup"], "semigroup",
                 {{"x", Kind::number_array}, {"t", Kind::number_array}, {"f", Kind::test_function},
                  {"n_paths", Kind::integer}});
  const std::vector<Field> bisection{{"x", Kind::number},           {"width", Kind::number},
                                     {"n_initial", Kind::integer},  {"n_max", Kind::integer},
                                     {"q_lo", Kind::number},        {"q_hi", Kind::number},
                                     {"significance", Kind::number}, {"horizon_cap", Kind::integer},
                                     {"pilot_paths", Kind::integer}, {"exponential_condition", Kind::boolean},
                                     {"ladder", Kind::number_array}};
  if (cfg.contains("malthus")) check_fields(cfg["malthus"], "malthus", bisection);
  if (cfg.contains("laplace"))
    check_fields(cfg["laplace"], "laplace",
                 {{"x", Kind::number_array}, {"y", Kind::number_array}, {"q", Kind::number_array},
                  {"n_paths", Kind::integer}, {"horizon_cap", Kind::integer}, {"derivative", Kind::boolean}});
  if (cfg.contains("profile"))
    check_fields(cfg["profile"], "profile",
                 {{"x0", Kind::number}, {"y_min", Kind::number}, {"y_max", Kind::number}, {"points", Kind::integer},
                  {"n_paths", Kind::integer}, {"lambda", Kind::number}, {"horizon_cap", Kind::integer}});
  if (cfg.contains("criteria"))
    check_fields(cfg["criteria"], "criteria",
                 {{"r", Kind::number}, {"q", Kind::number}, {"x_inf", Kind::number}, {"x_0", Kind::number},
                  {"points", Kind::integer}, {"panels", Kind::integer}});
  if (cfg.contains("oracle"))
    check_fields(cfg["oracle"], "oracle",
                 {{"nodes", Kind::integer}, {"windows", Kind::window_array}, {"t", Kind::number_array},
                  {"f", Kind::test_function}});
  if (cfg.contains("compare"))
    check_fields(cfg["compare"], "compare",
                 {{"nodes", Kind::integer},        {"semigroup_nodes", Kind::integer}, {"windows", Kind::window_array},
                  {"x", Kind::number_array},       {"t", Kind::number_array},          {"f", Kind::test_function},
                  {"n_paths", Kind::integer},      {"budget", Kind::number},           {"significance", Kind::number},
                  {"malthus_tolerance", Kind::number}, {"fit_x", Kind::number},        {"fit_t", Kind::number_array},
                  {"fit_tolerance", Kind::number}, {"fit_f", Kind::test_function}});
}

double get_num(const Json& j, const char* key) { return j.at(key).get<double>(); }

std::shared_ptr<const TotalRate> make_rate(const Json& j) {
  const std::string form = j["form"].get<std::string>();
  if (form == "constant") return std::make_shared<ConstantRate>(get_num(j, "value"));
  return std::make_shared<HillRate>(get_num(j, "k_max"), get_num(j, "x_half"), get_num(j, "m"));
}

std::shared_ptr<const FragmentDensity> make_density(const Json& j) {
  const std::string form = j["form"].get<std::string>();
  if (form == "power") return std::make_shared<PowerDensity>(get_num(j, "coef"), get_num(j, "theta"));
  std::optional<double> coef;
  if (j.contains("coef")) coef = get_num(j, "coef");
  return std::make_shared<BetaDensity>(get_num(j, "a"), get_num(j, "b"), coef);
}

}  // namespace

Json parse_config(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(Json& cfg, const std::string& dotted, const std::string& value) {
  if (dotted.empty()) throw ConfigError("empty override key");
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;
  }
  Json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("malformed override key '" + dotted + "'");
    if (!node->is_object()) throw ConfigError("override '" + dotted + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

void check_schema(const Json& cfg) { check_sections(cfg); }

TestFunction parse_test_function(const Json& node, const std::string& where) {
  check_test_function(node, where);
  const std::string form = node["form"].get<std::string>();
  TestFunction f = form == "identity" ? TestFunction::identity()
                   : form == "tent"   ? TestFunction::tent(get_num(node, "lo"), get_num(node, "hi"))
                                      : TestFunction::indicator(get_num(node, "lo"), get_num(node, "hi"));
  if (node.value("reciprocal", false)) f = f.reciprocal();
  return f;
}

ModelSpec build_model(const Json& cfg) {
  check_schema(cfg);
  const Json& g = cfg["growth"];
  const Json& gp = g["params"];
  const std::string gform = g["form"].get<std::string>();
  std::shared_ptr<const GrowthRate> growth;
  if (gform == "linear") {
    growth = std::make_shared<LinearGrowth>(get_num(gp, "a"));
  } else if (gform == "power_rational") {
    growth = std::make_shared<PowerRationalGrowth>(get_num(gp, "coef"), get_num(gp, "alpha"), get_num(gp, "beta"),
                                                   get_num(gp, "gamma"));
  } else {
    growth = std::make_shared<TabulatedGrowth>(gp["x"].get<std::vector<double>>(), gp["c"].get<std::vector<double>>());
  }

  const Json& k = cfg["kernel"];
  const Json& kp = k["params"];
  std::shared_ptr<const FragmentationKernel> kernel;
  if (k["form"].get<std::string>() == "self_similar") {
    kernel = std::make_shared<SelfSimilarKernel>(make_rate(kp["total_rate"]), make_density(kp["density"]));
  } else {
    const Json& d = kp["density"];
    const double coef = get_num(d, "coef");
    const double theta = get_num(d, "theta");
    std::shared_ptr<const TotalRate> supplied;
    if (kp.contains("total_rate")) supplied = make_rate(kp["total_rate"]);
    std::ostringstream desc;
    desc.precision(17);
    desc << "power(coef=" << coef << ",theta=" << theta << ")";
    kernel = std::make_shared<GeneralKernel>(GeneralKernel::power(coef, theta), desc.str(), supplied);
  }
  const Json& dom = cfg["domain"];
  return ModelSpec(growth, kernel, Domain{get_num(dom, "x_min"), get_num(dom, "x_max")});
}

RunSettings run_settings(const Json& cfg) {
  RunSettings s;
  if (cfg.contains("seed")) {
    s.seed = cfg["seed"].get<std::uint64_t>();
  } else if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (!end || *end != '\0') throw ConfigError(std::string(kSeedEnvVar) + " must be a non-negative integer");
    s.seed = v;
  }
  s.workers = cfg.value("workers", 0u);
  s.max_events = cfg.value("max_events", kDefaultMaxEvents);
  if (cfg.contains("output")) s.output_dir = cfg["output"].value("dir", s.output_dir);
  s.name = cfg.value("name", std::string{});
  return s;
}

}  // namespace gfsim
