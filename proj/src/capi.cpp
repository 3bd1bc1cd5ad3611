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

#include "gfsim/gfsim.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gfsim/config.hpp"
#include "gfsim/error.hpp"
#include "gfsim/malthus.hpp"
#include "gfsim/runner.hpp"

#include <spdlog/spdlog.h>

struct gfs_config {
  gfsim::Json tree;
};

struct gfs_model {
  std::shared_ptr<const gfsim::ModelSpec> spec;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_artifacts;

gfs_status fail(gfs_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
gfs_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const gfsim::Error& e) {
    return fail(static_cast<gfs_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GFS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GFS_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

#define GFS_REQUIRE(cond, what) \
  if (!(cond)) return fail(GFS_INVALID_ARGUMENT, what)

extern "C" {

const char* gfs_version(void) { return gfsim::version_string(); }
const char* gfs_last_error(void) { return last_error.c_str(); }
void gfs_string_free(char* s) { std::free(s); }

gfs_status gfs_set_log_level(int level) {
  GFS_REQUIRE(level >= 0 && level <= 6, "log level must be in [0, 6]");
  spdlog::set_level(static_cast<spdlog::level::level_enum>(level));
  return GFS_OK;
}

gfs_status gfs_config_load(const char* path, gfs_config** out) {
  GFS_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new gfs_config{gfsim::load_config_file(path)};
    return GFS_OK;
  });
}

gfs_status gfs_config_parse(const char* json_text, gfs_config** out) {
  GFS_REQUIRE(json_text && out, "null argument");
  return guarded([&] {
    *out = new gfs_config{gfsim::parse_config(json_text)};
    return GFS_OK;
  });
}

gfs_status gfs_config_set(gfs_config* cfg, const char* dotted_key, const char* value) {
  GFS_REQUIRE(cfg && dotted_key && value, "null argument");
  return guarded([&] {
    gfsim::apply_override(cfg->tree, dotted_key, value);
    return GFS_OK;
  });
}

gfs_status gfs_config_check(const gfs_config* cfg) {
  GFS_REQUIRE(cfg, "null argument");
  return guarded([&] {
    gfsim::check_schema(cfg->tree);
    return GFS_OK;
  });
}

gfs_status gfs_config_dump(const gfs_config* cfg, char** json_out) {
  GFS_REQUIRE(cfg && json_out, "null argument");
  return guarded([&] {
    *json_out = duplicate(cfg->tree.dump(2));
    return GFS_OK;
  });
}

void gfs_config_free(gfs_config* cfg) { delete cfg; }

gfs_status gfs_run(const gfs_config* cfg, const char* subcommand, int* exit_code, char** message) {
  GFS_REQUIRE(cfg && subcommand && exit_code, "null argument");
  return guarded([&] {
    const gfsim::RunResult r = gfsim::run_subcommand(subcommand, cfg->tree);
    *exit_code = static_cast<int>(r.exit_code);
    last_artifacts.clear();
    for (const auto& a : r.artifacts) last_artifacts += a + "\n";
    if (message) *message = duplicate(r.message);
    return GFS_OK;
  });
}

gfs_status gfs_last_artifacts(char** paths_out) {
  GFS_REQUIRE(paths_out, "null argument");
  return guarded([&] {
    *paths_out = duplicate(last_artifacts);
    return GFS_OK;
  });
}

size_t gfs_subcommand_count(void) { return gfsim::subcommands().size(); }

const char* gfs_subcommand_name(size_t i) {
  const auto& names = gfsim::subcommands();
  return i < names.size() ? names[i].c_str() : nullptr;
}

gfs_status gfs_model_create(const gfs_config* cfg, gfs_model** out) {
  GFS_REQUIRE(cfg && out, "null argument");
  return guarded([&] {
    *out = new gfs_model{gfsim::validated(gfsim::build_model(cfg->tree))};
    return GFS_OK;
  });
}

void gfs_model_free(gfs_model* model) { delete model; }

gfs_status gfs_model_validation_report(const gfs_config* cfg, int* valid, char** report_json) {
  GFS_REQUIRE(cfg && valid, "null argument");
  return guarded([&] {
    gfsim::ModelSpec spec = gfsim::build_model(cfg->tree);
    const gfsim::ValidationReport rep = gfsim::validate_model(spec);
    *valid = rep.valid() ? 1 : 0;
    if (report_json) {
      gfsim::Json checks = gfsim::Json::array();
      for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"advisory", c.advisory}, {"residual", c.residual},
                          {"detail", c.detail}});
      *report_json = duplicate(gfsim::Json{{"valid", rep.valid()}, {"checks", checks}}.dump(2));
    }
    return GFS_OK;
  });
}

gfs_status gfs_model_hash(const gfs_model* model, uint64_t* out) {
  GFS_REQUIRE(model && out, "null argument");
  *out = model->spec->hash();
  return GFS_OK;
}

gfs_status gfs_model_q_c(const gfs_model* model, double* out) {
  GFS_REQUIRE(model && out, "null argument");
  *out = model->spec->q_c();
  return GFS_OK;
}

gfs_status gfs_travel_time(const gfs_model* model, double x, double y, double* out) {
  GFS_REQUIRE(model && out, "null argument");
  return guarded([&] {
    *out = gfsim::travel_time(*model->spec, x, y);
    return GFS_OK;
  });
}

gfs_status gfs_flow_map(const gfs_model* model, double x, double t, double* out, int* clamped) {
  GFS_REQUIRE(model && out, "null argument");
  return guarded([&] {
    const gfsim::FlowResult r = gfsim::flow_map(*model->spec, x, t);
    *out = r.position;
    if (clamped) *clamped = r.clamped ? 1 : 0;
    return GFS_OK;
  });
}

gfs_status gfs_no_jump_probability(const gfs_model* model, double x, double y, double* out) {
  GFS_REQUIRE(model && out, "null argument");
  return guarded([&] {
    *out = gfsim::no_jump_probability(*model->spec, x, y);
    return GFS_OK;
  });
}

gfs_status gfs_semigroup_tent(const gfs_model* model, double x, double t, double lo, double hi, uint64_t seed,
                              size_t n_paths, double* mean, double* std_error) {
  GFS_REQUIRE(model && mean && std_error && n_paths > 0, "null argument or zero paths");
  return guarded([&] {
    gfsim::SampleConfig sc;
    sc.seed = seed;
    sc.n_paths = n_paths;
    const auto e = gfsim::estimate_semigroup(*model->spec, x, t, gfsim::TestFunction::tent(lo, hi), sc);
    *mean = e.mean;
    *std_error = e.std_error;
    return GFS_OK;
  });
}

gfs_status gfs_malthus(const gfs_model* model, double x, uint64_t seed, double* lambda_hat, double* q_lo, double* q_hi) {
  GFS_REQUIRE(model && lambda_hat, "null argument");
  return guarded([&] {
    gfsim::SampleConfig sc;
    sc.seed = seed;
    const auto r = gfsim::solve_malthus(model->spec, x, gfsim::BisectionConfig{}, sc);
    *lambda_hat = r.lambda_hat;
    if (q_lo) *q_lo = r.q_lo;
    if (q_hi) *q_hi = r.q_hi;
    return GFS_OK;
  });
}

}  // extern "C"
