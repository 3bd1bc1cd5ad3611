/*
 * Copyright 2026 The gfsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the gfsim library.  All functions return a gfs_status;
 * gfs_last_error() holds the message of the most recent failure on the
 * calling thread.  Strings returned through char** must be released with
 * gfs_string_free. */
#ifndef GFSIM_GFSIM_H
#define GFSIM_GFSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GFS_API __declspec(dllexport)
#else
#define GFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gfs_status {
  GFS_OK = 0,
  GFS_INVALID_ARGUMENT = 1,
  GFS_DOMAIN_ERROR = 2,
  GFS_INVALID_MODEL = 3,
  GFS_CONFIG_ERROR = 4,
  GFS_BRACKET_FAILURE = 5,
  GFS_NOT_CONVERGED = 6,
  GFS_GRID_ERROR = 7,
  GFS_NUMERIC_ERROR = 8,
  GFS_IO_ERROR = 9,
  GFS_INTERNAL = 10
} gfs_status;

typedef struct gfs_config gfs_config;
typedef struct gfs_model gfs_model;

GFS_API const char* gfs_version(void);
GFS_API const char* gfs_last_error(void);
GFS_API void gfs_string_free(char* s);
/* 0 trace, 1 debug, 2 info, 3 warn, 4 error, 5 critical, 6 off. */
GFS_API gfs_status gfs_set_log_level(int level);

/* Configuration tree. */
GFS_API gfs_status gfs_config_load(const char* path, gfs_config** out);
GFS_API gfs_status gfs_config_parse(const char* json_text, gfs_config** out);
/* Sets a dotted path; value is JSON text, or a bare string. */
GFS_API gfs_status gfs_config_set(gfs_config* cfg, const char* dotted_key, const char* value);
GFS_API gfs_status gfs_config_check(const gfs_config* cfg);
GFS_API gfs_status gfs_config_dump(const gfs_config* cfg, char** json_out);
GFS_API void gfs_config_free(gfs_config* cfg);

/* Runs a subcommand; *exit_code receives the process exit code (0 ok,
 * 1 runtime error, 2 config error, 3 invalid model, 4 unreliable or
 * inconclusive, 5 comparison failure).  *message may be NULL. */
GFS_API gfs_status gfs_run(const gfs_config* cfg, const char* subcommand, int* exit_code, char** message);
/* Newline-separated artifact paths written by the last gfs_run on this thread. */
GFS_API gfs_status gfs_last_artifacts(char** paths_out);
GFS_API size_t gfs_subcommand_count(void);
GFS_API const char* gfs_subcommand_name(size_t i);

/* Validated model built from a configuration. */
GFS_API gfs_status gfs_model_create(const gfs_config* cfg, gfs_model** out);
GFS_API void gfs_model_free(gfs_model* model);
GFS_API gfs_status gfs_model_validation_report(const gfs_config* cfg, int* valid, char** report_json);
GFS_API gfs_status gfs_model_hash(const gfs_model* model, uint64_t* out);
GFS_API gfs_status gfs_model_q_c(const gfs_model* model, double* out);
GFS_API gfs_status gfs_travel_time(const gfs_model* model, double x, double y, double* out);
GFS_API gfs_status gfs_flow_map(const gfs_model* model, double x, double t, double* out, int* clamped);
GFS_API gfs_status gfs_no_jump_probability(const gfs_model* model, double x, double y, double* out);

/* Monte Carlo estimate of T_t f(x) with f a tent on [lo, hi]. */
GFS_API gfs_status gfs_semigroup_tent(const gfs_model* model, double x, double t, double lo, double hi, uint64_t seed,
                                      size_t n_paths, double* mean, double* std_error);
/* Malthus exponent from x. */
GFS_API gfs_status gfs_malthus(const gfs_model* model, double x, uint64_t seed, double* lambda_hat, double* q_lo,
                               double* q_hi);

#ifdef __cplusplus
}
#endif

#endif
