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

// Command-line front end; talks to the library only through the C interface.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfsim/gfsim.h"

namespace {

int report(gfs_status s, const char* what) {
  std::fprintf(stderr, "gfsim: %s: %s\n", what, gfs_last_error());
  // Config problems map to exit code 2, everything else to 1.
  return s == GFS_CONFIG_ERROR || s == GFS_INVALID_ARGUMENT || s == GFS_IO_ERROR ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth-fragmentation Monte Carlo and grid oracles"};
  app.set_version_flag("--version", std::string(gfs_version()));

  std::vector<std::string> names;
  for (size_t i = 0; i < gfs_subcommand_count(); ++i) names.emplace_back(gfs_subcommand_name(i));

  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long long seed = -1;
  long long workers = -1;
  int verbosity = 0;
  bool quiet = false;

  app.add_option("subcommand", subcommand, "one of: validate simulate semigroup laplace malthus profile criteria oracle compare")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("-c,--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "override a dotted config path, key=value (repeatable)");
  app.add_option("-o,--out", out_dir, "output directory (output.dir)");
  app.add_option("--seed", seed, "master seed (seed); default from GFSIM_SEED")->check(CLI::NonNegativeNumber);
  app.add_option("-j,--workers", workers, "worker threads, 0 = all cores (workers)")->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", verbosity, "more logging (repeatable)");
  app.add_flag("-q,--quiet", quiet, "errors only");
  CLI11_PARSE(app, argc, argv);

  gfs_set_log_level(quiet ? 4 : (verbosity >= 2 ? 1 : (verbosity == 1 ? 2 : 3)));

  gfs_config* cfg = nullptr;
  if (gfs_status s = gfs_config_load(config_path.c_str(), &cfg); s != GFS_OK) return report(s, "loading config");

  auto set = [&](const std::string& key, const std::string& value) {
    gfs_status s = gfs_config_set(cfg, key.c_str(), value.c_str());
    return s == GFS_OK ? 0 : report(s, ("override " + key).c_str());
  };
  int rc = 0;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "gfsim: override '%s' is not key=value\n", o.c_str());
      rc = 2;
      break;
    }
    if ((rc = set(o.substr(0, eq), o.substr(eq + 1))) != 0) break;
  }
  if (rc == 0 && seed >= 0) rc = set("seed", std::to_string(seed));
  if (rc == 0 && workers >= 0) rc = set("workers", std::to_string(workers));
  if (rc == 0 && !out_dir.empty()) rc = set("output.dir", "\"" + out_dir + "\"");
  if (rc != 0) {
    gfs_config_free(cfg);
    return rc;
  }

  int exit_code = 0;
  char* message = nullptr;
  gfs_status s = gfs_run(cfg, subcommand.c_str(), &exit_code, &message);
  gfs_config_free(cfg);
  if (s != GFS_OK) return report(s, subcommand.c_str());

  char* artifacts = nullptr;
  if (gfs_last_artifacts(&artifacts) == GFS_OK) {
    std::fputs(artifacts, stdout);
    gfs_string_free(artifacts);
  }
  if (message && *message) std::fprintf(stderr, "gfsim %s: %s\n", subcommand.c_str(), message);
  gfs_string_free(message);
  return exit_code;
}
