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

#include <string>
#include <vector>

#include "gfsim/config.hpp"

namespace gfsim {

const char* version_string();

enum class ExitCode : int {
  ok = 0,
  runtime_error = 1,
  config_error = 2,
  invalid_model = 3,
  unreliable = 4,
  compare_failure = 5
};

struct RunResult {
  ExitCode exit_code = ExitCode::ok;
  std::vector<std::string> artifacts;  // paths written
  std::string message;
};

// One of validate, simulate, semigroup, laplace, malthus, profile, criteria,
// oracle, compare.  Artifacts go to the configured output directory.
// Errors are caught and mapped to exit codes.
RunResult run_subcommand(const std::string& subcommand, const Json& cfg);

const std::vector<std::string>& subcommands();

}  // namespace gfsim
