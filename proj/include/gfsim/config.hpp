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
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "gfsim/feynman_kac.hpp"
#include "gfsim/model.hpp"

namespace gfsim {

using Json = nlohmann::json;

inline constexpr const char* kSeedEnvVar = "GFSIM_SEED";

// Parse a config file; throws ConfigError with the file name on syntax errors.
Json load_config_file(const std::string& path);
Json parse_config(const std::string& text, const std::string& origin = "<string>");

// Set a dotted path (a.b.c) to a value.  The value is parsed as JSON when it
// is valid JSON, otherwise stored as a string.
void apply_override(Json& cfg, const std::string& dotted, const std::string& value);

// Rejects unknown keys and wrongly typed values; messages name the dotted path.
void check_schema(const Json& cfg);

// Model from the growth, kernel and domain sections (not yet validated).
ModelSpec build_model(const Json& cfg);

TestFunction parse_test_function(const Json& node, const std::string& where);

struct RunSettings {
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::uint64_t max_events = kDefaultMaxEvents;
  std::string output_dir = "gfsim_out";
  std::string name;
};

// seed falls back to the environment variable, then 0.
RunSettings run_settings(const Json& cfg);

}  // namespace gfsim
