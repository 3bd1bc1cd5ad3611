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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gfsim {

enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  domain_error = 2,
  invalid_model = 3,
  config_error = 4,
  bracket_failure = 5,
  not_converged = 6,
  grid_error = 7,
  numeric_error = 8,
  io_error = 9,
  internal = 10
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain_error, what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(ErrorCode::invalid_model, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config_error, what) {}
};

class GridError : public Error {
 public:
  explicit GridError(const std::string& what) : Error(ErrorCode::grid_error, what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::not_converged, what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// Scanned (q, mean, se) triples are attached so callers can inspect the curve.
struct ScanPoint {
  double q;
  double mean;
  double std_error;
};

class BracketError : public Error {
 public:
  BracketError(const std::string& what, std::vector<ScanPoint> curve)
      : Error(ErrorCode::bracket_failure, what), curve_(std::move(curve)) {}
  const std::vector<ScanPoint>& curve() const noexcept { return curve_; }

 private:
  std::vector<ScanPoint> curve_;
};

}  // namespace gfsim
