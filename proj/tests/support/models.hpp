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

#include <memory>

#include "gfsim/model.hpp"

namespace gfsim::testing {

inline std::shared_ptr<const FragmentationKernel> uniform_kernel(double rate = 1.0) {
  return std::make_shared<SelfSimilarKernel>(std::make_shared<ConstantRate>(rate),
                                             std::make_shared<PowerDensity>(2.0, 0.0));
}

// c = 0.5 x, K = 1, p = 2.
inline std::shared_ptr<const ModelSpec> linear_model(double a = 0.5, Domain d = {0.01, 100.0}) {
  return validated(ModelSpec(std::make_shared<LinearGrowth>(a), uniform_kernel(), d));
}

// c = x^2 / (1 + x^2), sup c/x = 0.5, K = 1, p = 2.
inline std::shared_ptr<const ModelSpec> hump_model(Domain d = {0.02, 50.0}) {
  return validated(ModelSpec(std::make_shared<PowerRationalGrowth>(1.0, 2.0, 1.0, 2.0), uniform_kernel(), d));
}

// c = x, no fragmentation.
inline std::shared_ptr<const ModelSpec> pure_growth_model(double a = 1.0, Domain d = {0.01, 100.0}) {
  return validated(ModelSpec(std::make_shared<LinearGrowth>(a), uniform_kernel(0.0), d));
}

inline double hump_growth(double x) { return x * x / (1.0 + x * x); }

}  // namespace gfsim::testing
