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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gfsim {

struct QuadratureTolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
};

// Adaptive Gauss-Kronrod (15 point) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 QuadratureTolerance tol = {});

// Tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12);

// Composite Gauss-Legendre with `panels` equal panels of 8 points each.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels);

// Pairwise summation in index order; result does not depend on how the
// values were produced.
double pairwise_sum(std::span<const double> v);

std::vector<double> log_space(double lo, double hi, std::size_t n);
std::vector<double> lin_space(double lo, double hi, std::size_t n);

// Safeguarded Newton on a bracketing interval [lo, hi] with g(lo) <= 0 <= g(hi).
// g returns value and derivative.
double newton_bracketed(const std::function<std::pair<double, double>(double)>& g,
                        double guess, double lo, double hi, double xtol = 0.0);

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
};

SampleStats sample_stats(std::span<const double> v);

}  // namespace gfsim
