// Copyright 2026 The pdrive Authors
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

// Numerical oracles used to check the closed-form persuasion quantities.
// Nothing in here calls into the persuasion module.

#include "pdrive/types.hpp"

#include <functional>

namespace pdrive::oracle {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. Stops once the error
/// estimate is below max(abs_tol, rel_tol * |value|); throws kNoConvergence
/// when max_intervals is reached first.
QuadResult integrate_scalar(const std::function<double(double)>& f, double lo, double hi,
                            double abs_tol, double rel_tol = 0.0, int max_intervals = 4000);

/// Gaussian density over omega with the given mean and variance.
double gaussian_density(double omega, double mean, double variance);

enum class TruncationForm {
  kPrinted,     // divides by sqrt(variance) as well, does not integrate to one
  kNormalized,  // standard Gaussian truncated to [0, inf)
};

/// Density of omega, truncated at zero. Returns 0 for omega < 0.
double truncated_density(double omega, double mean, double variance,
                         TruncationForm form = TruncationForm::kNormalized);

/// The normalizer 1 - Psi(-mean / sqrt(variance)).
double truncation_normalizer(double mean, double variance);

/// Upper limit used for [0, inf) integrals over omega.
inline double omega_upper_limit(double mean, double variance) {
  return mean + 12.0 * std::sqrt(variance);
}

struct GridResult {
  Vec4 argmin = Vec4::Zero();
  double value = 0.0;
  Vec4 spacing = Vec4::Zero();
  bool boundary_hit = false;
};

/// Exhaustive minimum over the axis-aligned grid center +- radius with
/// `resolution` points per axis (>= 3).
GridResult grid_minimize(const std::function<double(const Vec4&)>& f, const Vec4& center,
                         const Vec4& radius, int resolution);

}  // namespace pdrive::oracle
