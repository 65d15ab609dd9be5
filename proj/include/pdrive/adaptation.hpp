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

// Online updates of the receiver belief covariance and the receiver tracking
// weight from how much consecutive plans changed.

#include "pdrive/types.hpp"

#include <utility>

namespace pdrive::adaptation {

/// Weighted mean distance between two plans over the absolute time steps they
/// share. Plans are aligned through their t0 fields; at least N - 1 shared
/// states are required (kInsufficientOverlap otherwise). Empty `weights`
/// means uniform.
double plan_change(const Plan& now, const Plan& prev, const std::vector<double>& weights);

/// Consistency of the ego's own plan (drives sigma_xe).
double alpha(const Plan& plan_now, const Plan& plan_prev, const AdaptationParams& ap);

/// Consistency of the receiver's plan (drives w1).
double beta(const Plan& pred_now, const Plan& pred_prev, const AdaptationParams& ap);

/// sigma_xe <- clamp(sigma_scale * a) * I, w1 <- min(w1_max, w1_base (1 + c_beta / (b + b_floor))).
/// Every step of the belief schedule is replaced. Throws kInvariantViolation
/// if the result breaks a belief or weight invariant.
std::pair<BeliefState, CostWeights> update_beliefs(const BeliefState& bs, const CostWeights& cw,
                                                   double a, double b,
                                                   const AdaptationParams& ap);

}  // namespace pdrive::adaptation
