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

#include "pdrive/adaptation.hpp"

#include <algorithm>
#include <string>

namespace pdrive::adaptation {

double plan_change(const Plan& now, const Plan& prev, const std::vector<double>& weights) {
  const long shift = now.t0 - prev.t0;
  if (shift < 0) throw Error(ErrorCode::kInsufficientOverlap, "previous plan is newer");
  const long avail = static_cast<long>(prev.states.size()) - shift;
  const long overlap = std::min(static_cast<long>(now.states.size()), avail);
  const long horizon = static_cast<long>(now.inputs.size());
  if (overlap < std::max(1L, horizon - 1))
    throw Error(ErrorCode::kInsufficientOverlap,
                "plans share " + std::to_string(std::max(0L, overlap)) + " steps");
  double total = 0.0;
  double wsum = 0.0;
  for (long k = 0; k < overlap; ++k) {
    const double w = weights.empty() ? 1.0
                     : k < static_cast<long>(weights.size()) ? weights[static_cast<std::size_t>(k)]
                                                             : 0.0;
    const Vec4 d = now.states[static_cast<std::size_t>(k)].vec() -
                   prev.states[static_cast<std::size_t>(k + shift)].vec();
    total += w * d.norm();
    wsum += w;
  }
  // Renormalize when the overlap is shorter than the weight vector.
  return wsum > 0.0 ? total / wsum : 0.0;
}

double alpha(const Plan& plan_now, const Plan& plan_prev, const AdaptationParams& ap) {
  return plan_change(plan_now, plan_prev, ap.w_alpha);
}

double beta(const Plan& pred_now, const Plan& pred_prev, const AdaptationParams& ap) {
  return plan_change(pred_now, pred_prev, ap.w_beta);
}

std::pair<BeliefState, CostWeights> update_beliefs(const BeliefState& bs, const CostWeights& cw,
                                                   double a, double b,
                                                   const AdaptationParams& ap) {
  if (!(a >= 0.0 && b >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "alpha and beta must be nonnegative");
  ap.validate();
  const double sigma = std::clamp(ap.sigma_scale * a, ap.sigma_min, ap.sigma_max);
  BeliefState out_bs = bs;
  for (auto& step : out_bs.steps) step.sigma_xe = Mat4::Identity() * sigma;
  CostWeights out_cw = cw;
  out_cw.w1 = std::min(ap.w1_max, ap.w1_base * (1.0 + ap.c_beta / (b + ap.b_floor)));
  try {
    out_bs.validate();
    validate_weights(out_cw);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvariantViolation,
                std::string("belief update broke an invariant: ") + e.what());
  }
  const double curv = min_eigenvalue(Mat4::Identity() / sigma - 2.0 * out_cw.W2);
  if (!(curv > 0.0))
    throw Error(ErrorCode::kInvariantViolation,
                "sigma_max too large for W2: Laplace reduction would diverge");
  return {out_bs, out_cw};
}

}  // namespace pdrive::adaptation
