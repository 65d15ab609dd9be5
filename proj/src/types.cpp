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

#include "pdrive/types.hpp"

#include <algorithm>
#include <numeric>

namespace pdrive {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::kW1W4Order: return "W1W4Order";
    case ErrorCode::kSteeringOutOfDomain: return "SteeringOutOfDomain";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNonConvergentIntegral: return "NonConvergentIntegral";
    case ErrorCode::kDegenerateOmegaGradient: return "DegenerateOmegaGradient";
    case ErrorCode::kPoorFit: return "PoorFit";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kHorizonMismatch: return "HorizonMismatch";
    case ErrorCode::kInsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

double normalize_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

double min_eigenvalue(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (m + m.transpose()),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

namespace {

bool symmetric_pd(const auto& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    return false;
  Eigen::LLT<std::decay_t<decltype(m.eval())>> llt(m);
  return llt.info() == Eigen::Success;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

void validate_weights(const CostWeights& cw) {
  if (!(cw.w1 > 0.0) || !std::isfinite(cw.w1))
    throw Error(ErrorCode::kNonPositiveDefinite, "w1 must be positive");
  if (!(cw.w4 >= 0.0) || !std::isfinite(cw.w4))
    throw Error(ErrorCode::kNonPositiveDefinite, "w4 must be nonnegative");
  if (!symmetric_pd(cw.W2))
    throw Error(ErrorCode::kNonPositiveDefinite, "W2 must be symmetric positive definite");
  if (!symmetric_pd(cw.W3))
    throw Error(ErrorCode::kNonPositiveDefinite, "W3 must be symmetric positive definite");
  if (cw.w1 < cw.w4)
    throw Error(ErrorCode::kW1W4Order, "w1 must be at least w4");
  if (!std::isfinite(cw.k1)) invalid("k1 must be finite");
}

void VehicleDims::validate() const {
  if (!(l_f > 0.0 && l_r > 0.0 && w_v > 0.0)) invalid("vehicle dimensions must be positive");
}

void EllipseFootprint::validate() const {
  if (!(b_s > 0.0 && a_s >= b_s)) invalid("footprint requires a_s >= b_s > 0");
}

namespace {

void check_step_belief(const StepBelief& b) {
  if (!(b.sigma_omega > 0.0 && b.sigma_omega <= 0.2))
    throw Error(ErrorCode::kInvariantViolation, "sigma_omega must lie in (0, 0.2]");
  if (!symmetric_pd(b.sigma_xe))
    throw Error(ErrorCode::kNonPositiveDefinite, "sigma_xe must be symmetric positive definite");
}

}  // namespace

void BeliefState::validate() const {
  if (steps.empty()) invalid("belief schedule is empty");
  for (const auto& b : steps) check_step_belief(b);
}

void LaneGeometry::validate() const {
  if (!(y_min < y_max)) invalid("lane requires y_min < y_max");
  if (!(w_l > 0.0)) invalid("lane width must be positive");
}

void SaturationBounds::validate() const {
  if (!(a_min < a_max && delta_min < delta_max && v_min < v_max))
    invalid("saturation bounds require min < max");
}

ControlInput SaturationBounds::clamp(const ControlInput& u) const {
  return {std::clamp(u.a, a_min, a_max), std::clamp(u.delta, delta_min, delta_max)};
}

bool SaturationBounds::contains(const ControlInput& u, double tol) const {
  return u.a >= a_min - tol && u.a <= a_max + tol && u.delta >= delta_min - tol &&
         u.delta <= delta_max + tol;
}

void Plan::validate() const {
  if (states.size() != inputs.size() + 1)
    invalid("plan requires |states| = |inputs| + 1");
}

AdaptationParams AdaptationParams::uniform(std::size_t n) {
  AdaptationParams ap;
  ap.w_alpha.assign(n, 1.0 / static_cast<double>(n));
  ap.w_beta = ap.w_alpha;
  return ap;
}

void AdaptationParams::validate() const {
  for (const auto* w : {&w_alpha, &w_beta}) {
    if (w->empty()) continue;
    if (std::any_of(w->begin(), w->end(), [](double x) { return !(x >= 0.0); }))
      invalid("adaptation weights must be nonnegative");
    const double s = std::accumulate(w->begin(), w->end(), 0.0);
    if (std::abs(s - 1.0) > 1e-12) invalid("adaptation weights must sum to 1");
  }
  if (!(sigma_scale >= 0.0 && sigma_min > 0.0 && sigma_max >= sigma_min))
    invalid("adaptation sigma parameters out of range");
  if (!(w1_base > 0.0 && w1_max >= w1_base && c_beta >= 0.0 && b_floor > 0.0))
    invalid("adaptation w1 parameters out of range");
}

}  // namespace pdrive
