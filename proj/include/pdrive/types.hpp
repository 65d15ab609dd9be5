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

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdrive {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDefinite,
  kW1W4Order,
  kSteeringOutOfDomain,
  kOverflow,
  kSingularSystem,
  kNonConvergentIntegral,
  kDegenerateOmegaGradient,
  kPoorFit,
  kInfeasible,
  kHorizonMismatch,
  kInsufficientOverlap,
  kInvariantViolation,
  kNoConvergence,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Pose and speed in the lane frame. Angles are kept unwrapped while planning
/// and normalized on output.
struct VehicleState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad
  double v = 0.0;      // m/s

  Vec4 vec() const { return {x, y, theta, v}; }
  static VehicleState from(const Vec4& s) { return {s[0], s[1], s[2], s[3]}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) &&
           std::isfinite(v);
  }
  VehicleState normalized() const { return {x, y, normalize_angle(theta), v}; }
  bool operator==(const VehicleState&) const = default;
};

struct ControlInput {
  double a = 0.0;      // m/s^2
  double delta = 0.0;  // rad

  Vec2 vec() const { return {a, delta}; }
  bool operator==(const ControlInput&) const = default;
};

struct VehicleDims {
  double l_f = 0.21;
  double l_r = 0.19;
  double w_v = 0.19;

  double length() const { return l_f + l_r; }
  void validate() const;
};

struct EllipseFootprint {
  double a_s = 0.75;  // semi-major, along the obstacle's travel axis
  double b_s = 0.35;  // semi-minor
  // When set, the ellipse is rotated with the obstacle's heading instead of
  // staying aligned with the lane frame.
  bool heading_aligned = false;

  void validate() const;
};

/// Penalty matrices of the persuasion cost. W1 = w1*I and W4 = w4*I.
struct CostWeights {
  double w1 = 1.0;
  Mat4 W2 = Mat4::Identity();
  Mat2 W3 = Mat2::Identity();
  double w4 = 0.2;
  double k1 = 0.5;
};

/// Throws kNonPositiveDefinite or kW1W4Order.
void validate_weights(const CostWeights& cw);

/// Receiver belief covariances for one horizon step.
struct StepBelief {
  Mat4 sigma_xe = Mat4::Identity() * 0.01;
  double sigma_omega = 0.1;
};

/// Per-step belief schedule. A schedule with a single entry is constant over
/// the horizon.
struct BeliefState {
  std::vector<StepBelief> steps{StepBelief{}};

  const StepBelief& at(std::size_t t) const {
    return steps[std::min(t, steps.size() - 1)];
  }
  static BeliefState constant(const Mat4& sigma_xe, double sigma_omega) {
    return BeliefState{{StepBelief{sigma_xe, sigma_omega}}};
  }
  void validate() const;
};

struct LaneGeometry {
  double y_min = 0.0;
  double y_max = 0.74;
  double w_l = 0.37;

  void validate() const;
};

struct SaturationBounds {
  double a_min = -1.0;
  double a_max = 1.0;
  double delta_min = -std::numbers::pi / 3.0;
  double delta_max = std::numbers::pi / 3.0;
  double v_min = 0.0;
  double v_max = 1.5;

  void validate() const;
  ControlInput clamp(const ControlInput& u) const;
  bool contains(const ControlInput& u, double tol = 0.0) const;
};

/// Horizon-length trajectory issued at step t0: states[0] is the state at t0.
struct Plan {
  long t0 = 0;
  double ts = 0.1;
  std::vector<VehicleState> states;
  std::vector<ControlInput> inputs;

  std::size_t horizon() const { return inputs.size(); }
  void validate() const;  // |states| = |inputs| + 1
  bool operator==(const Plan&) const = default;
};

struct AdaptationParams {
  std::vector<double> w_alpha;  // empty means uniform
  std::vector<double> w_beta;
  double sigma_scale = 0.5;
  double sigma_min = 1e-4;
  double sigma_max = 0.2;
  double w1_base = 1.0;
  double w1_max = 5.0;
  double c_beta = 0.01;
  double b_floor = 1e-3;

  static AdaptationParams uniform(std::size_t n);
  void validate() const;
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat4& m);

}  // namespace pdrive
