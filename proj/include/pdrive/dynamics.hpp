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

#include "pdrive/types.hpp"

#include <array>
#include <span>

namespace pdrive::dynamics {

/// Kinematic sideslip atan((l_r / L) tan delta).
double sideslip(double delta, const VehicleDims& dims);

/// One forward-Euler step of the kinematic bicycle model. The pose reference
/// point has l_f ahead of it and l_r behind it. Throws kSteeringOutOfDomain
/// when |delta| >= pi/2.
VehicleState step(const VehicleState& s, const ControlInput& u, const VehicleDims& dims,
                  double ts);

struct StepJacobian {
  Mat4 A;                         // d next / d state
  Eigen::Matrix<double, 4, 2> B;  // d next / d input
};

/// step() together with its Jacobians.
VehicleState step(const VehicleState& s, const ControlInput& u, const VehicleDims& dims,
                  double ts, StepJacobian& jac);

/// Chains step() from s0. Errors carry the offending input index.
Plan rollout(const VehicleState& s0, std::span<const ControlInput> us,
             const VehicleDims& dims, double ts, long t0 = 0);

enum Corner : int { kRearLeft = 0, kFrontLeft = 1, kFrontRight = 2, kRearRight = 3 };

/// Rectangle corners in order rear-left, front-left, front-right, rear-right.
std::array<Vec2, 4> corners(const VehicleState& s, const VehicleDims& dims);

/// Body-frame offset (longitudinal, lateral) of corner i.
Vec2 corner_offset(int i, const VehicleDims& dims);

}  // namespace pdrive::dynamics
