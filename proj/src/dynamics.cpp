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

#include "pdrive/dynamics.hpp"

#include <string>

namespace pdrive::dynamics {

namespace {

void check_steering(double delta) {
  if (!(std::abs(delta) < std::numbers::pi / 2.0))
    throw Error(ErrorCode::kSteeringOutOfDomain,
                "steering angle " + std::to_string(delta) + " outside (-pi/2, pi/2)");
}

}  // namespace

double sideslip(double delta, const VehicleDims& dims) {
  return std::atan((dims.l_r / dims.length()) * std::tan(delta));
}

VehicleState step(const VehicleState& s, const ControlInput& u, const VehicleDims& dims,
                  double ts) {
  check_steering(u.delta);
  const double beta = sideslip(u.delta, dims);
  const double heading = s.theta + beta;
  return {s.x + ts * s.v * std::cos(heading), s.y + ts * s.v * std::sin(heading),
          s.theta + ts * s.v * (std::tan(u.delta) / dims.length()) * std::cos(beta),
          s.v + ts * u.a};
}

VehicleState step(const VehicleState& s, const ControlInput& u, const VehicleDims& dims,
                  double ts, StepJacobian& jac) {
  check_steering(u.delta);
  const double len = dims.length();
  const double k = dims.l_r / len;
  const double tan_d = std::tan(u.delta);
  const double sec2_d = 1.0 + tan_d * tan_d;
  const double beta = std::atan(k * tan_d);
  const double dbeta = k * sec2_d / (1.0 + k * k * tan_d * tan_d);
  const double heading = s.theta + beta;
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);

  jac.A.setIdentity();
  jac.A(0, 2) = -ts * s.v * sh;
  jac.A(0, 3) = ts * ch;
  jac.A(1, 2) = ts * s.v * ch;
  jac.A(1, 3) = ts * sh;
  jac.A(2, 3) = ts * (tan_d / len) * cb;

  jac.B.setZero();
  jac.B(0, 1) = -ts * s.v * sh * dbeta;
  jac.B(1, 1) = ts * s.v * ch * dbeta;
  jac.B(2, 1) = ts * s.v / len * (sec2_d * cb - tan_d * sb * dbeta);
  jac.B(3, 0) = ts;

  return {s.x + ts * s.v * ch, s.y + ts * s.v * sh, s.theta + ts * s.v * (tan_d / len) * cb,
          s.v + ts * u.a};
}

Plan rollout(const VehicleState& s0, std::span<const ControlInput> us,
             const VehicleDims& dims, double ts, long t0) {
  Plan plan;
  plan.t0 = t0;
  plan.ts = ts;
  plan.states.reserve(us.size() + 1);
  plan.states.push_back(s0);
  plan.inputs.assign(us.begin(), us.end());
  for (std::size_t k = 0; k < us.size(); ++k) {
    try {
      plan.states.push_back(step(plan.states.back(), us[k], dims, ts));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at input " + std::to_string(k));
    }
  }
  return plan;
}

Vec2 corner_offset(int i, const VehicleDims& dims) {
  const double half_w = 0.5 * dims.w_v;
  switch (i) {
    case kRearLeft: return {-dims.l_r, half_w};
    case kFrontLeft: return {dims.l_f, half_w};
    case kFrontRight: return {dims.l_f, -half_w};
    default: return {-dims.l_r, -half_w};
  }
}

std::array<Vec2, 4> corners(const VehicleState& s, const VehicleDims& dims) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    const Vec2 o = corner_offset(i, dims);
    out[i] = {s.x + c * o[0] - sn * o[1], s.y + sn * o[0] + c * o[1]};
  }
  return out;
}

}  // namespace pdrive::dynamics
