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

#include "pdrive/shooting.hpp"
#include "pdrive/types.hpp"

#include <optional>

namespace pdrive::agents {

enum class AgentKind { kMpc, kAggressive };

/// Straight reference lane: travel direction `heading`, lane center at signed
/// offset `lateral` along the left normal of that direction. All four body
/// corners are kept inside [corridor_min, corridor_max] on the same axis.
struct Reference {
  double heading = 0.0;
  double lateral = 0.185;
  double v_ref = 0.6;
  double corridor_min = 0.0;
  double corridor_max = 0.74;
};

struct AgentConfig {
  AgentKind kind = AgentKind::kMpc;
  double safety_weight = 0.0;  // w_safe; zero for aggressive agents
  Reference reference;
  int horizon = 30;
  double ts = 0.1;
  Vec4 q_diag{0.05, 4.0, 2.0, 2.0};  // longitudinal, lateral, heading, speed
  Vec2 r_diag{0.5, 0.5};
  double kappa = 2.0;
  SaturationBounds bounds;
  VehicleDims dims;

  void validate() const;
};

/// Reference state at horizon step k from the agent's current pose.
VehicleState reference_state(const AgentConfig& cfg, const VehicleState& s, int k);

/// Minimizes tracking plus w_safe * exp(kappa (1 - omega)) against the ego's
/// plan. ego_plan.states[k] must be the ego at the agent's k-th step.
Plan agent_plan(const AgentConfig& cfg, const VehicleState& s, const Plan& ego_plan,
                const EllipseFootprint& fp, const std::optional<Plan>& warm_start = std::nullopt,
                shooting::Status* status = nullptr);

struct AgentStep {
  ControlInput u_apply;
  Plan plan;
  shooting::Status status = shooting::Status::kMaxIterations;
};

AgentStep agent_step(const AgentConfig& cfg, const VehicleState& s, const Plan& ego_plan,
                     const EllipseFootprint& fp,
                     const std::optional<Plan>& warm_start = std::nullopt);

}  // namespace pdrive::agents
