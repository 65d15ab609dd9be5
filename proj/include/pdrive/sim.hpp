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

// Closed-loop simulation of the ego planner against MPC surrounding agents.

#include "pdrive/adaptation.hpp"
#include "pdrive/agents.hpp"
#include "pdrive/planner.hpp"
#include "pdrive/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdrive::sim {

struct AgentSpec {
  std::string name;
  agents::AgentConfig config;
  VehicleState initial;
  EllipseFootprint footprint;
  bool persuadee = false;  // the vehicle the ego tries to persuade
};

struct ScenarioConfig {
  std::string name;
  std::vector<AgentSpec> agents;
  VehicleState ego_init;
  VehicleState ego_goal;
  LaneGeometry lane;
  VehicleDims dims;
  SaturationBounds bounds;
  CostWeights weights;
  BeliefState beliefs;
  AdaptationParams adaptation;
  bool adapt = true;
  planner::PlannerOptions planner;
  int horizon = 30;
  double ts = 0.1;
  int steps = 150;
  double goal_position_tol = 0.05;
  double goal_speed_tol = 0.1;

  /// Throws kConfig for broken invariants, kInfeasible for overlapping starts.
  void validate() const;
};

struct VehicleRecord {
  std::string name;
  VehicleState state;
  ControlInput input;
  double omega_hat = 0.0;  // agents: omega(agent, ego); ego: min over agents
  std::string status;      // solver status, or "fallback" / "final"
};

/// One simulation step. vehicles[0] is the ego.
struct StepRecord {
  int step = 0;
  double time_s = 0.0;
  double wall_s = 0.0;  // solve time, not written to the CSV
  std::vector<VehicleRecord> vehicles;
  double alpha = 0.0;
  double beta = 0.0;
  double j_total = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  double w1 = 0.0;
  double sigma_xe = 0.0;
  double min_omega = 0.0;  // smallest pairwise omega at the recorded states
  std::string error;  // planner error text when the fallback input was used
};

enum class Outcome { kCompleted, kGoalReached, kSafetyBreach };

const char* to_string(Outcome o);

struct SimLog {
  std::string scenario;
  double ts = 0.1;
  std::vector<StepRecord> records;
  Outcome outcome = Outcome::kCompleted;
  int completion_step = -1;  // step of goal arrival, -1 when not reached
  std::string breach;        // description of the first safety breach
};

/// Pairwise omega between two vehicles: the smaller of both orderings.
double pairwise_omega(const VehicleState& a, const EllipseFootprint& fa, const VehicleState& b,
                      const EllipseFootprint& fb);

/// Smallest pairwise omega at the initial states.
double initial_min_omega(const ScenarioConfig& cfg);

SimLog run(const ScenarioConfig& cfg);

/// lane_change, lane_keep, intersection, with the nice driver as persuadee.
std::vector<ScenarioConfig> builtin_scenarios();
std::vector<std::string> builtin_names();

/// Throws kConfig listing the valid names when `name` is unknown.
ScenarioConfig builtin(const std::string& name);

/// Sets the safety weight of the persuadee agent (MPC kind).
void set_driver(ScenarioConfig& cfg, double w_safe);

/// Safety weight of the "nice" driver preset.
inline constexpr double kNiceSafetyWeight = 10.0;

/// Braking input used when the planner fails.
ControlInput fallback_input(const VehicleState& s, const SaturationBounds& b, double ts);

}  // namespace pdrive::sim
