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

#include <memory>
#include <optional>
#include <vector>

namespace pdrive::planner {

/// A surrounding vehicle as seen by the ego: its predicted plan (states[0] is
/// its state at the ego's t0) and safety ellipse. Only the persuadee
/// contributes the perceived-conservativeness term to the cost.
struct Obstacle {
  Plan prediction;
  EllipseFootprint footprint;
  bool persuadee = false;
};

struct PlannerProblem {
  VehicleState x0;
  long t0 = 0;
  int horizon = 30;
  double ts = 0.1;
  VehicleState goal;
  std::vector<Obstacle> obstacles;
  BeliefState beliefs;
  CostWeights weights;
  SaturationBounds bounds;
  LaneGeometry lane;
  VehicleDims dims;
  ControlInput u_prev;  // last applied input, for the input-change term
  std::optional<Plan> warm_start;
  std::optional<shooting::DualStart> warm_dual;  // used together with warm_start
};

/// Buffers added to the hard constraints inside the penalty.
struct PenaltyConfig {
  double ellipse_buffer = 2e-3;
  double lane_buffer = 1e-3;
  double speed_buffer = 1e-3;
};

struct PlannerOptions {
  shooting::Options solver;
  PenaltyConfig penalty;
};

struct PlannerSolution {
  Plan plan;
  std::vector<double> stage_costs;  // J_t, input-change term included
  double total_cost = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  shooting::Status status = shooting::Status::kMaxIterations;
  shooting::DualStart dual;
};

/// Hard-constraint check of x0 against the lane, speed and obstacle ellipses.
/// Returns the largest violation (<= 0 when feasible).
double initial_violation(const PlannerProblem& p);

/// Smoothed objective of the receding-horizon problem: stage costs from the
/// Laplace reduction, input-change cost, and max(0, g)^2 constraint terms.
std::unique_ptr<shooting::Objective> smooth_constraints(const PlannerProblem& p,
                                                        const PenaltyConfig& cfg = {});

/// Solves the horizon problem from x0. Throws kInfeasible when x0 itself
/// violates a hard constraint.
PlannerSolution solve(const PlannerProblem& p, const PlannerOptions& options = {});

struct RecedingStep {
  ControlInput u_apply;
  PlannerSolution solution;
  Plan next_warm_start;  // plan shifted by one step, last input repeated
  shooting::DualStart next_warm_dual;  // multipliers shifted the same way
};

/// solve() and extract the first input. Throws kInfeasible when the first
/// planned step breaks a hard constraint.
RecedingStep receding_step(const PlannerProblem& p, const PlannerOptions& options = {});

/// Shifts a plan by one step, repeating the last input.
Plan shift_plan(const Plan& plan, const VehicleDims& dims);

/// Drops the first stage's multipliers and repeats the last stage's.
shooting::DualStart shift_dual(const shooting::DualStart& dual);

/// Inputs of the constant-speed, zero-steer rollout used for cold starts.
std::vector<ControlInput> cold_start(int horizon);

}  // namespace pdrive::planner
