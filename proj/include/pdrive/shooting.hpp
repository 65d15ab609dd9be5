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

// Single-shooting trajectory optimizer over bicycle-model inputs. State
// constraints g <= 0 enter through an augmented Lagrangian
//   (max(0, lambda + 2 rho g)^2 - lambda^2) / (4 rho),
// which is rho * max(0, g)^2 at lambda = 0. Multipliers are updated between
// inner solves and rho is raised on a schedule while the violation stalls.
// Input bounds are kept exactly by projection. Each inner iteration takes a
// trust-region Newton step on the free variables using an analytic gradient
// (adjoint pass) and a finite-difference Hessian of that gradient.

#include "pdrive/types.hpp"

#include <span>
#include <vector>

namespace pdrive::shooting {

/// Constraint values g <= 0 of one stage with their state gradients.
struct StageConstraints {
  std::vector<double> g;
  std::vector<Vec4> dg;

  void add(double value, const Vec4& grad) {
    g.push_back(value);
    dg.push_back(grad);
  }
  void clear() {
    g.clear();
    dg.clear();
  }
};

/// Costs of one horizon. Stage t refers to the state reached after input t.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double stage_cost(int t, const VehicleState& x, Vec4& grad) const = 0;
  /// Buffered smooth constraints of stage t. The count must not depend on x.
  virtual void stage_constraints(int t, const VehicleState& x, StageConstraints& out) const = 0;
  /// Largest violation of the unbuffered hard state constraints (<= 0 when met).
  virtual double stage_violation(int t, const VehicleState& x) const = 0;
  /// Cost on the inputs; grad has two entries per input (a, delta), accumulated.
  virtual double input_cost(std::span<const ControlInput> u, Eigen::VectorXd& grad) const = 0;
};

/// sum max(0, g)^2 over the stage's constraints, with its gradient.
double stage_penalty(const Objective& objective, int t, const VehicleState& x, Vec4& grad);

struct Options {
  double rho_initial = 1e2;
  double rho_final = 1e5;
  double rho_factor = 10.0;
  int max_iterations = 400;        // inner iterations across all outer rounds
  int max_outer = 30;
  double kkt_tolerance = 1e-5;     // projected gradient of the final smoothed problem
  double constraint_tolerance = 1e-5;  // on the buffered constraints
  double audit_tolerance = 1e-4;   // on the hard constraints
  double fd_step = 1e-7;
};

enum class Status { kConverged, kMaxIterations, kInfeasible };

const char* to_string(Status s);

/// Per-stage multipliers, indexed [t][j].
using Multipliers = std::vector<std::vector<double>>;

struct Result {
  std::vector<ControlInput> inputs;
  std::vector<VehicleState> states;  // N + 1, states[0] = x0
  std::vector<double> stage_costs;   // N stage costs (input cost excluded)
  double input_cost = 0.0;
  double cost = 0.0;                 // stage costs + input cost, no penalty
  double penalty = 0.0;              // unweighted sum max(0, g)^2
  double max_violation = 0.0;        // hard constraints, x0 included
  double kkt_residual = 0.0;
  double rho = 0.0;
  Multipliers multipliers;           // after the last update
  int iterations = 0;
  Status status = Status::kMaxIterations;
};

/// Multipliers and penalty weight carried over from an earlier solve.
struct DualStart {
  Multipliers multipliers;
  double rho = 0.0;
};

struct Problem {
  VehicleState x0;
  VehicleDims dims;
  double ts = 0.1;
  // Per-input box bounds; size = horizon.
  std::vector<ControlInput> lower;
  std::vector<ControlInput> upper;
};

/// Minimizes objective over the inputs starting from `initial` (clamped into
/// the box). `initial.size()` fixes the horizon. When the start point already
/// meets every constraint and the solve ends at a higher cost, the start is
/// returned instead. A dual start whose shape does not match the constraint
/// layout is ignored; its rho is clamped into [rho_initial, rho_final].
Result solve(const Problem& problem, const Objective& objective,
             std::vector<ControlInput> initial, const Options& options = {},
             const DualStart* dual = nullptr);

/// Smoothed objective value with its input gradient. Without multipliers the
/// constraint term is rho * sum max(0, g)^2.
double evaluate(const Problem& problem, const Objective& objective,
                std::span<const ControlInput> inputs, double rho, Eigen::VectorXd* grad,
                const Multipliers* multipliers = nullptr);

}  // namespace pdrive::shooting
