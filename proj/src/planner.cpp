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

#include "pdrive/planner.hpp"

#include "pdrive/dynamics.hpp"
#include "pdrive/persuasion.hpp"

#include <algorithm>
#include <string>

namespace pdrive::planner {

namespace {

using persuasion::LaplaceReduction;

class EgoObjective final : public shooting::Objective {
 public:
  EgoObjective(const PlannerProblem& p, const PenaltyConfig& cfg) : p_(p), cfg_(cfg) {
    laplace_.reserve(static_cast<std::size_t>(p.horizon));
    for (int t = 0; t < p.horizon; ++t)
      laplace_.emplace_back(p.beliefs.at(static_cast<std::size_t>(t)).sigma_xe, p.weights);
    for (std::size_t i = 0; i < p.obstacles.size(); ++i)
      if (p.obstacles[i].persuadee) persuadee_ = static_cast<int>(i);
  }

  double stage_cost(int t, const VehicleState& x, Vec4& grad) const override {
    const LaplaceReduction& lr = laplace_[static_cast<std::size_t>(t)];
    std::optional<persuasion::Persuadee> ps;
    if (persuadee_ >= 0) {
      const Obstacle& ob = p_.obstacles[static_cast<std::size_t>(persuadee_)];
      ps = persuasion::Persuadee{ob.prediction.states[static_cast<std::size_t>(t + 1)],
                                 ob.footprint};
      // Linearization is undefined at zero separation; the penalty keeps
      // iterates away from it, so just drop the term there.
      if (persuasion::omega(ps->predicted, x, ps->footprint) < 1e-9) ps.reset();
    }
    const auto r = lr.planner_cost(x.vec(), p_.goal.vec(), ps ? &*ps : nullptr);
    grad = r.grad;
    return r.value;
  }

  void stage_constraints(int t, const VehicleState& x,
                         shooting::StageConstraints& out) const override {
    const SaturationBounds& b = p_.bounds;
    out.add(b.v_min + cfg_.speed_buffer - x.v, Vec4(0, 0, 0, -1));
    out.add(x.v - (b.v_max - cfg_.speed_buffer), Vec4(0, 0, 0, 1));

    const double c = std::cos(x.theta);
    const double s = std::sin(x.theta);
    for (int i = 0; i < 4; ++i) {
      const Vec2 o = dynamics::corner_offset(i, p_.dims);
      const double yi = x.y + o[0] * s + o[1] * c;
      const Vec4 dyi(0, 1, o[0] * c - o[1] * s, 0);
      out.add(p_.lane.y_min + cfg_.lane_buffer - yi, -dyi);
      out.add(yi - (p_.lane.y_max - cfg_.lane_buffer), dyi);
    }

    for (const Obstacle& ob : p_.obstacles) {
      const auto od = persuasion::omega_derivatives(
          ob.prediction.states[static_cast<std::size_t>(t + 1)], x, ob.footprint);
      Vec4 dg = Vec4::Zero();
      dg.head<2>() = -od.grad_ego;
      out.add(1.0 + cfg_.ellipse_buffer - od.value, dg);
    }
  }

  double stage_violation(int t, const VehicleState& x) const override {
    const SaturationBounds& b = p_.bounds;
    double worst = std::max(b.v_min - x.v, x.v - b.v_max);
    for (const Vec2& cpt : dynamics::corners(x, p_.dims))
      worst = std::max({worst, p_.lane.y_min - cpt[1], cpt[1] - p_.lane.y_max});
    for (const Obstacle& ob : p_.obstacles) {
      const double om = persuasion::omega(
          ob.prediction.states[static_cast<std::size_t>(t + 1)], x, ob.footprint);
      worst = std::max(worst, 1.0 - om);
    }
    return worst;
  }

  double input_cost(std::span<const ControlInput> u, Eigen::VectorXd& grad) const override {
    double total = 0.0;
    Vec2 prev = p_.u_prev.vec();
    for (std::size_t t = 0; t < u.size(); ++t) {
      const Vec2 cur = u[t].vec();
      const Vec2 du = cur - prev;
      const Vec2 g = 2.0 * p_.weights.W3 * du;
      total += du.dot(p_.weights.W3 * du);
      grad.segment<2>(2 * static_cast<Eigen::Index>(t)) += g;
      if (t > 0) grad.segment<2>(2 * static_cast<Eigen::Index>(t - 1)) -= g;
      prev = cur;
    }
    return total;
  }

 private:
  const PlannerProblem& p_;
  PenaltyConfig cfg_;
  std::vector<LaplaceReduction> laplace_;
  int persuadee_ = -1;
};

void check_problem(const PlannerProblem& p) {
  if (p.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  validate_weights(p.weights);
  p.beliefs.validate();
  p.bounds.validate();
  p.lane.validate();
  p.dims.validate();
  for (const Obstacle& ob : p.obstacles) {
    ob.footprint.validate();
    if (ob.prediction.states.size() < static_cast<std::size_t>(p.horizon) + 1)
      throw Error(ErrorCode::kHorizonMismatch, "obstacle prediction shorter than the horizon");
  }
  if (!p.x0.finite()) throw Error(ErrorCode::kInvalidArgument, "x0 must be finite");
}

}  // namespace

std::vector<ControlInput> cold_start(int horizon) {
  return std::vector<ControlInput>(static_cast<std::size_t>(horizon));
}

std::unique_ptr<shooting::Objective> smooth_constraints(const PlannerProblem& p,
                                                        const PenaltyConfig& cfg) {
  check_problem(p);
  return std::make_unique<EgoObjective>(p, cfg);
}

double initial_violation(const PlannerProblem& p) {
  return EgoObjective(p, {}).stage_violation(-1, p.x0);
}

PlannerSolution solve(const PlannerProblem& p, const PlannerOptions& options) {
  check_problem(p);
  const EgoObjective objective(p, options.penalty);
  const double v0 = objective.stage_violation(-1, p.x0);
  if (v0 > options.solver.audit_tolerance)
    throw Error(ErrorCode::kInfeasible,
                "initial state violates a hard constraint by " + std::to_string(v0));

  shooting::Problem sp;
  sp.x0 = p.x0;
  sp.dims = p.dims;
  sp.ts = p.ts;
  const auto n = static_cast<std::size_t>(p.horizon);
  sp.lower.assign(n, {p.bounds.a_min, p.bounds.delta_min});
  sp.upper.assign(n, {p.bounds.a_max, p.bounds.delta_max});
  // The first step's speed is linear in a_0, so its bounds are kept exactly.
  sp.lower[0].a = std::max(p.bounds.a_min, (p.bounds.v_min - p.x0.v) / p.ts);
  sp.upper[0].a = std::min(p.bounds.a_max, (p.bounds.v_max - p.x0.v) / p.ts);
  if (sp.lower[0].a > sp.upper[0].a) sp.lower[0].a = sp.upper[0].a;

  const bool warm = p.warm_start && p.warm_start->inputs.size() == n;
  std::vector<ControlInput> initial = warm ? p.warm_start->inputs : cold_start(p.horizon);
  const shooting::DualStart* dual = warm && p.warm_dual ? &*p.warm_dual : nullptr;

  shooting::Result r = shooting::solve(sp, objective, initial, options.solver, dual);
  // Pass-in-front vs. fall-behind is decided by the start point. When the
  // primary start lands in an infeasible basin, retry from cold and braking
  // starts and keep the best feasible result.
  if (r.status == shooting::Status::kInfeasible) {
    std::vector<std::vector<ControlInput>> retries{
        cold_start(p.horizon),
        std::vector<ControlInput>(n, ControlInput{0.5 * p.bounds.a_min, 0.0}),
        std::vector<ControlInput>(n, ControlInput{p.bounds.a_min, 0.0})};
    for (auto& start : retries) {
      if (start == initial) continue;
      shooting::Result cand = shooting::solve(sp, objective, std::move(start), options.solver);
      const auto rank = [](const shooting::Result& x) {
        return std::pair(x.status == shooting::Status::kInfeasible ? 1 : 0, x.cost);
      };
      if (rank(cand) < rank(r)) r = std::move(cand);
    }
  }

  PlannerSolution sol;
  sol.plan.t0 = p.t0;
  sol.plan.ts = p.ts;
  sol.plan.states = r.states;
  sol.plan.inputs = r.inputs;
  sol.stage_costs = r.stage_costs;
  Vec2 prev = p.u_prev.vec();
  for (std::size_t t = 0; t < n; ++t) {
    const Vec2 du = r.inputs[t].vec() - prev;
    sol.stage_costs[t] += du.dot(p.weights.W3 * du);
    prev = r.inputs[t].vec();
  }
  sol.total_cost = 0.0;
  for (double j : sol.stage_costs) sol.total_cost += j;
  sol.iterations = r.iterations;
  sol.kkt_residual = r.kkt_residual;
  sol.max_violation = r.max_violation;
  sol.status = r.status;
  sol.dual = {std::move(r.multipliers), r.rho};
  return sol;
}

Plan shift_plan(const Plan& plan, const VehicleDims& dims) {
  if (plan.inputs.empty()) return plan;
  std::vector<ControlInput> us(plan.inputs.begin() + 1, plan.inputs.end());
  us.push_back(plan.inputs.back());
  return dynamics::rollout(plan.states[1], us, dims, plan.ts, plan.t0 + 1);
}

shooting::DualStart shift_dual(const shooting::DualStart& dual) {
  shooting::DualStart out{{}, dual.rho};
  if (dual.multipliers.empty()) return out;
  out.multipliers.assign(dual.multipliers.begin() + 1, dual.multipliers.end());
  out.multipliers.push_back(dual.multipliers.back());
  return out;
}

RecedingStep receding_step(const PlannerProblem& p, const PlannerOptions& options) {
  RecedingStep out;
  out.solution = solve(p, options);
  const EgoObjective objective(p, options.penalty);
  const double first = objective.stage_violation(0, out.solution.plan.states[1]);
  if (first > options.solver.audit_tolerance)
    throw Error(ErrorCode::kInfeasible,
                "first planned step violates a hard constraint by " + std::to_string(first));
  out.u_apply = out.solution.plan.inputs.front();
  out.next_warm_start = shift_plan(out.solution.plan, p.dims);
  out.next_warm_dual = shift_dual(out.solution.dual);
  return out;
}

}  // namespace pdrive::planner
