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

#include "pdrive/agents.hpp"

#include "pdrive/dynamics.hpp"
#include "pdrive/persuasion.hpp"

#include <algorithm>

namespace pdrive::agents {

void AgentConfig::validate() const {
  if (!(safety_weight >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "safety weight must be nonnegative");
  if (kind == AgentKind::kAggressive && safety_weight != 0.0)
    throw Error(ErrorCode::kInvalidArgument, "aggressive agents have zero safety weight");
  if (!(reference.corridor_max - reference.corridor_min > dims.w_v))
    throw Error(ErrorCode::kInvalidArgument, "agent corridor narrower than the vehicle");
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "agent horizon must be positive");
  if (!((q_diag.array() > 0.0).all() && (r_diag.array() > 0.0).all()))
    throw Error(ErrorCode::kNonPositiveDefinite, "agent tracking weights must be positive");
  bounds.validate();
  dims.validate();
}

VehicleState reference_state(const AgentConfig& cfg, const VehicleState& s, int k) {
  const Vec2 dir(std::cos(cfg.reference.heading), std::sin(cfg.reference.heading));
  const Vec2 normal(-dir[1], dir[0]);
  const double along = dir.dot(Vec2(s.x, s.y)) + cfg.reference.v_ref * cfg.ts * k;
  const Vec2 p = along * dir + cfg.reference.lateral * normal;
  return {p[0], p[1], cfg.reference.heading, cfg.reference.v_ref};
}

namespace {

class AgentObjective final : public shooting::Objective {
 public:
  AgentObjective(const AgentConfig& cfg, const VehicleState& s, const Plan& ego,
                 const EllipseFootprint& fp)
      : cfg_(cfg), ego_(ego), fp_(fp), q_(cfg.q_diag.asDiagonal()), r_(cfg.r_diag.asDiagonal()) {
    refs_.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int k = 1; k <= cfg.horizon; ++k) refs_.push_back(reference_state(cfg, s, k).vec());
  }

  double stage_cost(int t, const VehicleState& x, Vec4& grad) const override {
    const Vec4 e = x.vec() - refs_[static_cast<std::size_t>(t)];
    double cost = e.dot(q_ * e);
    grad = 2.0 * q_ * e;
    if (cfg_.safety_weight > 0.0) {
      const VehicleState& xe = ego_.states[static_cast<std::size_t>(t + 1)];
      const auto od = persuasion::omega_derivatives(x, xe, fp_);
      const double barrier = cfg_.safety_weight * std::exp(cfg_.kappa * (1.0 - od.value));
      cost += barrier;
      grad -= cfg_.kappa * barrier * od.grad_receiver;
    }
    return cost;
  }

  void stage_constraints(int, const VehicleState& x,
                         shooting::StageConstraints& out) const override {
    out.add(cfg_.bounds.v_min + 1e-3 - x.v, Vec4(0, 0, 0, -1));
    out.add(x.v - (cfg_.bounds.v_max - 1e-3), Vec4(0, 0, 0, 1));
    const Reference& ref = cfg_.reference;
    const double nx = -std::sin(ref.heading);
    const double ny = std::cos(ref.heading);
    const double c = std::cos(x.theta);
    const double s = std::sin(x.theta);
    for (int i = 0; i < 4; ++i) {
      const Vec2 o = dynamics::corner_offset(i, cfg_.dims);
      const double px = x.x + o[0] * c - o[1] * s;
      const double py = x.y + o[0] * s + o[1] * c;
      const double lat = nx * px + ny * py;
      const Vec4 dlat(nx, ny, nx * (-o[0] * s - o[1] * c) + ny * (o[0] * c - o[1] * s), 0.0);
      out.add(ref.corridor_min + 1e-3 - lat, -dlat);
      out.add(lat - (ref.corridor_max - 1e-3), dlat);
    }
  }

  double stage_violation(int, const VehicleState& x) const override {
    double worst = std::max(cfg_.bounds.v_min - x.v, x.v - cfg_.bounds.v_max);
    const Reference& ref = cfg_.reference;
    const Vec2 n(-std::sin(ref.heading), std::cos(ref.heading));
    for (const Vec2& p : dynamics::corners(x, cfg_.dims))
      worst = std::max({worst, ref.corridor_min - n.dot(p), n.dot(p) - ref.corridor_max});
    return worst;
  }

  double input_cost(std::span<const ControlInput> u, Eigen::VectorXd& grad) const override {
    double total = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
      const Vec2 uv = u[t].vec();
      total += uv.dot(r_ * uv);
      grad.segment<2>(2 * static_cast<Eigen::Index>(t)) += 2.0 * r_ * uv;
    }
    return total;
  }

 private:
  const AgentConfig& cfg_;
  const Plan& ego_;
  EllipseFootprint fp_;
  Mat4 q_;
  Mat2 r_;
  std::vector<Vec4> refs_;
};

}  // namespace

Plan agent_plan(const AgentConfig& cfg, const VehicleState& s, const Plan& ego_plan,
                const EllipseFootprint& fp, const std::optional<Plan>& warm_start,
                shooting::Status* status) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.horizon);
  if (cfg.safety_weight > 0.0 && ego_plan.states.size() < n + 1)
    throw Error(ErrorCode::kHorizonMismatch, "ego plan shorter than the agent horizon");

  const AgentObjective objective(cfg, s, ego_plan, fp);
  shooting::Problem sp;
  sp.x0 = s;
  sp.dims = cfg.dims;
  sp.ts = cfg.ts;
  sp.lower.assign(n, {cfg.bounds.a_min, cfg.bounds.delta_min});
  sp.upper.assign(n, {cfg.bounds.a_max, cfg.bounds.delta_max});
  sp.lower[0].a = std::max(cfg.bounds.a_min, (cfg.bounds.v_min - s.v) / cfg.ts);
  sp.upper[0].a = std::min(cfg.bounds.a_max, (cfg.bounds.v_max - s.v) / cfg.ts);
  if (sp.lower[0].a > sp.upper[0].a) sp.lower[0].a = sp.upper[0].a;

  // The safety term makes the problem nonconvex (pass vs. yield), so try a
  // few deterministic starts and keep the cheapest feasible result.
  std::vector<std::vector<ControlInput>> starts;
  if (warm_start && warm_start->inputs.size() == n) starts.push_back(warm_start->inputs);
  starts.emplace_back(n);
  if (cfg.safety_weight > 0.0) {
    starts.emplace_back(n, ControlInput{0.5 * cfg.bounds.a_min, 0.0});
    starts.emplace_back(n, ControlInput{cfg.bounds.a_min, 0.0});
  }
  shooting::Result r;
  bool have = false;
  for (auto& start : starts) {
    shooting::Result cand = shooting::solve(sp, objective, std::move(start));
    const auto rank = [](const shooting::Result& x) {
      return std::pair(x.status == shooting::Status::kInfeasible ? 1 : 0, x.cost);
    };
    if (!have || rank(cand) < rank(r)) {
      r = std::move(cand);
      have = true;
    }
  }
  if (status != nullptr) *status = r.status;
  Plan plan;
  plan.ts = cfg.ts;
  plan.states = r.states;
  plan.inputs = r.inputs;
  return plan;
}

AgentStep agent_step(const AgentConfig& cfg, const VehicleState& s, const Plan& ego_plan,
                     const EllipseFootprint& fp, const std::optional<Plan>& warm_start) {
  AgentStep out;
  out.plan = agent_plan(cfg, s, ego_plan, fp, warm_start, &out.status);
  out.u_apply = out.plan.inputs.front();
  return out;
}

}  // namespace pdrive::agents
