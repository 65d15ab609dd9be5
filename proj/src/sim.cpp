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


#include "pdrive/sim.hpp"

#include "pdrive/dynamics.hpp"
#include "pdrive/persuasion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace pdrive::sim {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kCompleted: return "completed";
    case Outcome::kGoalReached: return "goal_reached";
    case Outcome::kSafetyBreach: return "safety_breach";
  }
  return "unknown";
}

double pairwise_omega(const VehicleState& a, const EllipseFootprint& fa, const VehicleState& b,
                      const EllipseFootprint& fb) {
  return std::min(persuasion::omega(a, b, fa), persuasion::omega(b, a, fb));
}

namespace {

// Smallest omega over all pairs; agent ellipses are centered on the agent for
// ego-agent pairs, matching the planner's constraint.
double min_omega(const VehicleState& ego, const std::vector<VehicleState>& xs,
                 const std::vector<AgentSpec>& specs, std::string* which) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double om = persuasion::omega(xs[i], ego, specs[i].footprint);
    if (om < worst) {
      worst = om;
      if (which) *which = "ego/" + specs[i].name;
    }
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double oa = pairwise_omega(xs[i], specs[i].footprint, xs[j], specs[j].footprint);
      if (oa < worst) {
        worst = oa;
        if (which) *which = specs[i].name + "/" + specs[j].name;
      }
    }
  }
  return worst;
}

Plan hold_plan(const VehicleState& s, const ControlInput& u, int horizon, const VehicleDims& d,
               double ts, long t0) {
  return dynamics::rollout(s, std::vector<ControlInput>(static_cast<std::size_t>(horizon), u), d,
                           ts, t0);
}

double ego_min_omega(const VehicleState& ego, const std::vector<VehicleState>& xs,
                     const std::vector<AgentSpec>& specs) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i)
    m = std::min(m, persuasion::omega(xs[i], ego, specs[i].footprint));
  return m;
}

double isotropic_sigma(const BeliefState& bs) { return bs.at(0).sigma_xe(0, 0); }

}  // namespace

double initial_min_omega(const ScenarioConfig& cfg) {
  std::vector<VehicleState> xs;
  for (const AgentSpec& a : cfg.agents) xs.push_back(a.initial);
  return min_omega(cfg.ego_init, xs, cfg.agents, nullptr);
}

void ScenarioConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (horizon < 1) fail("horizon must be positive");
  if (!(ts > 0.0)) fail("ts must be positive");
  if (steps < 0) fail("steps must be nonnegative");
  try {
    lane.validate();
    dims.validate();
    bounds.validate();
    validate_weights(weights);
    beliefs.validate();
    adaptation.validate();
    for (const AgentSpec& a : agents) {
      a.config.validate();
      a.footprint.validate();
      if (a.config.horizon != horizon)
        throw Error(ErrorCode::kHorizonMismatch, "agent " + a.name + " horizon differs");
    }
  } catch (const Error& e) {
    fail(std::string("scenario ") + name + ": " + e.what());
  }
  int persuadees = 0;
  for (const AgentSpec& a : agents) persuadees += a.persuadee ? 1 : 0;
  if (persuadees > 1) fail("at most one agent may be the persuadee");
  if (!ego_init.finite() || !ego_goal.finite()) fail("ego states must be finite");
  const double om = initial_min_omega(*this);
  if (om < 1.0)
    throw Error(ErrorCode::kInfeasible, "initial states overlap (omega " + std::to_string(om) + ")");
}

ControlInput fallback_input(const VehicleState& s, const SaturationBounds& b, double ts) {
  return {std::max(b.a_min, (b.v_min - s.v) / ts), 0.0};
}

SimLog run(const ScenarioConfig& cfg) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;

  SimLog log;
  log.scenario = cfg.name;
  log.ts = cfg.ts;

  const std::size_t na = cfg.agents.size();
  VehicleState ego = cfg.ego_init;
  std::vector<VehicleState> xs(na);
  for (std::size_t i = 0; i < na; ++i) xs[i] = cfg.agents[i].initial;

  BeliefState beliefs = cfg.beliefs;
  CostWeights weights = cfg.weights;
  ControlInput u_prev{};
  std::optional<Plan> ego_prev;
  std::optional<Plan> ego_warm;
  std::optional<shooting::DualStart> ego_dual;
  std::optional<Plan> ego_seen;  // ego plan the agents read, aligned to the current step
  std::vector<std::optional<Plan>> agent_warm(na);
  std::optional<Plan> persuadee_prev;
  int persuadee = -1;
  for (std::size_t i = 0; i < na; ++i)
    if (cfg.agents[i].persuadee) persuadee = static_cast<int>(i);

  double alpha = 0.0;
  double beta = 0.0;

  const auto final_record = [&](int k, const std::string& status) {
    StepRecord rec;
    rec.step = k;
    rec.time_s = k * cfg.ts;
    rec.alpha = alpha;
    rec.beta = beta;
    rec.w1 = weights.w1;
    rec.sigma_xe = isotropic_sigma(beliefs);
    rec.min_omega = min_omega(ego, xs, cfg.agents, nullptr);
    rec.vehicles.push_back({"ego", ego, {}, ego_min_omega(ego, xs, cfg.agents), status});
    for (std::size_t i = 0; i < na; ++i)
      rec.vehicles.push_back({cfg.agents[i].name, xs[i], {},
                              persuasion::omega(xs[i], ego, cfg.agents[i].footprint), status});
    log.records.push_back(std::move(rec));
  };

  // Without a previous ego plan, agents would react to a placeholder. Seed it
  // with an ego solve against constant-input agent predictions.
  {
    planner::PlannerProblem p0;
    p0.x0 = ego;
    p0.horizon = cfg.horizon;
    p0.ts = cfg.ts;
    p0.goal = cfg.ego_goal;
    p0.beliefs = beliefs;
    p0.weights = weights;
    p0.bounds = cfg.bounds;
    p0.lane = cfg.lane;
    p0.dims = cfg.dims;
    for (std::size_t i = 0; i < na; ++i)
      p0.obstacles.push_back({hold_plan(xs[i], {}, cfg.horizon, cfg.agents[i].config.dims,
                                        cfg.ts, 0),
                              cfg.agents[i].footprint, cfg.agents[i].persuadee});
    try {
      const planner::PlannerSolution s0 = planner::solve(p0, cfg.planner);
      ego_seen = s0.plan;
      ego_seen->t0 = 0;
      ego_warm = s0.plan;
    } catch (const Error&) {
      // Agents see the constant-input placeholder instead.
    }
  }

  for (int k = 0;; ++k) {
    if (k >= cfg.steps) {
      final_record(k, "final");
      log.outcome = Outcome::kCompleted;
      break;
    }
    const auto t_start = Clock::now();
    StepRecord rec;
    rec.step = k;
    rec.time_s = k * cfg.ts;

    // (1) Agents plan against the ego's previous plan, aligned to step k.
    const Plan ego_pred = ego_seen ? *ego_seen : hold_plan(ego, {}, cfg.horizon, cfg.dims, cfg.ts, k);
    std::vector<agents::AgentStep> steps(na);
    for (std::size_t i = 0; i < na; ++i) {
      const AgentSpec& a = cfg.agents[i];
      steps[i] = agents::agent_step(a.config, xs[i], ego_pred, a.footprint, agent_warm[i]);
      steps[i].plan.t0 = k;
    }

    // (2) Ego plans against the agents' fresh plans.
    planner::PlannerProblem p;
    p.x0 = ego;
    p.t0 = k;
    p.horizon = cfg.horizon;
    p.ts = cfg.ts;
    p.goal = cfg.ego_goal;
    p.beliefs = beliefs;
    p.weights = weights;
    p.bounds = cfg.bounds;
    p.lane = cfg.lane;
    p.dims = cfg.dims;
    p.u_prev = u_prev;
    p.warm_start = ego_warm;
    p.warm_dual = ego_dual;
    for (std::size_t i = 0; i < na; ++i)
      p.obstacles.push_back({steps[i].plan, cfg.agents[i].footprint, cfg.agents[i].persuadee});

    ControlInput u_ego;
    Plan ego_plan;
    std::string ego_status;
    try {
      const planner::RecedingStep rs = planner::receding_step(p, cfg.planner);
      u_ego = rs.u_apply;
      ego_plan = rs.solution.plan;
      ego_warm = rs.next_warm_start;
      ego_dual = rs.next_warm_dual;
      ego_status = shooting::to_string(rs.solution.status);
      rec.j_total = rs.solution.total_cost;
      rec.kkt_residual = rs.solution.kkt_residual;
      rec.iterations = rs.solution.iterations;
    } catch (const Error& e) {
      u_ego = fallback_input(ego, cfg.bounds, cfg.ts);
      ego_plan = hold_plan(ego, u_ego, cfg.horizon, cfg.dims, cfg.ts, k);
      ego_warm.reset();
      ego_dual.reset();
      ego_status = "fallback";
      rec.error = e.what();
      rec.j_total = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_s = std::chrono::duration<double>(Clock::now() - t_start).count();

    rec.min_omega = min_omega(ego, xs, cfg.agents, nullptr);
    rec.vehicles.push_back({"ego", ego, u_ego, ego_min_omega(ego, xs, cfg.agents), ego_status});
    for (std::size_t i = 0; i < na; ++i)
      rec.vehicles.push_back({cfg.agents[i].name, xs[i], steps[i].u_apply,
                              persuasion::omega(xs[i], ego, cfg.agents[i].footprint),
                              shooting::to_string(steps[i].status)});

    // (3) Everyone applies their first input.
    ego = dynamics::step(ego, u_ego, cfg.dims, cfg.ts);
    for (std::size_t i = 0; i < na; ++i) {
      xs[i] = dynamics::step(xs[i], steps[i].u_apply, cfg.agents[i].config.dims, cfg.ts);
      agent_warm[i] = planner::shift_plan(steps[i].plan, cfg.agents[i].config.dims);
    }
    u_prev = u_ego;

    // (4) Adaptation from the change between consecutive plans.
    if (cfg.adapt) {
      if (ego_prev) alpha = adaptation::alpha(ego_plan, *ego_prev, cfg.adaptation);
      if (persuadee >= 0 && persuadee_prev)
        beta = adaptation::beta(steps[static_cast<std::size_t>(persuadee)].plan, *persuadee_prev,
                                cfg.adaptation);
      if (ego_prev) {
        auto [bs, cw] = adaptation::update_beliefs(beliefs, weights, alpha, beta, cfg.adaptation);
        beliefs = std::move(bs);
        weights = cw;
      }
    }
    ego_prev = ego_plan;
    ego_seen = planner::shift_plan(ego_plan, cfg.dims);
    if (persuadee >= 0) persuadee_prev = steps[static_cast<std::size_t>(persuadee)].plan;
    rec.alpha = alpha;
    rec.beta = beta;
    rec.w1 = weights.w1;
    rec.sigma_xe = isotropic_sigma(beliefs);
    log.records.push_back(std::move(rec));

    std::string which;
    const double om = min_omega(ego, xs, cfg.agents, &which);
    if (om < 1.0) {
      std::ostringstream os;
      os << "omega " << om << " between " << which << " at step " << k + 1;
      log.breach = os.str();
      log.outcome = Outcome::kSafetyBreach;
      final_record(k + 1, "breach");
      break;
    }
    const double dpos = std::hypot(ego.x - cfg.ego_goal.x, ego.y - cfg.ego_goal.y);
    if (dpos < cfg.goal_position_tol && std::abs(ego.v - cfg.ego_goal.v) < cfg.goal_speed_tol) {
      log.outcome = Outcome::kGoalReached;
      log.completion_step = k + 1;
      final_record(k + 1, "final");
      break;
    }
  }
  return log;
}

void set_driver(ScenarioConfig& cfg, double w_safe) {
  if (!(w_safe >= 0.0)) throw Error(ErrorCode::kConfig, "driver safety weight must be >= 0");
  for (AgentSpec& a : cfg.agents) {
    if (!a.persuadee) continue;
    a.config.kind = agents::AgentKind::kMpc;
    a.config.safety_weight = w_safe;
    return;
  }
  throw Error(ErrorCode::kConfig, "scenario " + cfg.name + " has no persuadee agent");
}

}  // namespace pdrive::sim
