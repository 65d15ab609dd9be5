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


#include "pdrive/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pdrive::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, "config key '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) fail(join(path, k), "unknown key");
  }
}

void read(const json& obj, const char* key, const std::string& path, double& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) fail(join(path, key), "expected a number");
  out = it->get<double>();
}

void read(const json& obj, const char* key, const std::string& path, int& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) fail(join(path, key), "expected an integer");
  out = it->get<int>();
}

void read(const json& obj, const char* key, const std::string& path, bool& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_boolean()) fail(join(path, key), "expected true or false");
  out = it->get<bool>();
}

void read(const json& obj, const char* key, const std::string& path, std::string& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_string()) fail(join(path, key), "expected a string");
  out = it->get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

void read(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
  const auto it = obj.find(key);
  if (it != obj.end()) out = numbers(*it, join(path, key));
}

// A flat array is the diagonal; nested arrays are the full matrix.
template <int N>
void read_matrix(const json& obj, const char* key, const std::string& path,
                 Eigen::Matrix<double, N, N>& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string p = join(path, key);
  if (!it->is_array() || it->size() != static_cast<std::size_t>(N))
    fail(p, "expected " + std::to_string(N) + " diagonal entries or a " + std::to_string(N) +
                "x" + std::to_string(N) + " matrix");
  if ((*it)[0].is_array()) {
    for (int r = 0; r < N; ++r) {
      const std::string pr = p + "[" + std::to_string(r) + "]";
      const std::vector<double> row = numbers((*it)[static_cast<std::size_t>(r)], pr);
      if (row.size() != static_cast<std::size_t>(N)) fail(pr, "wrong row length");
      for (int c = 0; c < N; ++c) out(r, c) = row[static_cast<std::size_t>(c)];
    }
  } else {
    const std::vector<double> d = numbers(*it, p);
    out.setZero();
    for (int i = 0; i < N; ++i) out(i, i) = d[static_cast<std::size_t>(i)];
  }
}

template <int N>
void read_vector(const json& obj, const char* key, const std::string& path,
                 Eigen::Matrix<double, N, 1>& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::vector<double> d = numbers(*it, join(path, key));
  if (d.size() != static_cast<std::size_t>(N))
    fail(join(path, key), "expected " + std::to_string(N) + " numbers");
  for (int i = 0; i < N; ++i) out[i] = d[static_cast<std::size_t>(i)];
}

template <int N>
json matrix_json(const Eigen::Matrix<double, N, N>& m) {
  if (m.isDiagonal(0.0)) {
    json d = json::array();
    for (int i = 0; i < N; ++i) d.push_back(m(i, i));
    return d;
  }
  json rows = json::array();
  for (int r = 0; r < N; ++r) {
    json row = json::array();
    for (int c = 0; c < N; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

template <int N>
json vector_json(const Eigen::Matrix<double, N, 1>& v) {
  json d = json::array();
  for (int i = 0; i < N; ++i) d.push_back(v[i]);
  return d;
}

void read_state(const json& obj, const char* key, const std::string& path, VehicleState& s) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string p = join(path, key);
  require_object(*it, p, {"x", "y", "theta", "v"});
  read(*it, "x", p, s.x);
  read(*it, "y", p, s.y);
  read(*it, "theta", p, s.theta);
  read(*it, "v", p, s.v);
}

json state_json(const VehicleState& s) {
  return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}};
}

void read_bounds(const json& j, const std::string& p, SaturationBounds& b) {
  require_object(j, p, {"a_min", "a_max", "delta_min", "delta_max", "v_min", "v_max"});
  read(j, "a_min", p, b.a_min);
  read(j, "a_max", p, b.a_max);
  read(j, "delta_min", p, b.delta_min);
  read(j, "delta_max", p, b.delta_max);
  read(j, "v_min", p, b.v_min);
  read(j, "v_max", p, b.v_max);
}

json bounds_json(const SaturationBounds& b) {
  return {{"a_min", b.a_min},         {"a_max", b.a_max}, {"delta_min", b.delta_min},
          {"delta_max", b.delta_max}, {"v_min", b.v_min}, {"v_max", b.v_max}};
}

void read_dims(const json& j, const std::string& p, VehicleDims& d) {
  require_object(j, p, {"l_f", "l_r", "w_v"});
  read(j, "l_f", p, d.l_f);
  read(j, "l_r", p, d.l_r);
  read(j, "w_v", p, d.w_v);
}

json dims_json(const VehicleDims& d) { return {{"l_f", d.l_f}, {"l_r", d.l_r}, {"w_v", d.w_v}}; }

agents::AgentKind kind_from(const std::string& s, const std::string& path) {
  if (s == "mpc") return agents::AgentKind::kMpc;
  if (s == "aggressive") return agents::AgentKind::kAggressive;
  fail(path, "expected \"mpc\" or \"aggressive\"");
}

// Entries overlay the base scenario's agent at the same index when there is one.
sim::AgentSpec read_agent(const json& j, const std::string& p, const sim::ScenarioConfig& c,
                          const sim::AgentSpec* base) {
  require_object(j, p,
                 {"name", "kind", "persuadee", "w_safe", "initial", "reference", "q_diag",
                  "r_diag", "kappa", "footprint", "horizon", "ts", "limits", "vehicle"});
  sim::AgentSpec a;
  if (base != nullptr) {
    a = *base;
  } else {
    a.config.bounds = c.bounds;
    a.config.dims = c.dims;
    a.config.horizon = c.horizon;
    a.config.ts = c.ts;
  }
  read(j, "name", p, a.name);
  if (j.contains("kind")) {
    std::string kind;
    read(j, "kind", p, kind);
    a.config.kind = kind_from(kind, join(p, "kind"));
  }
  read(j, "persuadee", p, a.persuadee);
  read(j, "w_safe", p, a.config.safety_weight);
  read_state(j, "initial", p, a.initial);
  if (const auto it = j.find("reference"); it != j.end()) {
    const std::string rp = join(p, "reference");
    require_object(*it, rp, {"heading", "lateral", "v_ref", "corridor_min", "corridor_max"});
    agents::Reference& r = a.config.reference;
    read(*it, "heading", rp, r.heading);
    read(*it, "lateral", rp, r.lateral);
    read(*it, "v_ref", rp, r.v_ref);
    read(*it, "corridor_min", rp, r.corridor_min);
    read(*it, "corridor_max", rp, r.corridor_max);
  }
  read_vector(j, "q_diag", p, a.config.q_diag);
  read_vector(j, "r_diag", p, a.config.r_diag);
  read(j, "kappa", p, a.config.kappa);
  if (const auto it = j.find("footprint"); it != j.end()) {
    const std::string fp = join(p, "footprint");
    require_object(*it, fp, {"a_s", "b_s", "heading_aligned"});
    read(*it, "a_s", fp, a.footprint.a_s);
    read(*it, "b_s", fp, a.footprint.b_s);
    read(*it, "heading_aligned", fp, a.footprint.heading_aligned);
  }
  read(j, "horizon", p, a.config.horizon);
  read(j, "ts", p, a.config.ts);
  if (const auto it = j.find("limits"); it != j.end())
    read_bounds(*it, join(p, "limits"), a.config.bounds);
  if (const auto it = j.find("vehicle"); it != j.end())
    read_dims(*it, join(p, "vehicle"), a.config.dims);
  return a;
}

bool same_bounds(const SaturationBounds& a, const SaturationBounds& b) {
  return a.a_min == b.a_min && a.a_max == b.a_max && a.delta_min == b.delta_min &&
         a.delta_max == b.delta_max && a.v_min == b.v_min && a.v_max == b.v_max;
}

json agent_json(const sim::AgentSpec& a, const sim::ScenarioConfig& c) {
  const agents::AgentConfig& ac = a.config;
  json j = {{"name", a.name},
            {"kind", ac.kind == agents::AgentKind::kMpc ? "mpc" : "aggressive"},
            {"persuadee", a.persuadee},
            {"w_safe", ac.safety_weight},
            {"initial", state_json(a.initial)},
            {"reference",
             {{"heading", ac.reference.heading},
              {"lateral", ac.reference.lateral},
              {"v_ref", ac.reference.v_ref},
              {"corridor_min", ac.reference.corridor_min},
              {"corridor_max", ac.reference.corridor_max}}},
            {"q_diag", vector_json(ac.q_diag)},
            {"r_diag", vector_json(ac.r_diag)},
            {"kappa", ac.kappa},
            {"footprint",
             {{"a_s", a.footprint.a_s},
              {"b_s", a.footprint.b_s},
              {"heading_aligned", a.footprint.heading_aligned}}}};
  if (ac.horizon != c.horizon) j["horizon"] = ac.horizon;
  if (ac.ts != c.ts) j["ts"] = ac.ts;
  if (!same_bounds(ac.bounds, c.bounds)) j["limits"] = bounds_json(ac.bounds);
  if (ac.dims.l_f != c.dims.l_f || ac.dims.l_r != c.dims.l_r || ac.dims.w_v != c.dims.w_v)
    j["vehicle"] = dims_json(ac.dims);
  return j;
}

sim::ScenarioConfig parse(const json& doc) {
  require_object(doc, "",
                 {"base", "scenario", "steps", "horizon", "ts", "adapt", "goal_tolerance", "ego",
                  "vehicle", "lane", "limits", "weights", "beliefs", "adaptation", "solver",
                  "penalty", "agents"});
  sim::ScenarioConfig c;
  if (const auto it = doc.find("base"); it != doc.end()) {
    if (!it->is_string()) fail("base", "expected a scenario name");
    try {
      c = sim::builtin(it->get<std::string>());
    } catch (const Error& e) {
      fail("base", e.what());
    }
  }
  const sim::ScenarioConfig base = c;
  read(doc, "scenario", "", c.name);
  read(doc, "steps", "", c.steps);
  read(doc, "horizon", "", c.horizon);
  read(doc, "ts", "", c.ts);
  read(doc, "adapt", "", c.adapt);
  if (const auto it = doc.find("goal_tolerance"); it != doc.end()) {
    require_object(*it, "goal_tolerance", {"position", "speed"});
    read(*it, "position", "goal_tolerance", c.goal_position_tol);
    read(*it, "speed", "goal_tolerance", c.goal_speed_tol);
  }
  if (const auto it = doc.find("ego"); it != doc.end()) {
    require_object(*it, "ego", {"init", "goal"});
    read_state(*it, "init", "ego", c.ego_init);
    read_state(*it, "goal", "ego", c.ego_goal);
  }
  if (const auto it = doc.find("vehicle"); it != doc.end()) read_dims(*it, "vehicle", c.dims);
  if (const auto it = doc.find("lane"); it != doc.end()) {
    require_object(*it, "lane", {"y_min", "y_max", "w_l"});
    read(*it, "y_min", "lane", c.lane.y_min);
    read(*it, "y_max", "lane", c.lane.y_max);
    read(*it, "w_l", "lane", c.lane.w_l);
  }
  if (const auto it = doc.find("limits"); it != doc.end()) read_bounds(*it, "limits", c.bounds);
  if (const auto it = doc.find("weights"); it != doc.end()) {
    require_object(*it, "weights", {"w1", "W2", "W3", "w4", "k1"});
    read(*it, "w1", "weights", c.weights.w1);
    read_matrix(*it, "W2", "weights", c.weights.W2);
    read_matrix(*it, "W3", "weights", c.weights.W3);
    read(*it, "w4", "weights", c.weights.w4);
    read(*it, "k1", "weights", c.weights.k1);
  }
  if (const auto it = doc.find("beliefs"); it != doc.end()) {
    // One object for a constant schedule, or an array of per-step objects.
    const json steps = it->is_array() ? *it : json::array({*it});
    if (steps.empty()) fail("beliefs", "empty schedule");
    BeliefState bs;
    bs.steps.clear();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string p = it->is_array() ? "beliefs[" + std::to_string(i) + "]" : "beliefs";
      require_object(steps[i], p, {"sigma_xe", "sigma_omega"});
      StepBelief sb = i < c.beliefs.steps.size() ? c.beliefs.steps[i] : c.beliefs.steps.back();
      read_matrix(steps[i], "sigma_xe", p, sb.sigma_xe);
      read(steps[i], "sigma_omega", p, sb.sigma_omega);
      bs.steps.push_back(sb);
    }
    c.beliefs = bs;
  }
  if (const auto it = doc.find("adaptation"); it != doc.end()) {
    const std::string p = "adaptation";
    require_object(*it, p,
                   {"w_alpha", "w_beta", "sigma_scale", "sigma_min", "sigma_max", "w1_base",
                    "w1_max", "c_beta", "b_floor"});
    AdaptationParams& ap = c.adaptation;
    read(*it, "w_alpha", p, ap.w_alpha);
    read(*it, "w_beta", p, ap.w_beta);
    read(*it, "sigma_scale", p, ap.sigma_scale);
    read(*it, "sigma_min", p, ap.sigma_min);
    read(*it, "sigma_max", p, ap.sigma_max);
    read(*it, "w1_base", p, ap.w1_base);
    read(*it, "w1_max", p, ap.w1_max);
    read(*it, "c_beta", p, ap.c_beta);
    read(*it, "b_floor", p, ap.b_floor);
  }
  if (const auto it = doc.find("solver"); it != doc.end()) {
    const std::string p = "solver";
    require_object(*it, p,
                   {"rho_initial", "rho_final", "rho_factor", "max_iterations", "max_outer",
                    "kkt_tolerance", "constraint_tolerance", "audit_tolerance", "fd_step"});
    shooting::Options& o = c.planner.solver;
    read(*it, "rho_initial", p, o.rho_initial);
    read(*it, "rho_final", p, o.rho_final);
    read(*it, "rho_factor", p, o.rho_factor);
    read(*it, "max_iterations", p, o.max_iterations);
    read(*it, "max_outer", p, o.max_outer);
    read(*it, "kkt_tolerance", p, o.kkt_tolerance);
    read(*it, "constraint_tolerance", p, o.constraint_tolerance);
    read(*it, "audit_tolerance", p, o.audit_tolerance);
    read(*it, "fd_step", p, o.fd_step);
  }
  if (const auto it = doc.find("penalty"); it != doc.end()) {
    require_object(*it, "penalty", {"ellipse_buffer", "lane_buffer", "speed_buffer"});
    read(*it, "ellipse_buffer", "penalty", c.planner.penalty.ellipse_buffer);
    read(*it, "lane_buffer", "penalty", c.planner.penalty.lane_buffer);
    read(*it, "speed_buffer", "penalty", c.planner.penalty.speed_buffer);
  }
  // Base agents follow scenario-level settings they shared with the base.
  for (sim::AgentSpec& a : c.agents) {
    agents::AgentConfig& ac = a.config;
    if (ac.horizon == base.horizon) ac.horizon = c.horizon;
    if (ac.ts == base.ts) ac.ts = c.ts;
    if (same_bounds(ac.bounds, base.bounds)) ac.bounds = c.bounds;
    if (ac.dims.l_f == base.dims.l_f && ac.dims.l_r == base.dims.l_r &&
        ac.dims.w_v == base.dims.w_v)
      ac.dims = c.dims;
  }
  if (const auto it = doc.find("agents"); it != doc.end()) {
    if (!it->is_array()) fail("agents", "expected an array");
    const std::vector<sim::AgentSpec> base = std::move(c.agents);
    c.agents.clear();
    for (std::size_t i = 0; i < it->size(); ++i)
      c.agents.push_back(read_agent((*it)[i], "agents[" + std::to_string(i) + "]", c,
                                    i < base.size() ? &base[i] : nullptr));
  }
  return c;
}

}  // namespace

sim::ScenarioConfig from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return parse(doc);
}

sim::ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string to_json_text(const sim::ScenarioConfig& c) {
  json beliefs;
  if (c.beliefs.steps.size() == 1) {
    beliefs = {{"sigma_xe", matrix_json(c.beliefs.steps[0].sigma_xe)},
               {"sigma_omega", c.beliefs.steps[0].sigma_omega}};
  } else {
    beliefs = json::array();
    for (const StepBelief& sb : c.beliefs.steps)
      beliefs.push_back({{"sigma_xe", matrix_json(sb.sigma_xe)}, {"sigma_omega", sb.sigma_omega}});
  }
  const shooting::Options& o = c.planner.solver;
  const AdaptationParams& ap = c.adaptation;
  json agents = json::array();
  for (const sim::AgentSpec& a : c.agents) agents.push_back(agent_json(a, c));
  json doc = {
      {"scenario", c.name},
      {"steps", c.steps},
      {"horizon", c.horizon},
      {"ts", c.ts},
      {"adapt", c.adapt},
      {"goal_tolerance", {{"position", c.goal_position_tol}, {"speed", c.goal_speed_tol}}},
      {"ego", {{"init", state_json(c.ego_init)}, {"goal", state_json(c.ego_goal)}}},
      {"vehicle", dims_json(c.dims)},
      {"lane", {{"y_min", c.lane.y_min}, {"y_max", c.lane.y_max}, {"w_l", c.lane.w_l}}},
      {"limits", bounds_json(c.bounds)},
      {"weights",
       {{"w1", c.weights.w1},
        {"W2", matrix_json(c.weights.W2)},
        {"W3", matrix_json(c.weights.W3)},
        {"w4", c.weights.w4},
        {"k1", c.weights.k1}}},
      {"beliefs", beliefs},
      {"adaptation",
       {{"w_alpha", ap.w_alpha},
        {"w_beta", ap.w_beta},
        {"sigma_scale", ap.sigma_scale},
        {"sigma_min", ap.sigma_min},
        {"sigma_max", ap.sigma_max},
        {"w1_base", ap.w1_base},
        {"w1_max", ap.w1_max},
        {"c_beta", ap.c_beta},
        {"b_floor", ap.b_floor}}},
      {"solver",
       {{"rho_initial", o.rho_initial},
        {"rho_final", o.rho_final},
        {"rho_factor", o.rho_factor},
        {"max_iterations", o.max_iterations},
        {"max_outer", o.max_outer},
        {"kkt_tolerance", o.kkt_tolerance},
        {"constraint_tolerance", o.constraint_tolerance},
        {"audit_tolerance", o.audit_tolerance},
        {"fd_step", o.fd_step}}},
      {"penalty",
       {{"ellipse_buffer", c.planner.penalty.ellipse_buffer},
        {"lane_buffer", c.planner.penalty.lane_buffer},
        {"speed_buffer", c.planner.penalty.speed_buffer}}},
      {"agents", agents}};
  return doc.dump(2) + "\n";
}

void save(const sim::ScenarioConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write config " + path.string());
  out << to_json_text(c);
  if (!out) throw Error(ErrorCode::kIo, "failed writing config " + path.string());
}

std::string plan_to_json_text(const Plan& plan) {
  json states = json::array();
  for (const VehicleState& x : plan.states) states.push_back({x.x, x.y, x.theta, x.v});
  json inputs = json::array();
  for (const ControlInput& u : plan.inputs) inputs.push_back({u.a, u.delta});
  return json{{"t0", plan.t0}, {"ts", plan.ts}, {"states", states}, {"inputs", inputs}}.dump();
}

Plan plan_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("plan is not valid JSON: ") + e.what());
  }
  require_object(j, "", {"t0", "ts", "states", "inputs"});
  Plan plan;
  const auto t0 = j.find("t0");
  if (t0 != j.end()) {
    if (!t0->is_number_integer()) fail("t0", "expected an integer");
    plan.t0 = t0->get<long>();
  }
  read(j, "ts", "", plan.ts);
  const auto rows = [&](const char* key, std::size_t width) {
    std::vector<std::vector<double>> out;
    const auto it = j.find(key);
    if (it == j.end()) return out;
    if (!it->is_array()) fail(key, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = std::string(key) + "[" + std::to_string(i) + "]";
      out.push_back(numbers((*it)[i], p));
      if (out.back().size() != width) fail(p, "expected " + std::to_string(width) + " numbers");
    }
    return out;
  };
  for (const auto& r : rows("states", 4)) plan.states.push_back({r[0], r[1], r[2], r[3]});
  for (const auto& r : rows("inputs", 2)) plan.inputs.push_back({r[0], r[1]});
  try {
    plan.validate();
  } catch (const Error& e) {
    fail("states", e.what());
  }
  return plan;
}

}  // namespace pdrive::config
