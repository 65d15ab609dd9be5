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

#include <numbers>

namespace pdrive::sim {

namespace {

constexpr double kLane1 = 0.185;
constexpr double kLane2 = 0.555;

AgentSpec agent(std::string name, agents::AgentKind kind, const VehicleState& s,
                const agents::Reference& ref, bool persuadee) {
  AgentSpec a;
  a.name = std::move(name);
  a.config.kind = kind;
  a.config.reference = ref;
  a.initial = s;
  a.persuadee = persuadee;
  if (persuadee) a.config.safety_weight = kNiceSafetyWeight;
  return a;
}

ScenarioConfig base(std::string name) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.weights.k1 = 0.1;
  return c;
}

ScenarioConfig lane_change() {
  ScenarioConfig c = base("lane_change");
  c.ego_init = {0.0, kLane1, 0.0, 0.5};
  c.ego_goal = {6.0, kLane2, 0.0, 0.6};
  c.weights.W2 = Vec4(0.05, 1.5, 0.5, 2.0).asDiagonal();
  c.agents.push_back(agent("front", agents::AgentKind::kAggressive, {1.0, kLane2, 0.0, 0.8},
                           {0.0, kLane2, 0.8}, false));
  c.agents.push_back(agent("rear", agents::AgentKind::kMpc, {-0.4, kLane2, 0.0, 0.8},
                           {0.0, kLane2, 0.8}, true));
  c.steps = 150;
  return c;
}

ScenarioConfig lane_keep() {
  ScenarioConfig c = base("lane_keep");
  c.ego_init = {0.0, kLane1, 0.0, 0.6};
  c.ego_goal = {8.0, kLane1, 0.0, 0.8};
  c.weights.W2 = Vec4(0.05, 1.5, 0.5, 2.0).asDiagonal();
  c.agents.push_back(agent("merger", agents::AgentKind::kMpc, {0.9, kLane2, 0.0, 0.5},
                           {0.0, kLane1, 0.5}, true));
  c.steps = 150;
  return c;
}

ScenarioConfig intersection() {
  ScenarioConfig c = base("intersection");
  c.ego_init = {-1.0, kLane1, 0.0, 0.3};
  c.ego_goal = {2.0, kLane1, 0.0, 0.6};
  c.weights.W2 = Vec4(0.05, 1.5, 0.5, 2.0).asDiagonal();
  constexpr double kNorth = std::numbers::pi / 2.0;
  AgentSpec cross = agent("crossing", agents::AgentKind::kMpc, {0.0, -1.3, kNorth, 0.5},
                          {kNorth, 0.0, 0.5, -0.37, 0.37}, true);
  cross.footprint.heading_aligned = true;
  c.agents.push_back(cross);
  c.steps = 150;
  return c;
}

}  // namespace

std::vector<ScenarioConfig> builtin_scenarios() {
  return {lane_change(), lane_keep(), intersection()};
}

std::vector<std::string> builtin_names() { return {"lane_change", "lane_keep", "intersection"}; }

ScenarioConfig builtin(const std::string& name) {
  for (ScenarioConfig& c : builtin_scenarios())
    if (c.name == name) return c;
  std::string valid;
  for (const std::string& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kConfig, "unknown scenario '" + name + "' (valid: " + valid + ")");
}

}  // namespace pdrive::sim
