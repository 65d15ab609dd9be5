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
#include "pdrive/dynamics.hpp"
#include "pdrive/persuasion.hpp"
#include "pdrive/report.hpp"
#include "pdrive/sim.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace pdrive;
namespace fs = std::filesystem;

namespace {

sim::ScenarioConfig open_road() {
  sim::ScenarioConfig c;
  c.name = "open_road";
  c.ego_init = {0.0, 0.185, 0.0, 0.5};
  c.ego_goal = {2.0, 0.185, 0.0, 0.0};
  c.steps = 200;
  return c;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pdrive_unit_" + name);
  fs::remove_all(p);
  return p;
}

sim::SimLog tiny_log() {
  sim::SimLog log;
  log.scenario = "tiny";
  for (int k = 0; k < 2; ++k) {
    sim::StepRecord r;
    r.step = k;
    r.time_s = 0.1 * k;
    r.alpha = 0.01 * k;
    r.beta = 0.5 + k;
    r.j_total = 1.0 / 3.0 + k;
    r.min_omega = 2.0;
    r.vehicles.push_back({"ego", {0.1 * k, 0.185, 7.0 * k, 0.5}, {0.25, -0.125}, 2.0, "converged"});
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("an empty road reaches the goal within the limits") {
    const sim::ScenarioConfig c = open_road();
    const sim::SimLog log = sim::run(c);
    CHECK(log.outcome == sim::Outcome::kGoalReached);
    CHECK(log.completion_step > 0);
    const VehicleState& end = log.records.back().vehicles[0].state;
    CHECK(std::hypot(end.x - 2.0, end.y - 0.185) < 0.05);
    for (const sim::StepRecord& r : log.records) {
      const sim::VehicleRecord& e = r.vehicles[0];
      CHECK(e.state.v >= -1e-9);
      CHECK(e.state.v <= 1.5 + 1e-9);
      CHECK(c.bounds.contains(e.input, 1e-12));
      for (const Vec2& p : dynamics::corners(e.state, c.dims)) {
        CHECK(p[1] >= -1e-9);
        CHECK(p[1] <= 0.74 + 1e-9);
      }
    }
  }

  TEST_CASE("shipped scenario constants") {
    const auto all = sim::builtin_scenarios();
    REQUIRE(all.size() == 3);
    CHECK(sim::builtin_names() == std::vector<std::string>{"lane_change", "lane_keep", "intersection"});
    for (const sim::ScenarioConfig& c : all) {
      CAPTURE(c.name);
      CHECK(c.lane.w_l == 0.37);
      CHECK(c.lane.y_min == 0.0);
      CHECK(c.lane.y_max == 0.74);
      CHECK(c.bounds.v_min == 0.0);
      CHECK(c.bounds.v_max == 1.5);
      CHECK(c.horizon == 30);
      CHECK(c.ts == 0.1);
      CHECK(c.dims.l_f == 0.21);
      CHECK(c.dims.l_r == 0.19);
      CHECK(c.dims.w_v == 0.19);
      CHECK(c.agents.front().footprint.a_s == 0.75);
      CHECK(c.agents.front().footprint.b_s == 0.35);
      CHECK_NOTHROW(c.validate());
      CHECK(sim::initial_min_omega(c) >= 1.0);
    }
  }

  TEST_CASE("lookup and driver presets") {
    try {
      sim::builtin("bogus");
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
      CHECK(std::string(e.what()).find("lane_change, lane_keep, intersection") != std::string::npos);
    }
    sim::ScenarioConfig c = sim::builtin("lane_change");
    const auto rear = [&] { return c.agents[1].config.safety_weight; };
    CHECK(rear() == sim::kNiceSafetyWeight);
    sim::set_driver(c, 0.0);
    CHECK(rear() == 0.0);
    CHECK(c.agents[0].config.safety_weight == 0.0);
    CHECK_THROWS_AS(sim::set_driver(c, -1.0), Error);
    sim::ScenarioConfig e = open_road();
    CHECK_THROWS_AS(sim::set_driver(e, 1.0), Error);
  }

  TEST_CASE("overlapping starts are rejected") {
    sim::ScenarioConfig c = sim::builtin("lane_keep");
    c.agents[0].initial = {0.3, 0.3, 0.0, 0.5};
    try {
      c.validate();
      FAIL("expected infeasible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInfeasible);
    }
  }

  TEST_CASE("pairwise omega takes the smaller ordering") {
    EllipseFootprint wide{1.0, 0.5};
    EllipseFootprint narrow{0.5, 0.25};
    const VehicleState a{0, 0, 0, 0}, b{0.5, 0, 0, 0};
    CHECK(sim::pairwise_omega(a, wide, b, narrow) == doctest::Approx(0.5));
    CHECK(sim::pairwise_omega(a, narrow, b, wide) == doctest::Approx(0.5));
  }

  TEST_CASE("fallback brakes to a stop without overshooting") {
    const SaturationBounds b;
    CHECK(sim::fallback_input({0, 0, 0, 1.0}, b, 0.1) == ControlInput{-1.0, 0.0});
    CHECK(sim::fallback_input({0, 0, 0, 0.05}, b, 0.1).a == doctest::Approx(-0.5));
  }

  TEST_CASE("short runs log every step and repeat exactly") {
    sim::ScenarioConfig c = sim::builtin("lane_change");
    c.steps = 4;
    const sim::SimLog a = sim::run(c);
    const sim::SimLog b = sim::run(c);
    REQUIRE(a.records.size() == 5);
    CHECK(a.records.back().vehicles[0].status == "final");
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].vehicles.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) CHECK(a.records[k].vehicles[i].state == b.records[k].vehicles[i].state);
    }
    CHECK(a.records[0].min_omega == doctest::Approx(sim::initial_min_omega(c)));
  }
}

TEST_SUITE("config") {
  TEST_CASE("built-ins round-trip exactly") {
    for (const sim::ScenarioConfig& c : sim::builtin_scenarios()) {
      const std::string text = config::to_json_text(c);
      CHECK(config::to_json_text(config::from_json_text(text)) == text);
    }
  }

  TEST_CASE("shipped config files match the built-ins") {
    for (const std::string& name : sim::builtin_names()) {
      CAPTURE(name);
      const fs::path p = fs::path(PDRIVE_SOURCE_DIR) / "configs" / (name + ".json");
      REQUIRE(fs::exists(p));
      CHECK(config::to_json_text(config::load(p)) == config::to_json_text(sim::builtin(name)));
    }
  }

  TEST_CASE("partial documents start from the base") {
    const sim::ScenarioConfig c = config::from_json_text(
        R"({"base": "intersection", "steps": 12, "agents": [{"w_safe": 0.0}]})");
    CHECK(c.name == "intersection");
    CHECK(c.steps == 12);
    CHECK(c.agents.size() == 1);
    CHECK(c.agents[0].config.safety_weight == 0.0);
    CHECK(c.agents[0].footprint.heading_aligned);
    const sim::ScenarioConfig d = config::from_json_text(R"({"weights": {"W2": [1, 2, 3, 4]}})");
    CHECK(d.weights.W2(2, 2) == 3.0);
    CHECK(d.weights.W2(0, 1) == 0.0);
  }

  TEST_CASE("errors name the offending key") {
    const auto message = [](const std::string& text) {
      try {
        config::from_json_text(text);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kConfig);
        return std::string(e.what());
      }
      FAIL("expected a config error");
      return std::string();
    };
    CHECK(message(R"({"base": "lane_change", "agents": [{}, {"reference": {"v_rf": 1}}]})")
              .find("agents[1].reference.v_rf") != std::string::npos);
    CHECK(message(R"({"limits": {"v_max": "fast"}})").find("limits.v_max") != std::string::npos);
    CHECK(message(R"({"weights": {"W3": [1, 2, 3]}})").find("weights.W3") != std::string::npos);
    CHECK(message(R"({"base": "nowhere"})").find("lane_change") != std::string::npos);
    CHECK(message("{not json").find("JSON") != std::string::npos);
  }

  TEST_CASE("save and load") {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    const sim::ScenarioConfig c = sim::builtin("lane_keep");
    config::save(c, dir / "lk.json");
    CHECK(config::to_json_text(config::load(dir / "lk.json")) == config::to_json_text(c));
    CHECK_THROWS_AS(config::load(dir / "missing.json"), Error);
    fs::remove_all(dir);
  }
}

TEST_SUITE("report") {
  TEST_CASE("empty log writes only the header") {
    std::ostringstream os;
    report::write_csv(sim::SimLog{}, os);
    CHECK(os.str() == std::string(report::kCsvHeader) + "\n");
  }

  TEST_CASE("one vehicle over two steps gives two rows that parse back") {
    const sim::SimLog log = tiny_log();
    std::ostringstream os;
    report::write_csv(log, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == report::kCsvHeader);
    const std::vector<std::string> cols = split(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) rows.push_back(split(line));
    REQUIRE(rows.size() == 2);
    const auto col = [&](const std::vector<std::string>& row, const char* key) {
      const auto it = std::find(cols.begin(), cols.end(), key);
      REQUIRE(it != cols.end());
      return row[static_cast<std::size_t>(it - cols.begin())];
    };
    for (std::size_t k = 0; k < 2; ++k) {
      const sim::StepRecord& r = log.records[k];
      const sim::VehicleRecord& v = r.vehicles[0];
      const auto num = [&](const char* key) { return std::stod(col(rows[k], key)); };
      CHECK(rows[k].size() == cols.size());
      CHECK(std::stoi(col(rows[k], "step")) == r.step);
      CHECK(col(rows[k], "agent") == "ego");
      CHECK(col(rows[k], "solver_status") == "converged");
      CHECK(num("time_s") == doctest::Approx(r.time_s).epsilon(1e-8));
      CHECK(num("x_m") == doctest::Approx(v.state.x).epsilon(1e-8));
      CHECK(num("y_m") == doctest::Approx(v.state.y).epsilon(1e-8));
      CHECK(num("theta_rad") == doctest::Approx(normalize_angle(v.state.theta)).epsilon(1e-8));
      CHECK(num("v_mps") == doctest::Approx(v.state.v).epsilon(1e-8));
      CHECK(num("a_mps2") == doctest::Approx(v.input.a).epsilon(1e-8));
      CHECK(num("delta_rad") == doctest::Approx(v.input.delta).epsilon(1e-8));
      CHECK(num("omega_hat") == doctest::Approx(v.omega_hat).epsilon(1e-8));
      CHECK(num("alpha") == doctest::Approx(r.alpha).epsilon(1e-8));
      CHECK(num("beta") == doctest::Approx(r.beta).epsilon(1e-8));
      CHECK(num("J_total") == doctest::Approx(r.j_total).epsilon(1e-8));
    }
  }

  TEST_CASE("metrics summary") {
    const nlohmann::json m = nlohmann::json::parse(report::metrics_json(tiny_log()));
    CHECK(m["scenario"] == "tiny");
    CHECK(m["outcome"] == "completed");
    CHECK(m["completion_step"].is_null());
    CHECK(m["steps"] == 2);
    CHECK(m["converged_steps"] == 2);
    CHECK(m["min_pairwise_omega"].get<double>() == 2.0);
    CHECK(m["mean_speed_mps"]["ego"].get<double>() == doctest::Approx(0.5));
    CHECK(m["total_ego_cost"].get<double>() == doctest::Approx(2.0 / 3.0 + 1.0));
  }

  TEST_CASE("plots are deterministic and labelled") {
    const sim::SimLog log = tiny_log();
    const sim::ScenarioConfig cfg = sim::builtin("lane_change");
    const std::string a = report::trajectory_svg(log, cfg);
    CHECK(a == report::trajectory_svg(log, cfg));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("x [m]") != std::string::npos);
    const std::string s = report::speed_svg(log);
    CHECK(s == report::speed_svg(log));
    CHECK(s.find("speed [m/s]") != std::string::npos);
    CHECK(s.find("time [s]") != std::string::npos);
  }

  TEST_CASE("files on disk") {
    const fs::path dir = scratch("report") / "nested";
    const sim::SimLog log = tiny_log();
    report::write_log(log, dir);
    report::plot(log, sim::builtin("lane_change"), dir);
    for (const char* f : {"trajectory.csv", "metrics.json", "trajectory.svg", "speed.svg"})
      CHECK(fs::exists(dir / f));
    std::ostringstream os;
    report::write_csv(log, os);
    CHECK(slurp(dir / "trajectory.csv") == os.str());
    CHECK_THROWS_AS(report::plot(sim::SimLog{}, sim::builtin("lane_change"), dir), Error);
    try {
      report::write_log(log, dir / "trajectory.csv" / "below");
      FAIL("expected an I/O error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIo);
    }
    fs::remove_all(dir.parent_path());
  }
}
