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


// Command line front end over the C API: run, sweep, verify.
// Exit codes: 0 success, 1 usage/config/I-O error (or a failed verify),
// 2 safety breach in a simulation.

#include "pdrive/pdrive.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBreach = 2;

struct ScenarioDeleter {
  void operator()(pd_scenario* s) const { pd_scenario_free(s); }
};
struct LogDeleter {
  void operator()(pd_log* l) const { pd_log_free(l); }
};
using ScenarioPtr = std::unique_ptr<pd_scenario, ScenarioDeleter>;
using LogPtr = std::unique_ptr<pd_log, LogDeleter>;

struct Driver {
  std::string label;
  double w_safe = 0.0;
};

std::optional<Driver> parse_driver(const std::string& s) {
  if (s == "nice") return Driver{"nice", pd_nice_safety_weight()};
  if (s == "tough") return Driver{"tough", 0.0};
  char* end = nullptr;
  const double w = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !(w >= 0.0)) return std::nullopt;
  return Driver{"w" + s, w};
}

struct Job {
  std::string source;  // scenario name or config path
  bool from_config = false;
  std::optional<Driver> driver;
  std::string out_dir;
};

struct JobResult {
  int exit_code = kExitOk;
  std::string message;
};

JobResult execute(const Job& job, std::optional<int> steps, bool plot) {
  const auto error = [](const std::string& what) { return JobResult{kExitUsage, what}; };
  pd_scenario* raw = nullptr;
  const pd_status st = job.from_config ? pd_scenario_load(job.source.c_str(), &raw)
                                       : pd_scenario_builtin(job.source.c_str(), &raw);
  if (st != PD_OK) return error(pd_last_error());
  ScenarioPtr sc(raw);
  if (job.driver && pd_scenario_set_driver(sc.get(), job.driver->w_safe) != PD_OK)
    return error(pd_last_error());
  if (steps && pd_scenario_set_steps(sc.get(), *steps) != PD_OK) return error(pd_last_error());

  pd_log* lraw = nullptr;
  if (pd_run(sc.get(), &lraw) != PD_OK) return error(pd_last_error());
  LogPtr log(lraw);
  if (pd_log_write(log.get(), sc.get(), job.out_dir.c_str(), plot ? 1 : 0) != PD_OK)
    return error(pd_last_error());

  pd_summary s{};
  pd_log_summary(log.get(), &s);
  const pd_outcome outcome = pd_log_outcome(log.get());
  const char* outcome_name = outcome == PD_OUTCOME_GOAL_REACHED  ? "goal reached"
                             : outcome == PD_OUTCOME_SAFETY_BREACH ? "SAFETY BREACH"
                                                                   : "completed";
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s [%s]: %s after %d steps, converged %d/%d, fallback %d, min omega %.3f, "
                "%.1f s -> %s",
                pd_scenario_get_name(sc.get()), job.driver ? job.driver->label.c_str() : "as configured",
                outcome_name, s.solved_steps, s.converged_steps, s.solved_steps, s.fallback_steps,
                s.min_pairwise_omega, s.wall_seconds, job.out_dir.c_str());
  JobResult r{kExitOk, buf};
  if (outcome == PD_OUTCOME_SAFETY_BREACH) {
    r.exit_code = kExitBreach;
    r.message += std::string("\n  breach: ") + pd_log_breach(log.get());
  }
  return r;
}

std::string scenario_list() {
  std::string out;
  for (int i = 0; i < pd_scenario_count(); ++i) out += (i ? ", " : "") + std::string(pd_scenario_name(i));
  return out;
}

void on_check(const char* id, const char* title, int pass, const char* detail, double seconds,
              void*) {
  std::printf("%-16s %-4s %7.2fs  %s: %s\n", id, pass ? "PASS" : "FAIL", seconds, title, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persuasive interaction-aware driving planner and simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string config_path;
  std::string driver_text;
  int steps = -1;
  std::string out_dir = "results";
  bool plot = true;

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write CSV, JSON and SVG output");
  run->add_option("--scenario", scenario, "Built-in scenario (" + scenario_list() + ")");
  run->add_option("--config", config_path, "JSON scenario file");
  run->add_option("--driver", driver_text, "Persuaded driver: nice, tough or a safety weight >= 0");
  run->add_option("--steps", steps, "Maximum simulation steps")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("--plot,!--no-plot", plot, "Write SVG plots")->capture_default_str();

  std::vector<std::string> sweep_scenarios;
  std::vector<std::string> sweep_configs;
  std::vector<std::string> sweep_drivers{"nice", "tough"};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  CLI::App* sweep = app.add_subcommand("sweep", "Run scenario and driver combinations in parallel");
  sweep->add_option("--scenario", sweep_scenarios, "Built-in scenarios (default: all)");
  sweep->add_option("--config", sweep_configs, "JSON scenario files");
  sweep->add_option("--driver", sweep_drivers, "Drivers to sweep")->capture_default_str();
  sweep->add_option("--steps", steps, "Maximum simulation steps")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", out_dir, "Output root; one subdirectory per run")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--plot,!--no-plot", plot, "Write SVG plots")->capture_default_str();

  app.add_subcommand("verify", "Check closed forms against the numerical oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::optional<int> step_cap = steps >= 0 ? std::optional<int>(steps) : std::nullopt;

  if (app.got_subcommand("verify")) {
    int failed = 0;
    if (pd_verify(on_check, nullptr, &failed) != PD_OK) {
      std::fprintf(stderr, "error: %s\n", pd_last_error());
      return kExitUsage;
    }
    std::printf("%s\n", failed == 0 ? "all checks passed" : "some checks FAILED");
    return failed == 0 ? kExitOk : kExitUsage;
  }

  if (app.got_subcommand("run")) {
    if (scenario.empty() == config_path.empty()) {
      std::fprintf(stderr, "error: give exactly one of --scenario or --config (scenarios: %s)\n",
                   scenario_list().c_str());
      return kExitUsage;
    }
    Job job{config_path.empty() ? scenario : config_path, !config_path.empty(), std::nullopt,
            out_dir};
    if (!driver_text.empty()) {
      job.driver = parse_driver(driver_text);
      if (!job.driver) {
        std::fprintf(stderr, "error: --driver must be nice, tough or a number >= 0, got '%s'\n",
                     driver_text.c_str());
        return kExitUsage;
      }
    }
    const JobResult r = execute(job, step_cap, plot);
    std::fprintf(r.exit_code == kExitUsage ? stderr : stdout, "%s%s\n",
                 r.exit_code == kExitUsage ? "error: " : "", r.message.c_str());
    return r.exit_code;
  }

  // sweep
  std::vector<Driver> drivers;
  for (const std::string& d : sweep_drivers) {
    const auto parsed = parse_driver(d);
    if (!parsed) {
      std::fprintf(stderr, "error: bad --driver '%s'\n", d.c_str());
      return kExitUsage;
    }
    drivers.push_back(*parsed);
  }
  if (sweep_scenarios.empty() && sweep_configs.empty())
    for (int i = 0; i < pd_scenario_count(); ++i) sweep_scenarios.emplace_back(pd_scenario_name(i));
  std::vector<Job> queue;
  const auto add = [&](const std::string& src, bool cfg, const std::string& stem) {
    for (const Driver& d : drivers) queue.push_back({src, cfg, d, out_dir + "/" + stem + "_" + d.label});
  };
  for (const std::string& s : sweep_scenarios) add(s, false, s);
  for (std::size_t i = 0; i < sweep_configs.size(); ++i)
    add(sweep_configs[i], true, "config" + std::to_string(i));

  std::vector<JobResult> results(queue.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, queue.size()); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < queue.size();)
        results[i] = execute(queue[i], step_cap, plot);
    });
  for (std::thread& th : pool) th.join();

  int code = kExitOk;
  for (const JobResult& r : results) {
    std::fprintf(r.exit_code == kExitUsage ? stderr : stdout, "%s%s\n",
                 r.exit_code == kExitUsage ? "error: " : "", r.message.c_str());
    code = std::max(code, r.exit_code);
  }
  return code;
}
