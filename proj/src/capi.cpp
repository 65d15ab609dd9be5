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


#include "pdrive/pdrive.h"

#include "pdrive/config.hpp"
#include "pdrive/report.hpp"
#include "pdrive/sim.hpp"
#include "pdrive/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <new>
#include <string>

struct pd_scenario {
  pdrive::sim::ScenarioConfig cfg;
};

struct pd_log {
  pdrive::sim::SimLog log;
  double wall_seconds = 0.0;
};

namespace {

thread_local std::string g_last_error;

pd_status code_of(pdrive::ErrorCode c) {
  using pdrive::ErrorCode;
  switch (c) {
    case ErrorCode::kConfig: return PD_ERR_CONFIG;
    case ErrorCode::kIo: return PD_ERR_IO;
    case ErrorCode::kInfeasible: return PD_ERR_INFEASIBLE;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kHorizonMismatch: return PD_ERR_INVALID_ARGUMENT;
    default: return PD_ERR_NUMERIC;
  }
}

pd_status fail(pd_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <class F>
pd_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return PD_OK;
  } catch (const pdrive::Error& e) {
    return fail(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PD_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* pd_last_error(void) { return g_last_error.c_str(); }

const char* pd_version(void) { return "1.0.0"; }

int pd_scenario_count(void) { return static_cast<int>(pdrive::sim::builtin_names().size()); }

const char* pd_scenario_name(int index) {
  static const std::vector<std::string> names = pdrive::sim::builtin_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<std::size_t>(index)].c_str();
}

pd_status pd_scenario_builtin(const char* name, pd_scenario** out) {
  if (!name || !out) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new pd_scenario{pdrive::sim::builtin(name)}; });
}

pd_status pd_scenario_load(const char* path, pd_scenario** out) {
  if (!path || !out) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    pdrive::sim::ScenarioConfig cfg = pdrive::config::load(path);
    cfg.validate();
    *out = new pd_scenario{std::move(cfg)};
  });
}

pd_status pd_scenario_save(const pd_scenario* s, const char* path) {
  if (!s || !path) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { pdrive::config::save(s->cfg, path); });
}

void pd_scenario_free(pd_scenario* s) { delete s; }

const char* pd_scenario_get_name(const pd_scenario* s) { return s ? s->cfg.name.c_str() : nullptr; }

pd_status pd_scenario_set_driver(pd_scenario* s, double w_safe) {
  if (!s) return fail(PD_ERR_INVALID_ARGUMENT, "null scenario");
  return guarded([&] { pdrive::sim::set_driver(s->cfg, w_safe); });
}

pd_status pd_scenario_set_steps(pd_scenario* s, int steps) {
  if (!s) return fail(PD_ERR_INVALID_ARGUMENT, "null scenario");
  if (steps < 0) return fail(PD_ERR_INVALID_ARGUMENT, "steps must be nonnegative");
  s->cfg.steps = steps;
  return PD_OK;
}

double pd_nice_safety_weight(void) { return pdrive::sim::kNiceSafetyWeight; }

pd_status pd_run(const pd_scenario* s, pd_log** out) {
  if (!s || !out) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto* l = new pd_log{pdrive::sim::run(s->cfg)};
    l->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out = l;
  });
}

void pd_log_free(pd_log* log) { delete log; }

pd_outcome pd_log_outcome(const pd_log* log) {
  if (!log) return PD_OUTCOME_COMPLETED;
  switch (log->log.outcome) {
    case pdrive::sim::Outcome::kGoalReached: return PD_OUTCOME_GOAL_REACHED;
    case pdrive::sim::Outcome::kSafetyBreach: return PD_OUTCOME_SAFETY_BREACH;
    default: return PD_OUTCOME_COMPLETED;
  }
}

const char* pd_log_breach(const pd_log* log) { return log ? log->log.breach.c_str() : ""; }

pd_status pd_log_summary(const pd_log* log, pd_summary* out) {
  if (!log || !out) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  pd_summary s{};
  s.records = static_cast<int>(log->log.records.size());
  s.completion_step = log->log.completion_step;
  s.min_pairwise_omega = std::numeric_limits<double>::infinity();
  for (const auto& r : log->log.records) {
    s.min_pairwise_omega = std::min(s.min_pairwise_omega, r.min_omega);
    const std::string& st = r.vehicles.front().status;
    if (st == "final" || st == "breach") continue;
    ++s.solved_steps;
    if (st == "converged") ++s.converged_steps;
    if (st == "fallback") ++s.fallback_steps;
    if (std::isfinite(r.j_total)) s.total_ego_cost += r.j_total;
  }
  s.wall_seconds = log->wall_seconds;
  *out = s;
  return PD_OK;
}

int pd_log_record_count(const pd_log* log) {
  return log ? static_cast<int>(log->log.records.size()) : 0;
}

int pd_log_vehicle_count(const pd_log* log) {
  return log && !log->log.records.empty()
             ? static_cast<int>(log->log.records.front().vehicles.size())
             : 0;
}

pd_status pd_log_row(const pd_log* log, int record, int vehicle, pd_vehicle_row* out) {
  if (!log || !out) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  if (record < 0 || record >= pd_log_record_count(log) || vehicle < 0 ||
      vehicle >= pd_log_vehicle_count(log))
    return fail(PD_ERR_INVALID_ARGUMENT, "record or vehicle index out of range");
  const auto& v = log->log.records[static_cast<std::size_t>(record)]
                      .vehicles[static_cast<std::size_t>(vehicle)];
  *out = {v.state.x,  v.state.y,      v.state.theta,  v.state.v,     v.input.a,
          v.input.delta, v.omega_hat, v.name.c_str(), v.status.c_str()};
  return PD_OK;
}

pd_status pd_log_write(const pd_log* log, const pd_scenario* s, const char* dir, int plot) {
  if (!log || !s || !dir) return fail(PD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    pdrive::report::write_log(log->log, dir);
    if (plot && !log->log.records.empty()) pdrive::report::plot(log->log, s->cfg, dir);
  });
}

pd_status pd_verify(pd_verify_cb cb, void* user, int* failed) {
  return guarded([&] {
    int n = 0;
    pdrive::verify::run_oracle_suite([&](const pdrive::verify::Check& c) {
      if (!c.pass) ++n;
      if (cb) cb(c.id.c_str(), c.title.c_str(), c.pass ? 1 : 0, c.detail.c_str(), c.seconds, user);
    });
    if (failed) *failed = n;
  });
}

}  // extern "C"
