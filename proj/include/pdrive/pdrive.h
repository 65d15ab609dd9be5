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


#ifndef PDRIVE_PDRIVE_H_
#define PDRIVE_PDRIVE_H_

/* C interface to the planner and simulator. Handles are opaque; functions
 * return PD_OK or an error code and leave a message for pd_last_error() in
 * the calling thread. Distinct handles may be used from different threads. */

#include <stddef.h>

#if defined(_WIN32)
#  define PD_API __declspec(dllexport)
#else
#  define PD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pd_status {
  PD_OK = 0,
  PD_ERR_INVALID_ARGUMENT = 1,
  PD_ERR_CONFIG = 2,
  PD_ERR_IO = 3,
  PD_ERR_INFEASIBLE = 4,
  PD_ERR_NUMERIC = 5,
  PD_ERR_INTERNAL = 6
} pd_status;

typedef enum pd_outcome {
  PD_OUTCOME_COMPLETED = 0,
  PD_OUTCOME_GOAL_REACHED = 1,
  PD_OUTCOME_SAFETY_BREACH = 2
} pd_outcome;

typedef struct pd_scenario pd_scenario;
typedef struct pd_log pd_log;

typedef struct pd_vehicle_row {
  double x, y, theta, v;
  double a, delta;
  double omega_hat;
  const char* name;   /* owned by the log */
  const char* status; /* owned by the log */
} pd_vehicle_row;

typedef struct pd_summary {
  int records;
  int solved_steps;
  int converged_steps;
  int fallback_steps;
  int completion_step; /* -1 when the goal was not reached */
  double min_pairwise_omega;
  double total_ego_cost;
  double wall_seconds;
} pd_summary;

/* Message of the last failed call in this thread ("" when none). */
PD_API const char* pd_last_error(void);
PD_API const char* pd_version(void);

/* Built-in scenario names, index 0 .. pd_scenario_count() - 1. */
PD_API int pd_scenario_count(void);
PD_API const char* pd_scenario_name(int index);

PD_API pd_status pd_scenario_builtin(const char* name, pd_scenario** out);
PD_API pd_status pd_scenario_load(const char* path, pd_scenario** out);
PD_API pd_status pd_scenario_save(const pd_scenario* s, const char* path);
PD_API void pd_scenario_free(pd_scenario* s);
PD_API const char* pd_scenario_get_name(const pd_scenario* s);
/* Safety weight of the persuaded agent; pd_nice_safety_weight() or 0 for the presets. */
PD_API pd_status pd_scenario_set_driver(pd_scenario* s, double w_safe);
PD_API pd_status pd_scenario_set_steps(pd_scenario* s, int steps);
PD_API double pd_nice_safety_weight(void);

/* Runs the closed loop. A safety breach is an outcome, not an error. */
PD_API pd_status pd_run(const pd_scenario* s, pd_log** out);
PD_API void pd_log_free(pd_log* log);
PD_API pd_outcome pd_log_outcome(const pd_log* log);
PD_API const char* pd_log_breach(const pd_log* log);
PD_API pd_status pd_log_summary(const pd_log* log, pd_summary* out);
PD_API int pd_log_record_count(const pd_log* log);
PD_API int pd_log_vehicle_count(const pd_log* log);
PD_API pd_status pd_log_row(const pd_log* log, int record, int vehicle, pd_vehicle_row* out);
/* trajectory.csv and metrics.json, plus trajectory.svg and speed.svg when plot != 0. */
PD_API pd_status pd_log_write(const pd_log* log, const pd_scenario* s, const char* dir, int plot);

/* Oracle self-check. cb may be NULL; *failed receives the number of failed checks. */
typedef void (*pd_verify_cb)(const char* id, const char* title, int pass, const char* detail,
                             double seconds, void* user);
PD_API pd_status pd_verify(pd_verify_cb cb, void* user, int* failed);

#ifdef __cplusplus
}
#endif

#endif /* PDRIVE_PDRIVE_H_ */
