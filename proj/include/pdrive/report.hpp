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

// Run artifacts: trajectory CSV, metrics JSON and SVG plots. Output depends
// only on the simulated quantities, never on wall time.

#include "pdrive/sim.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace pdrive::report {

inline constexpr const char* kCsvHeader =
    "step,time_s,agent,x_m,y_m,theta_rad,v_mps,a_mps2,delta_rad,omega_hat,alpha,beta,J_total,"
    "solver_status";

/// One row per vehicle per record; floats with 9 significant digits. alpha,
/// beta and J_total are step quantities repeated on each vehicle's row.
void write_csv(const sim::SimLog& log, std::ostream& out);

/// completion step, smallest pairwise omega, mean speed per vehicle, total ego cost.
std::string metrics_json(const sim::SimLog& log);

/// x-y paths with body rectangles every `every` steps, over the lane and
/// agent corridors.
std::string trajectory_svg(const sim::SimLog& log, const sim::ScenarioConfig& cfg, int every = 10);

/// Speed against time per vehicle.
std::string speed_svg(const sim::SimLog& log);

/// trajectory.csv and metrics.json in dir (created if needed). Throws kIo.
void write_log(const sim::SimLog& log, const std::filesystem::path& dir);

/// trajectory.svg and speed.svg in dir. Throws kIo, or kInvalidArgument for an empty log.
void plot(const sim::SimLog& log, const sim::ScenarioConfig& cfg,
          const std::filesystem::path& dir);

}  // namespace pdrive::report
