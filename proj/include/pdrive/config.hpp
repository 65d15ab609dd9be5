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

// JSON scenario files. Every key is optional and defaults to the built-in
// value; unknown keys are rejected. Errors carry the offending key path
// (e.g. "agents[0].reference.v_ref").

#include "pdrive/sim.hpp"

#include <filesystem>
#include <string>

namespace pdrive::config {

/// Parses a scenario document. Keys missing from the document take the
/// defaults of the built-in named by "base" when present, otherwise the
/// struct defaults. Throws kConfig naming the key.
sim::ScenarioConfig from_json_text(const std::string& text);

sim::ScenarioConfig load(const std::filesystem::path& path);

/// Full document; from_json_text(to_json_text(c)) reproduces c exactly.
std::string to_json_text(const sim::ScenarioConfig& c);

void save(const sim::ScenarioConfig& c, const std::filesystem::path& path);

/// Compact plan document; doubles are written in shortest round-trip form.
std::string plan_to_json_text(const Plan& plan);
Plan plan_from_json_text(const std::string& text);

}  // namespace pdrive::config
