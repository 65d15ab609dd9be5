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

// Self-check of the closed forms against the numerical oracles, for the
// command line `verify`. Seeded, so each run checks the same instances.

#include <functional>
#include <string>
#include <vector>

namespace pdrive::verify {

struct Check {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every check in order; `on_result` sees each one as it finishes.
std::vector<Check> run_oracle_suite(const std::function<void(const Check&)>& on_result = {});

}  // namespace pdrive::verify
