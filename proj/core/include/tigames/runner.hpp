// Copyright 2026 The tigames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "tigames/config.hpp"

namespace tigames {

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitNotConverged = 3,
};

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct Verdict {
  std::string command;
  std::vector<Check> checks;
  bool converged = true;
  std::string message;
  std::vector<std::string> artifacts;

  bool pass() const;
  int exit_code() const;
};

/// Dispatches on config.command, writes CSV files and verdict.json into
/// config.output_dir and returns the verdict.  Model errors in the
/// configuration surface as ConfigError.
Verdict run(const ExperimentConfig& config);

std::string verdict_json(const Verdict& v);

}  // namespace tigames
