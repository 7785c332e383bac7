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

// tigames <command> --config path [--seed u64] [--out dir]

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tigames/config.hpp"
#include "tigames/runner.hpp"

namespace {

int config_error(const std::vector<std::string>& errors) {
  for (const std::string& e : errors) std::cerr << "config error: " << e << "\n";
  return tigames::kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of time-inconsistent N-player and mean-field games"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  for (const char* name : {"lq-verify", "solve-nplayer", "solve-meanfield", "zerosum", "converge"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out, "override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tigames::kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();

  tigames::ExperimentConfig config;
  try {
    config = tigames::parse_config(text.str());
  } catch (const tigames::ConfigError& e) {
    return config_error(e.errors());
  }
  if (config.command != command) {
    return config_error({"command: config declares '" + config.command + "' but '" + command + "' was invoked"});
  }
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;

  tigames::Verdict verdict;
  try {
    verdict = tigames::run(config);
  } catch (const tigames::ConfigError& e) {
    return config_error(e.errors());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tigames::kExitCheckFailed;
  }

  for (const tigames::Check& c : verdict.checks) {
    std::printf("%-32s %-4s measured=%.6g tol=%.6g %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.measured,
                c.tolerance, c.note.c_str());
  }
  if (!verdict.converged) std::printf("not converged: %s\n", verdict.message.c_str());
  std::printf("verdict: %s (exit %d)\n", verdict.pass() ? "pass" : "fail", verdict.exit_code());
  return verdict.exit_code();
}
