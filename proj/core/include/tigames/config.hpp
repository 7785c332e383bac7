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

// Experiment configuration: strict JSON, schema version 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tigames/lq.hpp"
#include "tigames/model.hpp"

namespace tigames {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Polynomial coefficient table:
///   b = b_a a + b_x x + b_0
///   f = f_aa a^2 + f_a a + f_x x + f_xx x^2 + f_mean_state mean(x) + f_mean_control mean(a)
///   g = g_x x + g_xx x^2,  G = G_mm m^2 / 2,  phi1 = x,  phi2 = 0.
struct CustomGame {
  double b_a = 1.0;
  double b_x = 0.0;
  double b_0 = 0.0;
  double f_aa = -0.5;
  double f_a = 0.0;
  double f_x = 0.0;
  double f_xx = 0.0;
  double f_mean_state = 0.0;
  double f_mean_control = 0.0;
  double g_x = 1.0;
  double g_xx = 0.0;
  double G_mm = 0.0;
  double a_lower = -1.0;
  double a_upper = 1.0;
  std::size_t grid_points = 201;

  bool operator==(const CustomGame&) const = default;
};

struct GameConfig {
  std::string preset = "ex1";  // ex1 | ex2 | rep51 | custom
  LQParams params;
  double x0 = 0.0;
  std::optional<CustomGame> custom;

  bool operator==(const GameConfig&) const = default;
};

struct NumericsConfig {
  std::size_t steps = 50;
  std::size_t paths = 1u << 14;
  std::size_t particles = 1u << 14;
  int basis_degree = 2;
  double ridge = 0.0;
  double picard_damping = 0.5;
  double picard_tol = 1e-3;
  std::size_t picard_max_iters = 20;
  std::size_t max_outer = 10;
  double tol_w = 5e-3;
  std::size_t quadrature_panels = 512;

  bool operator==(const NumericsConfig&) const = default;
};

struct SweepBlock {
  std::vector<std::size_t> ns{2, 4, 8, 16, 32, 64};
  std::string mode = "closed_form";  // closed_form | numerical
  double u_mid = 0.5;

  bool operator==(const SweepBlock&) const = default;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string command;  // lq-verify | solve-nplayer | solve-meanfield | zerosum | converge
  GameConfig game;
  NumericsConfig numerics;
  SweepBlock sweep;
  std::uint64_t seed = 20260101;
  std::string output_dir = "tigames-out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError listing every problem with its key path.
ExperimentConfig parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& config);

/// Game described by the game block.
GameSpec game_from_config(const ExperimentConfig& config);

}  // namespace tigames
