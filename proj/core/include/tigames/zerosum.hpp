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

// Two-player zero-sum games on a shared state.
//
// Control `a` minimises and `at` maximises the payoff
//   J = E[g(X_T) + int f dt] + G(E[phi(X_T)]).
// The value solves a two-dimensional BSDE (Y, M*) under the reference
// measure, with driver inf_a sup_at {f + z b} + z* b - G''(M*) |Zm|^2 / 2.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tigames/model.hpp"
#include "tigames/regression.hpp"
#include "tigames/sde.hpp"

namespace tigames {

struct ZeroSumSpec {
  using Coefficient = std::function<double(double t, double x, double a, double at)>;
  using Scalar = std::function<double(double)>;

  std::string name = "zero-sum";
  double horizon = 1.0;
  double initial_state = 0.0;
  std::function<double(double t, double x)> sigma;
  Coefficient drift_b;
  Coefficient running_f;
  Scalar terminal_g;
  Scalar G;
  Scalar dG;
  Scalar d2G;
  Scalar phi;
  ControlSet control_set{-1.0, 1.0, 41};

  void validate() const;
};

struct SaddlePoint {
  double gap = 0.0;     // upper value minus lower value, >= 0
  double upper = 0.0;   // inf_a sup_at
  double lower = 0.0;   // sup_at inf_a
  double a = 0.0;       // minimiser of the upper value
  double at = 0.0;      // maximiser of the lower value
};

/// Exhaustive grid inf-sup of f + z b at one state.
SaddlePoint isaacs_gap(const ZeroSumSpec& spec, double t, double x, double z);

/// Tolerance 2 * spacing * (Lipschitz estimate of f + z b in the controls).
double isaacs_tolerance(const ZeroSumSpec& spec, double t, double x, double z);

/// Which player's value is solved.  kMinimiser solves for -J with the roles
/// of the two controls exchanged.
enum class ZeroSumSide { kMaximiser, kMinimiser };

struct ZeroSumConfig {
  TimeGrid grid;
  std::size_t paths = 1u << 12;
  RegressionBasis basis;
  std::uint64_t seed = 20260202;
  /// Sampled states checked for the Isaacs condition per step.
  std::size_t isaacs_sample = 16;
};

class IsaacsViolation : public std::runtime_error {
 public:
  IsaacsViolation(const std::string& what, double t, double x, double z, double gap, double tol)
      : std::runtime_error(what), t(t), x(x), z(z), gap(gap), tolerance(tol) {}
  double t, x, z, gap, tolerance;
};

struct ZeroSumSolution {
  ZeroSumSpec spec;
  ZeroSumConfig config;
  ZeroSumSide side = ZeroSumSide::kMaximiser;
  std::vector<double> X;       // [k][p], reference measure
  std::vector<double> Y;       // [k][p], value of `side`
  std::vector<double> Mstar;   // [k][p]
  std::vector<double> Z;       // [k][p], k < n
  std::vector<double> Zm;      // [k][p]
  std::vector<double> a;       // saddle minimiser control [k][p]
  std::vector<double> at;      // saddle maximiser control [k][p]
  std::vector<std::vector<double>> z_coefficients;  // per step, on the basis of x
  double y0_se = 0.0;
  double z0_se = 0.0;
  double max_gap = 0.0;

  std::size_t paths() const { return config.paths; }
  double y(std::size_t p, std::size_t k) const { return Y[k * paths() + p]; }
  double y0() const;
  double z0() const;
};

ZeroSumSolution solve_zero_sum(const ZeroSumSpec& spec, const ZeroSumConfig& config,
                               ZeroSumSide side = ZeroSumSide::kMaximiser);

struct AntisymmetryReport {
  double y_defect = 0.0;   // |Y1_0 + Y2_0|
  double z_defect = 0.0;   // |Z1_0 + Z2_0|
  double y_se = 0.0;
  double z_se = 0.0;
  bool pass = false;       // both defects within 3 SE
};

AntisymmetryReport antisymmetry_check(const ZeroSumSolution& first, const ZeroSumSolution& second);

/// J(saddle) - J(maximiser plays `deviation` on the first `window` steps),
/// both from X_0 under the tilted measure with common random numbers.
Estimate zero_sum_deviation_gap(const ZeroSumSolution& sol, double deviation,
                                std::size_t window_steps, std::size_t paths, std::uint64_t seed);

/// Rows (t, mean_Y, gap_max, antisymmetry_defect) for a pair of solves.
std::vector<std::vector<double>> zero_sum_table(const ZeroSumSolution& first,
                                                const ZeroSumSolution& second);

}  // namespace tigames
