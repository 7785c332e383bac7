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

// Mean-field equilibria by fixed-point iteration on a particle law flow.
//
// Each outer iteration simulates P particles of the representative agent
// against the current flow xi, solves the single-agent BSDE backward with
// N* = phi2(xi_T), and replaces xi by the empirical flow of the particles.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tigames/model.hpp"
#include "tigames/nplayer.hpp"
#include "tigames/regression.hpp"
#include "tigames/sde.hpp"

namespace tigames {

/// Per-step particle clouds; states for steps 0..n, controls for 0..n-1.
class LawFlow {
 public:
  LawFlow(TimeGrid grid, std::size_t particles);
  static LawFlow from_ensemble(const PathEnsemble& ens, std::size_t iteration);

  const TimeGrid& grid() const { return grid_; }
  std::size_t particles() const { return p_; }
  std::span<const double> states(std::size_t k) const;
  std::span<const double> controls(std::size_t k) const;
  std::span<double> states(std::size_t k);
  std::span<double> controls(std::size_t k);

  /// Law summary at step k; step n carries no controls.
  LawView view(std::size_t k) const;

  std::size_t iteration = 0;
  double distance_to_previous = 0.0;

 private:
  TimeGrid grid_;
  std::size_t p_;
  std::vector<double> states_;
  std::vector<double> controls_;
};

/// sup_k W2(states) + W2(controls).
double lawflow_distance(const LawFlow& a, const LawFlow& b);

/// phi2 of the empirical terminal law.
double n_star(const GameSpec& spec, std::span<const double> terminal_states);

struct MeanFieldConfig {
  TimeGrid grid;
  std::size_t particles = 1u << 14;
  RegressionBasis basis;
  std::size_t max_outer = 10;
  /// Stop once the flow distance is below tol_w * sd(X_T).
  double tol_w = 5e-3;
  /// Weight of the new flow; 1 replaces xi outright.
  double damping = 1.0;
  std::uint64_t seed = 20260303;
  bool control_variate = true;
};

struct MeanFieldReport {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> distance;     // sup_t W2 per outer iteration
  std::vector<double> y0_mean;
  std::vector<double> alpha_sup_change;
  double tolerance = 0.0;           // absolute, after scaling by sd(X_T)
  std::string message;
};

struct MeanFieldSolution {
  GameSpec spec;
  MeanFieldConfig config;
  PathEnsemble ensemble;                       // last simulation, one player
  std::shared_ptr<const FeedbackLaw> law;      // fitted on `ensemble`
  std::shared_ptr<const LawFlow> flow;         // empirical flow of `ensemble`
  std::shared_ptr<const LawFlow> input_flow;   // flow `ensemble` was run against
  std::vector<double> Y;                       // [k][p]
  std::vector<double> Mstar;                   // [k][p]
  double nstar = 0.0;
  MeanFieldReport report;

  std::size_t particles() const { return ensemble.paths(); }
  double y(std::size_t p, std::size_t k) const { return Y[k * particles() + p]; }
  double mstar(std::size_t p, std::size_t k) const { return Mstar[k * particles() + p]; }

  /// Equilibrium feedback control against the solved flow.
  ControlField control_field() const;
};

/// Control field of the representative agent: maximiser of f + z b with the
/// law frozen at `flow`.
ControlField meanfield_control_field(const GameSpec& spec, std::shared_ptr<const FeedbackLaw> law,
                                     std::shared_ptr<const LawFlow> flow);

MeanFieldSolution solve_meanfield(const GameSpec& spec, const MeanFieldConfig& config,
                                  std::shared_ptr<const LawFlow> initial_flow = nullptr);

/// Y_u per particle.
std::vector<double> meanfield_value_process(const MeanFieldSolution& sol, double u);

/// Rows (iter, sup_t_W2, Y0_mean, alpha_sup_change).
std::vector<std::vector<double>> meanfield_table(const MeanFieldSolution& sol);

}  // namespace tigames
