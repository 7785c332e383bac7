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

// Euler-Maruyama simulation of dX = sigma (b dt + dW) for N players.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tigames/model.hpp"
#include "tigames/rng.hpp"

namespace tigames {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Measure {
  kReference,  // drift omitted, Girsanov log-weights accumulated
  kTilted,     // drift added, log-weights zero
};

/// Feedback control: fills `controls` (one per player) for one path at
/// step k from that path's current `states`.
using ControlField = std::function<void(std::size_t step, double t, std::span<const double> states,
                                        std::span<double> controls)>;

/// Law entering b and f during simulation.  When empty, each path uses the
/// empirical measure of its own N players.
using LawProvider = std::function<LawView(std::size_t step)>;

/// Simulated trajectories.  Storage is step-major, so the cross-section of a
/// player at one step is contiguous over paths.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t players, std::uint64_t seed,
               Measure measure);

  const TimeGrid& grid() const { return grid_; }
  std::size_t paths() const { return m_; }
  std::size_t players() const { return n_; }
  std::size_t steps() const { return grid_.steps; }
  std::uint64_t seed() const { return seed_; }
  Measure measure() const { return measure_; }

  // step in [0, n] for states, [0, n) for increments and controls.
  double& x(std::size_t path, std::size_t player, std::size_t step) { return x_[idx(step, player, path)]; }
  double x(std::size_t path, std::size_t player, std::size_t step) const { return x_[idx(step, player, path)]; }
  double& dw(std::size_t path, std::size_t player, std::size_t step) { return dw_[idx(step, player, path)]; }
  double dw(std::size_t path, std::size_t player, std::size_t step) const { return dw_[idx(step, player, path)]; }
  double& a(std::size_t path, std::size_t player, std::size_t step) { return a_[idx(step, player, path)]; }
  double a(std::size_t path, std::size_t player, std::size_t step) const { return a_[idx(step, player, path)]; }
  double& log_weight(std::size_t path) { return logw_[path]; }
  double log_weight(std::size_t path) const { return logw_[path]; }

  std::span<const double> states_at(std::size_t step, std::size_t player) const;
  std::span<const double> increments_at(std::size_t step, std::size_t player) const;
  std::span<const double> controls_at(std::size_t step, std::size_t player) const;
  std::span<const double> log_weights() const { return logw_; }

  /// Every player's state at one step of one path.
  void joint_state(std::size_t path, std::size_t step, std::span<double> out) const;

  /// Binary dump: "TIGE1", then little-endian u64 fields (state dim, noise
  /// dim, M, N, n, seed, measure), then f64 arrays X, dW, a in
  /// [path][player][step] order, then logE[path].
  void write_binary(std::ostream& os) const;
  static PathEnsemble read_binary(std::istream& is);

  bool bitwise_equal(const PathEnsemble& other) const;

 private:
  std::size_t idx(std::size_t step, std::size_t player, std::size_t path) const {
    return (step * n_ + player) * m_ + path;
  }

  TimeGrid grid_;
  std::size_t m_;
  std::size_t n_;
  std::uint64_t seed_;
  Measure measure_;
  std::vector<double> x_;
  std::vector<double> dw_;
  std::vector<double> a_;
  std::vector<double> logw_;
};

struct SimulationOptions {
  Measure measure = Measure::kTilted;
  LawProvider law;
  double explosion_bound = 1e8;
};

PathEnsemble simulate_paths(const GameSpec& spec, const TimeGrid& grid, const ControlField& field,
                            std::size_t num_paths, RngSpec rng,
                            const SimulationOptions& options = {});

/// Same as simulate_paths but every path starts at `start_states` at grid
/// step `start_step`; earlier steps are filled with `prefix` (a path of
/// `source`) or with the start state when `source` is null.
PathEnsemble simulate_from(const GameSpec& spec, const TimeGrid& grid, const ControlField& field,
                           std::size_t num_paths, RngSpec rng, std::size_t start_step,
                           std::span<const double> start_states,
                           const SimulationOptions& options = {},
                           const PathEnsemble* source = nullptr, std::size_t source_path = 0);

/// sum_k (b_k dW_k - b_k^2 dt / 2).
double girsanov_log_weight(std::span<const double> b_values, std::span<const double> dw, double dt);

/// Re-simulation from the state of path `pivot` at grid time u with fresh
/// streams; every returned path shares the pivot's history up to u.
PathEnsemble conditional_subensemble(const GameSpec& spec, const PathEnsemble& ens,
                                     const ControlField& field, double u, std::size_t pivot,
                                     std::size_t num_paths, const SimulationOptions& options = {});

enum class Statistic { kMean, kVariance, kSupNorm };

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Statistic of X^player at `step`, weighted by exp(logE) on reference
/// ensembles, with a jackknife standard error.
Estimate moment_estimate(const PathEnsemble& ens, Statistic statistic, std::size_t player,
                         std::size_t step);

/// Jackknife-weighted mean of arbitrary per-path values with weights w.
Estimate weighted_mean(std::span<const double> values, std::span<const double> weights = {});

}  // namespace tigames
