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

// Regression Monte Carlo for the coupled N-player BSDE system
//
//   Y^i   = g + G(phi1, phi2) + int (f - dmnG Zm.Zn - dmmG |Zm|^2/2 - dnnG |Zn|^2/2) - int Z dW
//   M^i*  = phi1(X^i_T) - int Zm dW
//   N*    = phi2(L^N(X_T)) - int Zn dW
//
// simulated under the measure induced by the current control field, with
// controls taken from the Hamiltonian fixed point at every step.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tigames/model.hpp"
#include "tigames/regression.hpp"
#include "tigames/sde.hpp"

namespace tigames {

/// Per-step regression coefficients of (Z, Zm, Zn, M*, N*) on the basis of
/// each player's own state and the cross-player mean.
class FeedbackLaw {
 public:
  FeedbackLaw(std::size_t steps, std::size_t players, RegressionBasis basis);

  std::size_t steps() const { return steps_; }
  std::size_t players() const { return n_; }
  std::size_t basis_size() const { return p_; }
  const RegressionBasis& basis() const { return basis_; }
  bool with_mean() const { return n_ > 1; }

  std::span<double> z(std::size_t k, std::size_t i, std::size_t l) { return block(k, i * n_ + l); }
  std::span<const double> z(std::size_t k, std::size_t i, std::size_t l) const { return block(k, i * n_ + l); }
  std::span<double> zm(std::size_t k, std::size_t i, std::size_t l) { return block(k, n_ * n_ + i * n_ + l); }
  std::span<const double> zm(std::size_t k, std::size_t i, std::size_t l) const { return block(k, n_ * n_ + i * n_ + l); }
  std::span<double> mstar(std::size_t k, std::size_t i) { return block(k, 2 * n_ * n_ + i); }
  std::span<const double> mstar(std::size_t k, std::size_t i) const { return block(k, 2 * n_ * n_ + i); }
  std::span<double> zn(std::size_t k, std::size_t l) { return block(k, 2 * n_ * n_ + n_ + l); }
  std::span<const double> zn(std::size_t k, std::size_t l) const { return block(k, 2 * n_ * n_ + n_ + l); }
  std::span<double> nstar(std::size_t k) { return block(k, 2 * n_ * n_ + 2 * n_); }
  std::span<const double> nstar(std::size_t k) const { return block(k, 2 * n_ * n_ + 2 * n_); }

  std::optional<double> mstar_bound;
  std::optional<double> nstar_bound;

  /// Fills (x, z, m*, n*, zm, zn) of `out` at step k for one joint state.
  void evaluate(std::size_t k, double t, std::span<const double> x, HamiltonianState& out) const;

  /// this <- theta * other + (1 - theta) * this.
  void blend(const FeedbackLaw& other, double theta);

 private:
  std::span<double> block(std::size_t k, std::size_t slot) {
    return {data_.data() + (k * slots_ + slot) * p_, p_};
  }
  std::span<const double> block(std::size_t k, std::size_t slot) const {
    return {data_.data() + (k * slots_ + slot) * p_, p_};
  }

  std::size_t steps_, n_, p_, slots_;
  RegressionBasis basis_;
  std::vector<double> data_;
};

/// Pathwise values at one grid step.  Layouts: Y, Mstar [i][p]; Nstar [p];
/// Z, Zm [i][l][p]; Zn [l][p].  Z-blocks at step k integrate over [t_k, t_{k+1}).
struct StepValues {
  std::vector<double> Y;
  std::vector<double> Mstar;
  std::vector<double> Nstar;
  std::vector<double> Z;
  std::vector<double> Zm;
  std::vector<double> Zn;
};

struct BackwardOptions {
  /// Regress Y_{k+1} - Z dW instead of Y_{k+1} (martingale control variate).
  bool control_variate = true;
  std::optional<double> mstar_bound;
  std::optional<double> nstar_bound;
  /// External law for f, b and g (mean-field); law(n) is the terminal law.
  LawProvider law;
  /// Mean-field: N* is this constant and Zn vanishes.
  std::optional<double> constant_nstar;
};

/// Terminal values Y = g + G(phi1, phi2), M* = phi1, N* = phi2.
StepValues terminal_values(const GameSpec& spec, const PathEnsemble& ens,
                           const BackwardOptions& options = {});

/// One regression step from `next` (step k + 1) to step k.  When `law_out`
/// is given its step-k coefficients are filled.
StepValues backward_step(const GameSpec& spec, const PathEnsemble& ens, std::size_t k,
                         const StepValues& next, const RegressionBasis& basis,
                         const BackwardOptions& options = {}, FeedbackLaw* law_out = nullptr);

struct BackwardSweep {
  FeedbackLaw law;
  std::vector<double> Y;      // [k][i][p], k in [0, n]
  std::vector<double> Mstar;  // [k][i][p]
  std::vector<double> Nstar;  // [k][p]
};

BackwardSweep backward_sweep(const GameSpec& spec, const PathEnsemble& ens,
                             const RegressionBasis& basis, const BackwardOptions& options = {});

/// Turns a feedback law into a control field by solving the Hamiltonian
/// fixed point at each visited state.  Warm starts make the field stateful:
/// one instance must not be shared between threads.
class FeedbackController {
 public:
  FeedbackController(const GameSpec& spec, const TimeGrid& grid,
                     std::shared_ptr<const FeedbackLaw> law, FixedPointOptions options);

  void operator()(std::size_t step, double t, std::span<const double> states,
                  std::span<double> controls);

  std::size_t unconverged() const { return unconverged_; }
  std::size_t bisections() const { return bisections_; }

 private:
  const GameSpec* spec_;
  std::shared_ptr<const FeedbackLaw> law_;
  FixedPointOptions options_;
  HamiltonianState state_;
  std::vector<double> warm_;
  std::vector<double> first_;
  bool have_first_ = false;
  std::size_t unconverged_ = 0;
  std::size_t bisections_ = 0;
};

struct PicardConfig {
  std::size_t max_iters = 20;
  double damping = 0.5;
  double tol = 1e-3;
};

struct NPlayerConfig {
  TimeGrid grid;
  std::size_t paths = 1u << 14;
  RegressionBasis basis;
  PicardConfig picard;
  std::uint64_t seed = 20260101;
  FixedPointOptions fixed_point;
  bool control_variate = true;
  /// Paths on which the grid fixed-point residual is traced per step.
  std::size_t residual_sample = 64;
};

struct ConvergenceReport {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> control_change;  // per outer iteration after the first
  std::vector<double> residual_trace;  // per step, max over sampled paths
  std::size_t unconverged_fixed_points = 0;
  std::string message;
};

struct EquilibriumSolution {
  GameSpec spec;
  NPlayerConfig config;
  PathEnsemble ensemble;
  std::shared_ptr<const FeedbackLaw> control_law;  // generated `ensemble`
  std::shared_ptr<const FeedbackLaw> value_law;    // fitted on `ensemble`
  std::vector<double> Y;
  std::vector<double> Mstar;
  std::vector<double> Nstar;
  ConvergenceReport report;

  std::size_t players() const { return ensemble.players(); }
  std::size_t paths() const { return ensemble.paths(); }
  std::size_t steps() const { return ensemble.steps(); }

  double y(std::size_t p, std::size_t i, std::size_t k) const { return Y[(k * players() + i) * paths() + p]; }
  double mstar(std::size_t p, std::size_t i, std::size_t k) const { return Mstar[(k * players() + i) * paths() + p]; }
  double nstar(std::size_t p, std::size_t k) const { return Nstar[k * paths() + p]; }
  /// Z^{i,l}, Zm^{i,l}, Zn^l at step k < n, from the fitted value law.
  double z(std::size_t p, std::size_t i, std::size_t l, std::size_t k) const;
  double zm(std::size_t p, std::size_t i, std::size_t l, std::size_t k) const;
  double zn(std::size_t p, std::size_t l, std::size_t k) const;

  /// A fresh control field replaying the equilibrium feedback.
  ControlField control_field() const;
};

EquilibriumSolution solve_nplayer(const GameSpec& spec, const NPlayerConfig& config);

/// Y^i_u pathwise for player i.
std::vector<double> value_process(const EquilibriumSolution& sol, double u, std::size_t player = 0);

struct DeviationConfig {
  std::size_t window_steps = 1;
  std::size_t pivots = 20;
  std::size_t paths_per_pivot = 256;
  double epsilon = 0.05;
  std::uint64_t seed = 7;
  std::size_t player = 0;
};

struct DeviationResult {
  double t = 0.0;
  std::optional<double> deviation;
  double gap = 0.0;
  double se = 0.0;
  double threshold = 0.0;  // -(epsilon l + 3 se)
  bool pass = false;
};

/// Payoff gap J(t, alpha_hat) - J(t, abar on [t, t + l] then alpha_hat) for
/// each constant deviation (nullopt means no deviation).  Baseline and
/// deviation share random numbers; the standard error is taken across the
/// pivot paths used as conditioning states.
std::vector<DeviationResult> epsilon_deviation_test(const EquilibriumSolution& sol, double t,
                                                    std::span<const std::optional<double>> deviations,
                                                    const DeviationConfig& config = {});

DeviationResult epsilon_deviation_test(const EquilibriumSolution& sol, double t,
                                       std::optional<double> deviation,
                                       const DeviationConfig& config = {});

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct DiagnosticsReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const;
};

/// sup|M*| <= c_phi1, sup|N*| <= c_phi2, E sum_l int |Zm|^2 <= c_phi1^2 + 3 SE
/// and player-independence of N*.
DiagnosticsReport appendix_diagnostics(const EquilibriumSolution& sol);

enum class MartingaleProcess { kMstar, kNstar };

/// Out-of-sample check on a fresh ensemble: for every step k the mean of
/// terminal value minus fitted value at k, which vanishes for a martingale.
std::vector<Estimate> martingale_residuals(const EquilibriumSolution& sol, MartingaleProcess which,
                                           std::size_t paths, std::uint64_t seed,
                                           std::size_t player = 0);

/// Rows of (t, player, mean_Y, mean_alpha, fixed_point_residual, mstar_bound_slack).
std::vector<std::vector<double>> nplayer_table(const EquilibriumSolution& sol);

}  // namespace tigames
