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

// Domain types shared by every solver: control sets, time grids, game
// coefficients, empirical measures and the N-player Hamiltonian.
//
// All games are one-dimensional per player (state and noise dimension 1).
// Laws over path space are reduced to laws of the current state value.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tigames {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed interval [lower, upper] with a uniform grid used for argmax scans.
struct ControlSet {
  double lower = -1.0;
  double upper = 1.0;
  std::size_t grid_points = 201;

  void validate() const;
  double spacing() const { return (upper - lower) / static_cast<double>(grid_points - 1); }
  double point(std::size_t j) const;
};

/// Clamp onto the control interval.
double project_to_A(double a, const ControlSet& cs);

/// Uniform grid t_k = k T / n on [0, T].
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 50;

  void validate() const;
  double dt() const { return horizon / static_cast<double>(steps); }
  double time(std::size_t k) const;
  /// Index of a grid time; nullopt when `t` is not on the grid.
  std::optional<std::size_t> index_of(double t) const;
  /// Same as index_of but throws ModelError("... off grid").
  std::size_t require_index(double t) const;
};

/// Non-owning view of an equal-weight measure over (state, control).
/// `controls` is empty for pure state laws.  Moments are precomputed so
/// coefficient functions can use them without touching the atoms.
struct LawView {
  std::span<const double> states;
  std::span<const double> controls;
  double mean_state = 0.0;
  double mean_control = 0.0;
  double second_state = 0.0;
  double second_control = 0.0;

  std::size_t size() const { return states.size(); }
  double variance_state() const { return second_state - mean_state * mean_state; }

  static LawView summarize(std::span<const double> states, std::span<const double> controls = {});
};

struct Atom {
  double state = 0.0;
  double control = 0.0;
};

/// Owning equal-weight atom measure L^N(e) = (1/N) sum delta_{e^l}.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> states, std::vector<double> controls);

  std::size_t size() const { return states_.size(); }
  const std::vector<double>& states() const { return states_; }
  const std::vector<double>& controls() const { return controls_; }
  double weight() const { return 1.0 / static_cast<double>(states_.size()); }
  LawView view() const { return LawView::summarize(states_, controls_); }

 private:
  std::vector<double> states_;
  std::vector<double> controls_;
};

/// Throws ModelError("empty ensemble") on an empty list.
EmpiricalMeasure empirical_measure(std::span<const Atom> samples);

/// W_p between two empirical measures given as sorted samples (p = 1 or 2),
/// computed exactly from the piecewise-constant quantile functions.
double wasserstein_1d(std::span<const double> mu_sorted, std::span<const double> nu_sorted, int p);

/// Convenience overload that sorts copies first.
double wasserstein_1d_unsorted(std::vector<double> mu, std::vector<double> nu, int p);

/// Mean-variance coupling G(m*, n*) with its first and second partials.
struct CouplingFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dm;
  std::function<double(double, double)> dn;
  std::function<double(double, double)> dmm;
  std::function<double(double, double)> dmn;
  std::function<double(double, double)> dnn;

  static CouplingFunction zero();
  /// G(m, n) = c_mm m^2 / 2 + c_mn m n + c_nn n^2 / 2 + c_m m + c_n n.
  static CouplingFunction quadratic(double c_mm, double c_mn, double c_nn, double c_m = 0.0,
                                    double c_n = 0.0);
};

class HamiltonianState;

/// Coefficients of a symmetric game; every function is player-independent.
struct GameSpec {
  using Sigma = std::function<double(double t, double x)>;
  using Coefficient = std::function<double(double t, double x, const LawView& law, double a)>;
  using Terminal = std::function<double(double x, const LawView& state_law)>;
  using PathFunctional = std::function<double(double x)>;
  using LawFunctional = std::function<double(const LawView& state_law)>;
  using LambdaMax = std::function<double(double t, double x, const LawView& state_law, double z,
                                         double zm, double zn, double aleph)>;
  using Aleph = std::function<double(std::size_t player, const HamiltonianState& state)>;

  std::string name = "custom";
  std::size_t state_dim = 1;
  std::size_t noise_dim = 1;
  std::size_t num_players = 2;
  double horizon = 1.0;

  double initial_mean = 0.0;
  double initial_stddev = 0.0;

  Sigma sigma;
  Coefficient drift_b;
  Coefficient running_f;
  Terminal terminal_g;
  CouplingFunction G = CouplingFunction::zero();
  PathFunctional phi1;
  LawFunctional phi2;
  LambdaMax lambda_max;  // optional
  Aleph aleph;           // optional, zero when empty

  ControlSet control_set;

  // Declared bounds; used by diagnostics only.
  std::optional<double> drift_bound;
  std::optional<double> phi1_bound;
  std::optional<double> phi2_bound;
  double dissipativity = 0.0;

  void validate() const;
  bool has_lambda_max() const { return static_cast<bool>(lambda_max); }
};

/// Joint Hamiltonian arguments (x, z, m*, n*, z^{m,*}, z^{n,*}) at one time.
/// z and zm are N x N row-major: row i holds player i's integrands.  The
/// n*-process and its integrand are shared by all players.
class HamiltonianState {
 public:
  explicit HamiltonianState(std::size_t players);

  std::size_t players() const { return n_; }

  double t = 0.0;
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> mstar;
  double nstar = 0.0;
  std::vector<double> zm;
  std::vector<double> zn;

  double& z_at(std::size_t i, std::size_t l) { return z[i * n_ + l]; }
  double z_at(std::size_t i, std::size_t l) const { return z[i * n_ + l]; }
  double& zm_at(std::size_t i, std::size_t l) { return zm[i * n_ + l]; }
  double zm_at(std::size_t i, std::size_t l) const { return zm[i * n_ + l]; }

 private:
  std::size_t n_;
};

/// Evaluates H^{i,N}(. , a, e^N) for a fixed state, player and opponents.
/// The control-independent quadratic penalty is computed once.
class PlayerHamiltonian {
 public:
  PlayerHamiltonian(const GameSpec& spec, const HamiltonianState& state, std::size_t player,
                    std::span<const double> controls);

  double operator()(double a);
  double penalty() const { return penalty_; }

 private:
  const GameSpec& spec_;
  const HamiltonianState& state_;
  std::size_t player_;
  std::vector<double> controls_;
  LawView base_;
  double other_sum_ = 0.0;
  double other_sq_sum_ = 0.0;
  double penalty_ = 0.0;
};

/// H^{i,N} at control `a` for player i, opponents' controls `controls`
/// (entry i is ignored).
double hamiltonian_i(const GameSpec& spec, const HamiltonianState& state, std::size_t player,
                     double a, std::span<const double> controls);

struct ArgmaxOptions {
  bool use_lambda_max = true;
};

/// Maximiser of H^{i,N} over the control grid (smallest control on ties),
/// or Lambda(...) when the spec supplies one and the options allow it.
double argmax_control(const GameSpec& spec, const HamiltonianState& state, std::size_t player,
                      std::span<const double> controls, ArgmaxOptions options = {});

/// Lambda evaluated for player i (projected onto A).  Requires lambda_max.
double lambda_control(const GameSpec& spec, const HamiltonianState& state, std::size_t player);

/// max_i [ sup_grid H^{i,N}(a, e) - H^{i,N}(e^i, e) ], floored at zero.
double fixed_point_residual(const GameSpec& spec, const HamiltonianState& state,
                            std::span<const double> controls);

enum class FixedPointMethod { kLambda, kBestResponse, kCompositeBisection, kUnconverged };

struct FixedPointResult {
  std::vector<double> controls;
  FixedPointMethod method = FixedPointMethod::kBestResponse;
  std::size_t sweeps = 0;
  double residual = 0.0;
};

struct FixedPointOptions {
  ArgmaxOptions argmax;
  std::size_t max_sweeps = 4;
  bool compute_residual = false;
};

/// Finds a discretised element of the Hamiltonian fixed-point set O_N.
///
/// Lambda is used directly when available.  Otherwise simultaneous best
/// responses are iterated from `warm_start`; when that does not settle and
/// N = 2, the composite map a2 -> BR2(BR1(a2)) - a2 is bisected on the grid,
/// which locates a fixed point even when best responses are expansive.
FixedPointResult solve_hamiltonian_fixed_point(const GameSpec& spec, const HamiltonianState& state,
                                               std::span<const double> warm_start,
                                               const FixedPointOptions& options = {});

}  // namespace tigames
