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

#include "tigames/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace tigames {

void ControlSet::validate() const {
  if (!(std::isfinite(lower) && std::isfinite(upper)) || !(lower < upper)) {
    throw ModelError("control set requires finite lower < upper");
  }
  if (grid_points < 2) throw ModelError("control set requires grid_points >= 2");
}

double ControlSet::point(std::size_t j) const {
  if (j + 1 == grid_points) return upper;
  return lower + spacing() * static_cast<double>(j);
}

double project_to_A(double a, const ControlSet& cs) { return std::clamp(a, cs.lower, cs.upper); }

namespace {

std::size_t nearest_index(double a, const ControlSet& cs) {
  const double r = (a - cs.lower) / cs.spacing();
  if (!(r > 0.0)) return 0;
  const auto j = static_cast<std::size_t>(std::llround(r));
  return std::min(j, cs.grid_points - 1);
}

}  // namespace

void TimeGrid::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ModelError("time grid horizon must be > 0");
  if (steps < 1) throw ModelError("time grid requires steps >= 1");
}

double TimeGrid::time(std::size_t k) const {
  if (k >= steps) return horizon;
  return horizon * static_cast<double>(k) / static_cast<double>(steps);
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  const double r = t / dt();
  if (!std::isfinite(r) || r < -1e-9) return std::nullopt;
  const double j = std::round(r);
  if (std::abs(r - j) > 1e-9 * std::max(1.0, r) || j > static_cast<double>(steps)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(j);
}

std::size_t TimeGrid::require_index(double t) const {
  auto k = index_of(t);
  if (!k) throw ModelError("time " + std::to_string(t) + " is off grid");
  return *k;
}

LawView LawView::summarize(std::span<const double> states, std::span<const double> controls) {
  LawView v;
  v.states = states;
  v.controls = controls;
  if (!states.empty()) {
    double s = 0.0, q = 0.0;
    for (double x : states) {
      s += x;
      q += x * x;
    }
    const double n = static_cast<double>(states.size());
    v.mean_state = s / n;
    v.second_state = q / n;
  }
  if (!controls.empty()) {
    double s = 0.0, q = 0.0;
    for (double a : controls) {
      s += a;
      q += a * a;
    }
    const double n = static_cast<double>(controls.size());
    v.mean_control = s / n;
    v.second_control = q / n;
  }
  return v;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> states, std::vector<double> controls)
    : states_(std::move(states)), controls_(std::move(controls)) {
  if (states_.empty()) throw ModelError("empty ensemble");
  if (!controls_.empty() && controls_.size() != states_.size()) {
    throw ModelError("state and control atoms differ in count");
  }
}

EmpiricalMeasure empirical_measure(std::span<const Atom> samples) {
  if (samples.empty()) throw ModelError("empty ensemble");
  std::vector<double> s, c;
  s.reserve(samples.size());
  c.reserve(samples.size());
  for (const Atom& a : samples) {
    s.push_back(a.state);
    c.push_back(a.control);
  }
  return EmpiricalMeasure(std::move(s), std::move(c));
}

double wasserstein_1d(std::span<const double> mu, std::span<const double> nu, int p) {
  if (mu.empty() || nu.empty()) throw ModelError("wasserstein_1d: empty input");
  if (p != 1 && p != 2) throw ModelError("wasserstein_1d: p must be 1 or 2");
  const std::size_t n = mu.size(), m = nu.size();
  auto cost = [p](double d) { return p == 1 ? std::abs(d) : d * d; };
  double acc = 0.0;
  if (n == m) {
    for (std::size_t i = 0; i < n; ++i) acc += cost(mu[i] - nu[i]);
    acc /= static_cast<double>(n);
  } else {
    // Walk the merged breakpoints i/n and j/m of both quantile functions,
    // using integer cross-multiplication so the partition is exact.
    std::size_t i = 0, j = 0;
    std::size_t prev = 0;  // in units of 1/(n m)
    while (i < n && j < m) {
      const std::size_t bi = (i + 1) * m, bj = (j + 1) * n;
      const std::size_t next = std::min(bi, bj);
      acc += static_cast<double>(next - prev) * cost(mu[i] - nu[j]);
      prev = next;
      if (bi == next) ++i;
      if (bj == next) ++j;
    }
    acc /= static_cast<double>(n) * static_cast<double>(m);
  }
  return p == 1 ? acc : std::sqrt(acc);
}

double wasserstein_1d_unsorted(std::vector<double> mu, std::vector<double> nu, int p) {
  std::sort(mu.begin(), mu.end());
  std::sort(nu.begin(), nu.end());
  return wasserstein_1d(mu, nu, p);
}

CouplingFunction CouplingFunction::zero() { return quadratic(0.0, 0.0, 0.0); }

CouplingFunction CouplingFunction::quadratic(double c_mm, double c_mn, double c_nn, double c_m,
                                             double c_n) {
  CouplingFunction g;
  g.value = [=](double m, double n) {
    return 0.5 * c_mm * m * m + c_mn * m * n + 0.5 * c_nn * n * n + c_m * m + c_n * n;
  };
  g.dm = [=](double m, double n) { return c_mm * m + c_mn * n + c_m; };
  g.dn = [=](double m, double n) { return c_mn * m + c_nn * n + c_n; };
  g.dmm = [=](double, double) { return c_mm; };
  g.dmn = [=](double, double) { return c_mn; };
  g.dnn = [=](double, double) { return c_nn; };
  return g;
}

void GameSpec::validate() const {
  if (num_players < 1) throw ModelError("num_players must be >= 1");
  if (state_dim != 1 || noise_dim != 1) {
    throw ModelError("only state and noise dimension 1 are supported");
  }
  if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
  if (!(initial_stddev >= 0.0)) throw ModelError("initial_stddev must be >= 0");
  control_set.validate();
  if (!sigma || !drift_b || !running_f || !terminal_g || !phi1 || !phi2) {
    throw ModelError("game spec is missing a required coefficient");
  }
  if (!G.value || !G.dm || !G.dn || !G.dmm || !G.dmn || !G.dnn) {
    throw ModelError("coupling G is missing a partial derivative");
  }
  for (const auto* b : {&drift_bound, &phi1_bound, &phi2_bound}) {
    if (*b && !(**b >= 0.0)) throw ModelError("declared bounds must be >= 0");
  }
}

HamiltonianState::HamiltonianState(std::size_t players)
    : x(players, 0.0),
      z(players * players, 0.0),
      mstar(players, 0.0),
      zm(players * players, 0.0),
      zn(players, 0.0),
      n_(players) {
  if (players == 0) throw ModelError("num_players must be >= 1");
}

PlayerHamiltonian::PlayerHamiltonian(const GameSpec& spec, const HamiltonianState& state,
                                     std::size_t player, std::span<const double> controls)
    : spec_(spec), state_(state), player_(player), controls_(controls.begin(), controls.end()) {
  const std::size_t n = state.players();
  if (controls.size() != n || player >= n) {
    throw ModelError("hamiltonian: dimension mismatch");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (l == player) continue;
    other_sum_ += controls_[l];
    other_sq_sum_ += controls_[l] * controls_[l];
  }
  base_ = LawView::summarize(state.x);
  const double m = state.mstar[player], nn = state.nstar;
  const double gmm = spec.G.dmm(m, nn), gmn = spec.G.dmn(m, nn), gnn = spec.G.dnn(m, nn);
  double zm2 = 0.0, zmzn = 0.0, zn2 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double a = state.zm_at(player, l), b = state.zn[l];
    zm2 += a * a;
    zmzn += a * b;
    zn2 += b * b;
  }
  penalty_ = 0.5 * gmm * zm2 + gmn * zmzn + 0.5 * gnn * zn2;
}

double PlayerHamiltonian::operator()(double a) {
  const std::size_t n = state_.players();
  const double inv = 1.0 / static_cast<double>(n);
  controls_[player_] = a;
  LawView law = base_;
  law.controls = controls_;
  law.mean_control = (other_sum_ + a) * inv;
  law.second_control = (other_sq_sum_ + a * a) * inv;

  const double t = state_.t;
  const double xi = state_.x[player_];
  double h = spec_.running_f(t, xi, law, a) + state_.z_at(player_, player_) * spec_.drift_b(t, xi, law, a);
  for (std::size_t l = 0; l < n; ++l) {
    if (l == player_) continue;
    const double zil = state_.z_at(player_, l);
    if (zil != 0.0) h += zil * spec_.drift_b(t, state_.x[l], law, controls_[l]);
  }
  return h - penalty_;
}

double hamiltonian_i(const GameSpec& spec, const HamiltonianState& state, std::size_t player,
                     double a, std::span<const double> controls) {
  PlayerHamiltonian h(spec, state, player, controls);
  return h(a);
}

double lambda_control(const GameSpec& spec, const HamiltonianState& state, std::size_t player) {
  if (!spec.lambda_max) throw ModelError("lambda_max not supplied");
  const LawView law = LawView::summarize(state.x);
  const double aleph = spec.aleph ? spec.aleph(player, state) : 0.0;
  const double a = spec.lambda_max(state.t, state.x[player], law, state.z_at(player, player),
                                   state.zm_at(player, player), state.zn[player], aleph);
  return project_to_A(a, spec.control_set);
}

namespace {

struct ScanResult {
  double control;
  double value;
};

ScanResult grid_scan(PlayerHamiltonian& h, const ControlSet& cs) {
  ScanResult best{cs.lower, -std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < cs.grid_points; ++j) {
    const double a = cs.point(j);
    const double v = h(a);
    if (v > best.value) best = {a, v};
  }
  return best;
}

}  // namespace

double argmax_control(const GameSpec& spec, const HamiltonianState& state, std::size_t player,
                      std::span<const double> controls, ArgmaxOptions options) {
  if (options.use_lambda_max && spec.lambda_max) return lambda_control(spec, state, player);
  PlayerHamiltonian h(spec, state, player, controls);
  return grid_scan(h, spec.control_set).control;
}

double fixed_point_residual(const GameSpec& spec, const HamiltonianState& state,
                            std::span<const double> controls) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.players(); ++i) {
    PlayerHamiltonian h(spec, state, i, controls);
    const double current = h(controls[i]);
    const double sup = std::max(grid_scan(h, spec.control_set).value, current);
    worst = std::max(worst, sup - current);
  }
  return worst;
}

namespace {

// Two-player composite map on grid indices: j -> index(BR2(BR1(a2_j))).
class CompositeMap {
 public:
  CompositeMap(const GameSpec& spec, const HamiltonianState& state, ArgmaxOptions opts)
      : spec_(spec), state_(state), opts_(opts) {}

  std::ptrdiff_t gap(std::size_t j, double* a1_out = nullptr) {
    const ControlSet& cs = spec_.control_set;
    buf_[1] = cs.point(j);
    buf_[0] = argmax_control(spec_, state_, 0, buf_, opts_);
    const double a1 = buf_[0];
    const double a2 = argmax_control(spec_, state_, 1, buf_, opts_);
    if (a1_out) *a1_out = a1;
    return static_cast<std::ptrdiff_t>(nearest_index(a2, cs)) - static_cast<std::ptrdiff_t>(j);
  }

 private:
  const GameSpec& spec_;
  const HamiltonianState& state_;
  ArgmaxOptions opts_;
  double buf_[2] = {0.0, 0.0};
};

// Bisection on an integer bracket where gap changes sign.
std::size_t bisect(CompositeMap& map, std::size_t lo, std::size_t hi, std::ptrdiff_t glo) {
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::ptrdiff_t g = map.gap(mid);
    if (g == 0) return mid;
    if ((g > 0) == (glo > 0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
    }
  }
  return lo;
}

bool composite_bisection(const GameSpec& spec, const HamiltonianState& state, double warm,
                         ArgmaxOptions opts, std::vector<double>& out) {
  const ControlSet& cs = spec.control_set;
  const std::size_t last = cs.grid_points - 1;
  CompositeMap map(spec, state, opts);
  const std::size_t c = nearest_index(warm, cs);
  std::ptrdiff_t gc = map.gap(c);
  std::size_t root = c;
  if (gc != 0) {
    // Grow a bracket around the warm start so the fixed point nearest to it
    // is preferred over corner equilibria created by clamping.
    std::size_t w = 1;
    bool found = false;
    while (!found) {
      const std::size_t lo = c > w ? c - w : 0;
      const std::size_t hi = std::min(last, c + w);
      const std::ptrdiff_t glo = lo == c ? gc : map.gap(lo);
      const std::ptrdiff_t ghi = hi == c ? gc : map.gap(hi);
      if (glo == 0) {
        root = lo;
        found = true;
      } else if (ghi == 0) {
        root = hi;
        found = true;
      } else if ((gc > 0) != (ghi > 0)) {
        root = bisect(map, c, hi, gc);
        found = true;
      } else if ((glo > 0) != (gc > 0)) {
        root = bisect(map, lo, c, glo);
        found = true;
      }
      if (lo == 0 && hi == last) break;
      w *= 2;
    }
    if (!found) return false;
  }
  double a1 = 0.0;
  const std::ptrdiff_t g = map.gap(root, &a1);
  out[0] = a1;
  out[1] = cs.point(root);
  return g == 0;
}

}  // namespace

FixedPointResult solve_hamiltonian_fixed_point(const GameSpec& spec, const HamiltonianState& state,
                                               std::span<const double> warm_start,
                                               const FixedPointOptions& options) {
  const std::size_t n = state.players();
  if (warm_start.size() != n) throw ModelError("fixed point: warm start has wrong size");
  FixedPointResult res;
  res.controls.assign(warm_start.begin(), warm_start.end());

  if (options.argmax.use_lambda_max && spec.lambda_max) {
    for (std::size_t i = 0; i < n; ++i) res.controls[i] = lambda_control(spec, state, i);
    res.method = FixedPointMethod::kLambda;
    if (options.compute_residual) res.residual = fixed_point_residual(spec, state, res.controls);
    return res;
  }

  std::vector<double> next(n);
  bool settled = false;
  for (std::size_t s = 0; s < options.max_sweeps && !settled; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = argmax_control(spec, state, i, res.controls, options.argmax);
    }
    settled = next == res.controls;
    res.controls.swap(next);
    res.sweeps = s + 1;
  }
  res.method = FixedPointMethod::kBestResponse;

  if (!settled) {
    if (n == 2) {
      std::vector<double> pair(2);
      if (composite_bisection(spec, state, warm_start[1], options.argmax, pair)) {
        res.controls = pair;
        res.method = FixedPointMethod::kCompositeBisection;
      } else {
        res.method = FixedPointMethod::kUnconverged;
      }
    } else {
      res.method = FixedPointMethod::kUnconverged;
    }
  }
  if (options.compute_residual) res.residual = fixed_point_residual(spec, state, res.controls);
  return res;
}

}  // namespace tigames
