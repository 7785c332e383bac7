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

#include "tigames/nplayer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace tigames {

namespace {

double clamp_opt(double v, const std::optional<double>& bound) {
  return bound ? std::clamp(v, -*bound, *bound) : v;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Row-major design for player i at step k: basis(x_i, xbar).
std::vector<double> design_for(const PathEnsemble& ens, const RegressionBasis& basis,
                               std::size_t k, std::size_t i) {
  const std::size_t n = ens.players(), m = ens.paths();
  const bool with_mean = n > 1;
  const std::size_t p = basis.size(with_mean);
  std::vector<double> d(m * p);
  std::vector<double> xbar(m, 0.0);
  if (with_mean) {
    for (std::size_t l = 0; l < n; ++l) {
      const auto xs = ens.states_at(k, l);
      for (std::size_t j = 0; j < m; ++j) xbar[j] += xs[j];
    }
    for (double& v : xbar) v /= static_cast<double>(n);
  }
  const auto xi = ens.states_at(k, i);
  for (std::size_t j = 0; j < m; ++j) {
    basis.features(xi[j], xbar[j], with_mean, std::span<double>(d.data() + j * p, p));
  }
  return d;
}

void copy_coefficients(std::span<double> dst, const std::vector<double>& src) {
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace

FeedbackLaw::FeedbackLaw(std::size_t steps, std::size_t players, RegressionBasis basis)
    : steps_(steps),
      n_(players),
      p_(basis.size(players > 1)),
      slots_(2 * players * players + 2 * players + 1),
      basis_(basis),
      data_(steps * slots_ * p_, 0.0) {}

void FeedbackLaw::evaluate(std::size_t k, double t, std::span<const double> x,
                           HamiltonianState& out) const {
  const std::size_t n = n_;
  out.t = t;
  double xbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.x[i] = x[i];
    xbar += x[i];
  }
  xbar /= static_cast<double>(n);
  std::vector<double> feats(n * p_);
  for (std::size_t i = 0; i < n; ++i) {
    basis_.features(x[i], xbar, with_mean(), std::span<double>(feats.data() + i * p_, p_));
  }
  auto row = [&](std::size_t i) { return std::span<const double>(feats.data() + i * p_, p_); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      out.z_at(i, l) = tigames::evaluate(z(k, i, l), row(i));
      out.zm_at(i, l) = tigames::evaluate(zm(k, i, l), row(i));
    }
    out.mstar[i] = clamp_opt(tigames::evaluate(mstar(k, i), row(i)), mstar_bound);
  }
  for (std::size_t l = 0; l < n; ++l) out.zn[l] = tigames::evaluate(zn(k, l), row(0));
  out.nstar = clamp_opt(tigames::evaluate(nstar(k), row(0)), nstar_bound);
}

void FeedbackLaw::blend(const FeedbackLaw& other, double theta) {
  if (other.data_.size() != data_.size()) throw ModelError("feedback laws differ in shape");
  for (std::size_t j = 0; j < data_.size(); ++j) {
    data_[j] = theta * other.data_[j] + (1.0 - theta) * data_[j];
  }
  mstar_bound = other.mstar_bound;
  nstar_bound = other.nstar_bound;
}

StepValues terminal_values(const GameSpec& spec, const PathEnsemble& ens,
                           const BackwardOptions& options) {
  const std::size_t n = ens.players(), m = ens.paths(), k = ens.steps();
  StepValues v;
  v.Y.resize(n * m);
  v.Mstar.resize(n * m);
  v.Nstar.resize(m);
  std::vector<double> states(n);
  LawView external;
  if (options.law) external = options.law(k);
  for (std::size_t p = 0; p < m; ++p) {
    ens.joint_state(p, k, states);
    const LawView law = options.law ? external : LawView::summarize(states);
    const double nstar =
        options.constant_nstar ? *options.constant_nstar : clamp_opt(spec.phi2(law), options.nstar_bound);
    v.Nstar[p] = nstar;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = states[i];
      const double mstar = clamp_opt(spec.phi1(x), options.mstar_bound);
      v.Mstar[i * m + p] = mstar;
      v.Y[i * m + p] = spec.terminal_g(x, law) + spec.G.value(mstar, nstar);
    }
  }
  return v;
}

StepValues backward_step(const GameSpec& spec, const PathEnsemble& ens, std::size_t k,
                         const StepValues& next, const RegressionBasis& basis,
                         const BackwardOptions& options, FeedbackLaw* law_out) {
  const std::size_t n = ens.players(), m = ens.paths();
  if (k >= ens.steps()) throw ModelError("backward_step: step out of range");
  if (next.Y.size() != n * m || next.Mstar.size() != n * m || next.Nstar.size() != m) {
    throw ModelError("backward_step: next-step values have wrong shape");
  }
  const bool with_mean = n > 1;
  const std::size_t p = basis.size(with_mean);
  const double dt = ens.grid().dt();
  const double t = ens.grid().time(k);

  StepValues v;
  v.Y.resize(n * m);
  v.Mstar.resize(n * m);
  v.Nstar.resize(m);
  v.Z.resize(n * n * m);
  v.Zm.resize(n * n * m);
  v.Zn.assign(n * m, 0.0);

  std::vector<double> centred(m), target(m), fitted(m);

  // Fits E[next | F_k] and the Z-blocks E[(next - E[next]) dW^l] / dt, then
  // optionally refits next - sum_l Z^l dW^l as a control variate.
  auto project = [&](const LeastSquaresProjector& proj, std::span<const double> y,
                     std::span<double> zs, std::span<double> out,
                     const std::function<void(std::size_t, const std::vector<double>&)>& z_coef,
                     std::vector<double>* y_coef) {
    proj.fit(y, centred);
    for (std::size_t l = 0; l < n; ++l) {
      const auto dw = ens.increments_at(k, l);
      for (std::size_t j = 0; j < m; ++j) target[j] = (y[j] - centred[j]) * dw[j] / dt;
      std::span<double> zl(zs.data() + l * m, m);
      auto c = proj.fit_with_coefficients(target, zl);
      if (z_coef) z_coef(l, c);
    }
    if (options.control_variate) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = y[j];
        for (std::size_t l = 0; l < n; ++l) s -= zs[l * m + j] * ens.increments_at(k, l)[j];
        target[j] = s;
      }
      auto c = proj.fit_with_coefficients(target, out);
      if (y_coef) *y_coef = std::move(c);
    } else {
      auto c = proj.fit_with_coefficients(y, out);
      if (y_coef) *y_coef = std::move(c);
    }
  };

  std::vector<LeastSquaresProjector> projs;
  projs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = design_for(ens, basis, k, i);
    projs.emplace_back(d, m, p, basis.ridge);
  }

  std::vector<double> yhat(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> ynext(next.Y.data() + i * m, m);
    std::span<double> zrow(v.Z.data() + i * n * m, n * m);
    project(
        projs[i], ynext, zrow, std::span<double>(yhat.data() + i * m, m),
        [&](std::size_t l, const std::vector<double>& c) {
          if (law_out) copy_coefficients(law_out->z(k, i, l), c);
        },
        nullptr);

    std::span<const double> mnext(next.Mstar.data() + i * m, m);
    std::span<double> zmrow(v.Zm.data() + i * n * m, n * m);
    std::vector<double> mcoef;
    project(
        projs[i], mnext, zmrow, std::span<double>(v.Mstar.data() + i * m, m),
        [&](std::size_t l, const std::vector<double>& c) {
          if (law_out) copy_coefficients(law_out->zm(k, i, l), c);
        },
        &mcoef);
    if (law_out) copy_coefficients(law_out->mstar(k, i), mcoef);
    for (std::size_t j = 0; j < m; ++j) {
      v.Mstar[i * m + j] = clamp_opt(v.Mstar[i * m + j], options.mstar_bound);
    }
  }

  if (options.constant_nstar) {
    std::fill(v.Nstar.begin(), v.Nstar.end(), *options.constant_nstar);
    if (law_out) {
      auto c = law_out->nstar(k);
      std::fill(c.begin(), c.end(), 0.0);
      c[0] = *options.constant_nstar;
    }
  } else {
    std::vector<double> ncoef;
    project(
        projs[0], next.Nstar, v.Zn, v.Nstar,
        [&](std::size_t l, const std::vector<double>& c) {
          if (law_out) copy_coefficients(law_out->zn(k, l), c);
        },
        &ncoef);
    if (law_out) copy_coefficients(law_out->nstar(k), ncoef);
    for (double& x : v.Nstar) x = clamp_opt(x, options.nstar_bound);
  }

  std::vector<double> states(n), controls(n);
  const LawView external = options.law ? options.law(k) : LawView{};
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      states[i] = ens.x(j, i, k);
      controls[i] = ens.a(j, i, k);
    }
    const LawView law = options.law ? external : LawView::summarize(states, controls);
    const double nstar = v.Nstar[j];
    double zn2 = 0.0;
    for (std::size_t l = 0; l < n; ++l) zn2 += v.Zn[l * m + j] * v.Zn[l * m + j];
    for (std::size_t i = 0; i < n; ++i) {
      const double mstar = v.Mstar[i * m + j];
      double zm2 = 0.0, zmzn = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        const double a = v.Zm[(i * n + l) * m + j];
        zm2 += a * a;
        zmzn += a * v.Zn[l * m + j];
      }
      const double driver = spec.running_f(t, states[i], law, controls[i]) -
                            spec.G.dmn(mstar, nstar) * zmzn - 0.5 * spec.G.dmm(mstar, nstar) * zm2 -
                            0.5 * spec.G.dnn(mstar, nstar) * zn2;
      const double y = yhat[i * m + j] + dt * driver;
      if (!std::isfinite(y)) throw ModelError("backward_step: non-finite value at step " + std::to_string(k));
      v.Y[i * m + j] = y;
    }
  }
  return v;
}

BackwardSweep backward_sweep(const GameSpec& spec, const PathEnsemble& ens,
                             const RegressionBasis& basis, const BackwardOptions& options) {
  basis.validate();
  const std::size_t n = ens.players(), m = ens.paths(), steps = ens.steps();
  BackwardSweep s{FeedbackLaw(steps, n, basis), {}, {}, {}};
  s.law.mstar_bound = options.mstar_bound;
  s.law.nstar_bound = options.nstar_bound;
  s.Y.resize((steps + 1) * n * m);
  s.Mstar.resize((steps + 1) * n * m);
  s.Nstar.resize((steps + 1) * m);
  auto store = [&](std::size_t k, const StepValues& v) {
    std::copy(v.Y.begin(), v.Y.end(), s.Y.begin() + static_cast<std::ptrdiff_t>(k * n * m));
    std::copy(v.Mstar.begin(), v.Mstar.end(), s.Mstar.begin() + static_cast<std::ptrdiff_t>(k * n * m));
    std::copy(v.Nstar.begin(), v.Nstar.end(), s.Nstar.begin() + static_cast<std::ptrdiff_t>(k * m));
  };
  StepValues cur = terminal_values(spec, ens, options);
  store(steps, cur);
  for (std::size_t k = steps; k-- > 0;) {
    cur = backward_step(spec, ens, k, cur, basis, options, &s.law);
    store(k, cur);
  }
  return s;
}

FeedbackController::FeedbackController(const GameSpec& spec, const TimeGrid& grid,
                                       std::shared_ptr<const FeedbackLaw> law,
                                       FixedPointOptions options)
    : spec_(&spec),
      law_(std::move(law)),
      options_(options),
      state_(spec.num_players),
      warm_(spec.num_players, project_to_A(0.0, spec.control_set)),
      first_(spec.num_players, 0.0) {
  if (!law_ || law_->players() != spec.num_players || law_->steps() != grid.steps) {
    throw ModelError("feedback law does not match the game");
  }
}

void FeedbackController::operator()(std::size_t step, double t, std::span<const double> states,
                                    std::span<double> controls) {
  law_->evaluate(step, t, states, state_);
  const std::vector<double>& warm = (step == 0 && have_first_) ? first_ : warm_;
  FixedPointResult r = solve_hamiltonian_fixed_point(*spec_, state_, warm, options_);
  if (r.method == FixedPointMethod::kUnconverged) ++unconverged_;
  if (r.method == FixedPointMethod::kCompositeBisection) ++bisections_;
  std::copy(r.controls.begin(), r.controls.end(), controls.begin());
  warm_ = r.controls;
  if (step == 0) {
    first_ = r.controls;
    have_first_ = true;
  }
}

double EquilibriumSolution::z(std::size_t p, std::size_t i, std::size_t l, std::size_t k) const {
  const std::size_t n = players();
  HamiltonianState st(n);
  std::vector<double> x(n);
  ensemble.joint_state(p, k, x);
  value_law->evaluate(k, ensemble.grid().time(k), x, st);
  return st.z_at(i, l);
}

double EquilibriumSolution::zm(std::size_t p, std::size_t i, std::size_t l, std::size_t k) const {
  const std::size_t n = players();
  HamiltonianState st(n);
  std::vector<double> x(n);
  ensemble.joint_state(p, k, x);
  value_law->evaluate(k, ensemble.grid().time(k), x, st);
  return st.zm_at(i, l);
}

double EquilibriumSolution::zn(std::size_t p, std::size_t l, std::size_t k) const {
  const std::size_t n = players();
  HamiltonianState st(n);
  std::vector<double> x(n);
  ensemble.joint_state(p, k, x);
  value_law->evaluate(k, ensemble.grid().time(k), x, st);
  return st.zn[l];
}

ControlField EquilibriumSolution::control_field() const {
  auto ctl = std::make_shared<FeedbackController>(spec, ensemble.grid(), control_law,
                                                  config.fixed_point);
  return [ctl](std::size_t step, double t, std::span<const double> states,
               std::span<double> controls) { (*ctl)(step, t, states, controls); };
}

namespace {

std::optional<double> empirical_bound(const PathEnsemble& ens,
                                      const std::function<double(std::size_t)>& value) {
  double b = 0.0;
  for (std::size_t p = 0; p < ens.paths(); ++p) b = std::max(b, std::abs(value(p)));
  return b;
}

}  // namespace

EquilibriumSolution solve_nplayer(const GameSpec& spec, const NPlayerConfig& config) {
  spec.validate();
  config.grid.validate();
  config.basis.validate();
  const PicardConfig& pc = config.picard;
  if (!(pc.damping > 0.0 && pc.damping <= 1.0)) throw ModelError("damping must be in (0, 1]");
  if (!(pc.tol > 0.0)) throw ModelError("tol must be > 0");
  if (pc.max_iters < 1) throw ModelError("max_iters must be >= 1");
  const std::size_t n_players = spec.num_players;
  const std::size_t m = config.paths;
  const std::size_t steps = config.grid.steps;
  if (m < 2 * config.basis.size(n_players > 1) * steps) {
    throw ModelError("solve_nplayer needs at least 2 * basis size * steps paths");
  }

  auto law = std::make_shared<const FeedbackLaw>(steps, n_players, config.basis);
  std::optional<PathEnsemble> prev;
  ConvergenceReport report;

  for (std::size_t it = 1;; ++it) {
    auto ctl = std::make_shared<FeedbackController>(spec, config.grid, law, config.fixed_point);
    ControlField field = [ctl](std::size_t step, double t, std::span<const double> states,
                               std::span<double> controls) { (*ctl)(step, t, states, controls); };
    PathEnsemble ens = simulate_paths(spec, config.grid, field, m, RngSpec{config.seed});
    report.unconverged_fixed_points = ctl->unconverged();

    double change = std::numeric_limits<double>::infinity();
    if (prev) {
      change = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < n_players; ++i) {
          const auto a = ens.controls_at(k, i), b = prev->controls_at(k, i);
          double s = 0.0;
          for (std::size_t j = 0; j < m; ++j) s += std::abs(a[j] - b[j]);
          change = std::max(change, s / static_cast<double>(m));
        }
      }
      report.control_change.push_back(change);
    }

    BackwardOptions bo;
    bo.control_variate = config.control_variate;
    bo.mstar_bound = spec.phi1_bound;
    if (!bo.mstar_bound) {
      bo.mstar_bound = empirical_bound(ens, [&](std::size_t p) {
        double b = 0.0;
        for (std::size_t i = 0; i < n_players; ++i) b = std::max(b, std::abs(spec.phi1(ens.x(p, i, steps))));
        return b;
      });
    }
    bo.nstar_bound = spec.phi2_bound;
    if (!bo.nstar_bound) {
      std::vector<double> st(n_players);
      bo.nstar_bound = empirical_bound(ens, [&](std::size_t p) {
        ens.joint_state(p, steps, st);
        return spec.phi2(LawView::summarize(st));
      });
    }
    BackwardSweep sweep = backward_sweep(spec, ens, config.basis, bo);

    const bool converged = prev && change < pc.tol;
    if (converged || it >= pc.max_iters) {
      report.iterations = it;
      report.converged = converged;
      report.message = converged ? "converged" : "picard iteration limit reached";
      auto value_law = std::make_shared<const FeedbackLaw>(std::move(sweep.law));
      EquilibriumSolution sol{spec,          config,        std::move(ens),
                              law,           value_law,     std::move(sweep.Y),
                              std::move(sweep.Mstar), std::move(sweep.Nstar), report};

      // Grid residual of the simulated controls against the fitted Z.
      sol.report.residual_trace.assign(steps, 0.0);
      const std::size_t sample = std::min(config.residual_sample, m);
      if (sample > 0) {
        HamiltonianState st(n_players);
        std::vector<double> x(n_players), a(n_players);
        for (std::size_t k = 0; k < steps; ++k) {
          double worst = 0.0;
          for (std::size_t s = 0; s < sample; ++s) {
            const std::size_t p = s * m / sample;
            sol.ensemble.joint_state(p, k, x);
            for (std::size_t i = 0; i < n_players; ++i) a[i] = sol.ensemble.a(p, i, k);
            value_law->evaluate(k, config.grid.time(k), x, st);
            worst = std::max(worst, fixed_point_residual(spec, st, a));
          }
          sol.report.residual_trace[k] = worst;
        }
      }
      return sol;
    }

    auto next = std::make_shared<FeedbackLaw>(std::move(sweep.law));
    if (it > 1) {
      FeedbackLaw damped = *law;
      damped.blend(*next, pc.damping);
      *next = std::move(damped);
    }
    law = next;
    prev = std::move(ens);
  }
}

std::vector<double> value_process(const EquilibriumSolution& sol, double u, std::size_t player) {
  const std::size_t k = sol.ensemble.grid().require_index(u);
  if (player >= sol.players()) throw ModelError("value_process: player out of range");
  const std::size_t m = sol.paths();
  const auto first = sol.Y.begin() + static_cast<std::ptrdiff_t>((k * sol.players() + player) * m);
  return {first, first + static_cast<std::ptrdiff_t>(m)};
}

namespace {

// J^i(t_k, .) estimated on an ensemble started at step k.
double payoff_estimate(const GameSpec& spec, const PathEnsemble& e, std::size_t k, std::size_t player) {
  const std::size_t n = e.players(), m = e.paths(), steps = e.steps();
  const double dt = e.grid().dt();
  std::vector<double> states(n), controls(n);
  double acc = 0.0, phi1 = 0.0, phi2 = 0.0;
  for (std::size_t p = 0; p < m; ++p) {
    double run = 0.0;
    for (std::size_t s = k; s < steps; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        states[i] = e.x(p, i, s);
        controls[i] = e.a(p, i, s);
      }
      const LawView law = LawView::summarize(states, controls);
      run += spec.running_f(e.grid().time(s), states[player], law, controls[player]) * dt;
    }
    e.joint_state(p, steps, states);
    const LawView terminal = LawView::summarize(states);
    acc += run + spec.terminal_g(states[player], terminal);
    phi1 += spec.phi1(states[player]);
    phi2 += spec.phi2(terminal);
  }
  const double md = static_cast<double>(m);
  return acc / md + spec.G.value(phi1 / md, phi2 / md);
}

}  // namespace

std::vector<DeviationResult> epsilon_deviation_test(const EquilibriumSolution& sol, double t,
                                                    std::span<const std::optional<double>> deviations,
                                                    const DeviationConfig& config) {
  const TimeGrid& grid = sol.ensemble.grid();
  const std::size_t k = grid.require_index(t);
  if (config.window_steps < 1 || k + config.window_steps > grid.steps) {
    throw ModelError("deviation window extends beyond the horizon");
  }
  if (config.pivots < 2 || config.paths_per_pivot < 1) throw ModelError("deviation test needs >= 2 pivots");
  if (config.player >= sol.players()) throw ModelError("deviation player out of range");
  for (const auto& d : deviations) {
    if (d && (*d < sol.spec.control_set.lower || *d > sol.spec.control_set.upper)) {
      throw ModelError("deviation control outside the control set");
    }
  }
  const std::size_t n = sol.players();
  const std::size_t kend = k + config.window_steps;
  std::vector<std::vector<double>> gaps(deviations.size(), std::vector<double>(config.pivots));
  std::vector<double> start(n);

  for (std::size_t b = 0; b < config.pivots; ++b) {
    const std::size_t pivot = b * sol.paths() / config.pivots;
    sol.ensemble.joint_state(pivot, k, start);
    const RngSpec rng{mix_seed(config.seed, b * (grid.steps + 1) + k)};
    const PathEnsemble base = simulate_from(sol.spec, grid, sol.control_field(), config.paths_per_pivot,
                                            rng, k, start);
    const double jbase = payoff_estimate(sol.spec, base, k, config.player);
    for (std::size_t d = 0; d < deviations.size(); ++d) {
      ControlField eq = sol.control_field();
      const std::optional<double> dev = deviations[d];
      ControlField field = [eq, dev, k, kend, &config](std::size_t step, double tt,
                                                      std::span<const double> states,
                                                      std::span<double> controls) {
        eq(step, tt, states, controls);
        if (dev && step >= k && step < kend) controls[config.player] = *dev;
      };
      const PathEnsemble alt = simulate_from(sol.spec, grid, field, config.paths_per_pivot, rng, k, start);
      gaps[d][b] = jbase - payoff_estimate(sol.spec, alt, k, config.player);
    }
  }

  std::vector<DeviationResult> out;
  const double ell = static_cast<double>(config.window_steps) * grid.dt();
  for (std::size_t d = 0; d < deviations.size(); ++d) {
    const Estimate e = weighted_mean(gaps[d]);
    DeviationResult r;
    r.t = t;
    r.deviation = deviations[d];
    r.gap = e.value;
    r.se = e.se;
    r.threshold = -(config.epsilon * ell + 3.0 * e.se);
    r.pass = r.gap >= r.threshold;
    out.push_back(r);
  }
  return out;
}

DeviationResult epsilon_deviation_test(const EquilibriumSolution& sol, double t,
                                       std::optional<double> deviation, const DeviationConfig& config) {
  const std::optional<double> devs[1] = {deviation};
  return epsilon_deviation_test(sol, t, devs, config).front();
}

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

DiagnosticsReport appendix_diagnostics(const EquilibriumSolution& sol) {
  DiagnosticsReport rep;
  const double c1 = sol.spec.phi1_bound.value_or(sol.value_law->mstar_bound.value_or(0.0));
  const double c2 = sol.spec.phi2_bound.value_or(sol.value_law->nstar_bound.value_or(0.0));
  double sup_m = 0.0, sup_n = 0.0;
  for (double v : sol.Mstar) sup_m = std::max(sup_m, std::abs(v));
  for (double v : sol.Nstar) sup_n = std::max(sup_n, std::abs(v));
  rep.checks.push_back({"sup_abs_mstar", sup_m, c1, sup_m <= c1});
  rep.checks.push_back({"sup_abs_nstar", sup_n, c2, sup_n <= c2});

  const std::size_t n = sol.players(), m = sol.paths(), steps = sol.steps();
  const double dt = sol.ensemble.grid().dt();
  std::vector<double> energy(m, 0.0);
  HamiltonianState st(n);
  std::vector<double> x(n);
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t k = 0; k < steps; ++k) {
      sol.ensemble.joint_state(p, k, x);
      sol.value_law->evaluate(k, sol.ensemble.grid().time(k), x, st);
      for (std::size_t l = 0; l < n; ++l) energy[p] += st.zm_at(0, l) * st.zm_at(0, l) * dt;
    }
  }
  const Estimate e = weighted_mean(energy);
  rep.checks.push_back({"zm_energy", e.value, c1 * c1 + 3.0 * e.se, e.value <= c1 * c1 + 3.0 * e.se});
  // N* is stored once per path and shared by every player.
  rep.checks.push_back({"nstar_player_spread", 0.0, 0.0, true});
  return rep;
}

std::vector<Estimate> martingale_residuals(const EquilibriumSolution& sol, MartingaleProcess which,
                                           std::size_t paths, std::uint64_t seed,
                                           std::size_t player) {
  const TimeGrid& grid = sol.ensemble.grid();
  const PathEnsemble e = simulate_paths(sol.spec, grid, sol.control_field(), paths, RngSpec{seed});
  const std::size_t n = e.players(), steps = e.steps();
  std::vector<double> terminal(paths);
  std::vector<double> x(n);
  for (std::size_t p = 0; p < paths; ++p) {
    e.joint_state(p, steps, x);
    terminal[p] = which == MartingaleProcess::kMstar
                      ? clamp_opt(sol.spec.phi1(x[player]), sol.value_law->mstar_bound)
                      : clamp_opt(sol.spec.phi2(LawView::summarize(x)), sol.value_law->nstar_bound);
  }
  std::vector<Estimate> out;
  HamiltonianState st(n);
  std::vector<double> r(paths);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t p = 0; p < paths; ++p) {
      e.joint_state(p, k, x);
      sol.value_law->evaluate(k, grid.time(k), x, st);
      const double fitted = which == MartingaleProcess::kMstar ? st.mstar[player] : st.nstar;
      r[p] = terminal[p] - fitted;
    }
    out.push_back(weighted_mean(r));
  }
  return out;
}

std::vector<std::vector<double>> nplayer_table(const EquilibriumSolution& sol) {
  std::vector<std::vector<double>> rows;
  const std::size_t n = sol.players(), m = sol.paths(), steps = sol.steps();
  const double c1 = sol.spec.phi1_bound.value_or(sol.value_law->mstar_bound.value_or(0.0));
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const double> y(sol.Y.data() + (k * n + i) * m, m);
      std::span<const double> ms(sol.Mstar.data() + (k * n + i) * m, m);
      double sup_m = 0.0;
      for (double v : ms) sup_m = std::max(sup_m, std::abs(v));
      const double res = k < sol.report.residual_trace.size() ? sol.report.residual_trace[k] : 0.0;
      rows.push_back({sol.ensemble.grid().time(k), static_cast<double>(i), mean_of(y),
                      mean_of(sol.ensemble.controls_at(k, i)), res, c1 - sup_m});
    }
  }
  return rows;
}

}  // namespace tigames
