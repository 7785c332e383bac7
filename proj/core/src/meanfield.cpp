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

#include "tigames/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tigames {

LawFlow::LawFlow(TimeGrid grid, std::size_t particles)
    : grid_(grid),
      p_(particles),
      states_((grid.steps + 1) * particles, 0.0),
      controls_(grid.steps * particles, 0.0) {
  grid_.validate();
  if (particles == 0) throw ModelError("law flow needs at least one particle");
}

LawFlow LawFlow::from_ensemble(const PathEnsemble& ens, std::size_t iteration) {
  if (ens.players() != 1) throw ModelError("law flow expects a single-player ensemble");
  LawFlow f(ens.grid(), ens.paths());
  for (std::size_t k = 0; k <= ens.steps(); ++k) {
    const auto s = ens.states_at(k, 0);
    std::copy(s.begin(), s.end(), f.states(k).begin());
    if (k < ens.steps()) {
      const auto a = ens.controls_at(k, 0);
      std::copy(a.begin(), a.end(), f.controls(k).begin());
    }
  }
  f.iteration = iteration;
  return f;
}

std::span<const double> LawFlow::states(std::size_t k) const {
  if (k > grid_.steps) throw ModelError("law flow step out of range");
  return {states_.data() + k * p_, p_};
}

std::span<double> LawFlow::states(std::size_t k) {
  if (k > grid_.steps) throw ModelError("law flow step out of range");
  return {states_.data() + k * p_, p_};
}

std::span<const double> LawFlow::controls(std::size_t k) const {
  if (k >= grid_.steps) throw ModelError("law flow has no controls at this step");
  return {controls_.data() + k * p_, p_};
}

std::span<double> LawFlow::controls(std::size_t k) {
  if (k >= grid_.steps) throw ModelError("law flow has no controls at this step");
  return {controls_.data() + k * p_, p_};
}

LawView LawFlow::view(std::size_t k) const {
  return LawView::summarize(states(k), k < grid_.steps ? controls(k) : std::span<const double>{});
}

double lawflow_distance(const LawFlow& a, const LawFlow& b) {
  if (a.grid().steps != b.grid().steps || a.grid().horizon != b.grid().horizon) {
    throw ModelError("law flows live on different grids");
  }
  if (a.particles() != b.particles()) throw ModelError("law flows have different cloud sizes");
  const std::size_t n = a.grid().steps;
  double worst = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    auto sa = a.states(k), sb = b.states(k);
    double d = wasserstein_1d_unsorted({sa.begin(), sa.end()}, {sb.begin(), sb.end()}, 2);
    if (k < n) {
      auto ca = a.controls(k), cb = b.controls(k);
      d += wasserstein_1d_unsorted({ca.begin(), ca.end()}, {cb.begin(), cb.end()}, 2);
    }
    worst = std::max(worst, d);
  }
  return worst;
}

double n_star(const GameSpec& spec, std::span<const double> terminal_states) {
  if (terminal_states.empty()) throw ModelError("n_star: empty cloud");
  return spec.phi2(LawView::summarize(terminal_states));
}

namespace {

// Views are summarised once per step so the provider is O(1) per call.
LawProvider provider_for(std::shared_ptr<const LawFlow> flow) {
  auto views = std::make_shared<std::vector<LawView>>();
  for (std::size_t k = 0; k <= flow->grid().steps; ++k) views->push_back(flow->view(k));
  return [flow, views](std::size_t k) { return views->at(k); };
}

LawFlow blend_flows(const LawFlow& fresh, const LawFlow& old, double theta) {
  LawFlow out(fresh.grid(), fresh.particles());
  auto mix = [theta](std::span<const double> a, std::span<const double> b, std::span<double> dst) {
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = theta * sa[j] + (1.0 - theta) * sb[j];
  };
  for (std::size_t k = 0; k <= fresh.grid().steps; ++k) {
    mix(fresh.states(k), old.states(k), out.states(k));
    if (k < fresh.grid().steps) mix(fresh.controls(k), old.controls(k), out.controls(k));
  }
  out.iteration = fresh.iteration;
  return out;
}

double sd_of(std::span<const double> v) {
  double m = 0.0, q = 0.0;
  for (double x : v) {
    m += x;
    q += x * x;
  }
  const double n = static_cast<double>(v.size());
  m /= n;
  return std::sqrt(std::max(0.0, q / n - m * m));
}

}  // namespace

ControlField meanfield_control_field(const GameSpec& spec, std::shared_ptr<const FeedbackLaw> law,
                                     std::shared_ptr<const LawFlow> flow) {
  if (!law || !flow) throw ModelError("mean-field control field needs a law and a flow");
  if (law->players() != 1) throw ModelError("mean-field feedback law must be single-player");
  LawProvider xi = provider_for(flow);
  auto state = std::make_shared<HamiltonianState>(1);
  const GameSpec* s = &spec;
  return [s, law, xi, state](std::size_t step, double t, std::span<const double> states,
                             std::span<double> controls) {
    law->evaluate(step, t, states, *state);
    const LawView view = xi(step);
    const double x = states[0], z = state->z_at(0, 0);
    if (s->lambda_max) {
      controls[0] = project_to_A(s->lambda_max(t, x, view, z, state->zm_at(0, 0), 0.0, 0.0), s->control_set);
      return;
    }
    double best = s->control_set.lower, value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s->control_set.grid_points; ++j) {
      const double a = s->control_set.point(j);
      const double h = s->running_f(t, x, view, a) + z * s->drift_b(t, x, view, a);
      if (h > value) {
        value = h;
        best = a;
      }
    }
    controls[0] = best;
  };
}

ControlField MeanFieldSolution::control_field() const { return meanfield_control_field(spec, law, flow); }

MeanFieldSolution solve_meanfield(const GameSpec& spec, const MeanFieldConfig& config,
                                  std::shared_ptr<const LawFlow> initial_flow) {
  spec.validate();
  config.grid.validate();
  config.basis.validate();
  if (spec.num_players != 1) throw ModelError("mean-field solver expects a single representative agent");
  if (config.particles < 1000) throw ModelError("mean-field solver needs at least 1000 particles");
  if (!(config.damping > 0.0 && config.damping <= 1.0)) throw ModelError("damping must be in (0, 1]");
  if (!(config.tol_w > 0.0)) throw ModelError("tol_w must be > 0");
  if (config.max_outer < 1) throw ModelError("max_outer must be >= 1");
  if (initial_flow && (initial_flow->particles() != config.particles ||
                       initial_flow->grid().steps != config.grid.steps)) {
    throw ModelError("initial flow does not match the configuration");
  }
  const std::size_t m = config.particles, n = config.grid.steps;
  const RngSpec rng{config.seed};

  auto backward = [&](const PathEnsemble& ens, const std::shared_ptr<const LawFlow>& xi) {
    BackwardOptions bo;
    bo.control_variate = config.control_variate;
    bo.law = provider_for(xi);
    bo.constant_nstar = n_star(spec, xi->states(n));
    bo.mstar_bound = spec.phi1_bound;
    if (!bo.mstar_bound) {
      double b = 0.0;
      for (double x : ens.states_at(n, 0)) b = std::max(b, std::abs(spec.phi1(x)));
      bo.mstar_bound = b;
    }
    return backward_sweep(spec, ens, config.basis, bo);
  };

  // Start-up: constant control against a Dirac flow (or the supplied one).
  std::shared_ptr<const LawFlow> xi = initial_flow;
  if (!xi) {
    auto dirac = std::make_shared<LawFlow>(config.grid, m);
    for (std::size_t k = 0; k <= n; ++k) {
      auto s = dirac->states(k);
      std::fill(s.begin(), s.end(), spec.initial_mean);
    }
    xi = dirac;
  }
  const double a0 = project_to_A(0.0, spec.control_set);
  ControlField constant = [a0](std::size_t, double, std::span<const double>, std::span<double> c) { c[0] = a0; };
  SimulationOptions so;
  so.law = provider_for(xi);
  PathEnsemble prev = simulate_paths(spec, config.grid, constant, m, rng, so);
  if (!initial_flow) xi = std::make_shared<const LawFlow>(LawFlow::from_ensemble(prev, 0));
  auto law = std::make_shared<const FeedbackLaw>(std::move(backward(prev, xi).law));

  MeanFieldReport report;
  for (std::size_t j = 1;; ++j) {
    so.law = provider_for(xi);
    PathEnsemble ens = simulate_paths(spec, config.grid, meanfield_control_field(spec, law, xi), m, rng, so);
    auto fresh = std::make_shared<LawFlow>(LawFlow::from_ensemble(ens, j));
    const double d = lawflow_distance(*fresh, *xi);
    fresh->distance_to_previous = d;
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto a = ens.controls_at(k, 0), b = prev.controls_at(k, 0);
      double s = 0.0;
      for (std::size_t p = 0; p < m; ++p) s += std::abs(a[p] - b[p]);
      change = std::max(change, s / static_cast<double>(m));
    }
    BackwardSweep sweep = backward(ens, xi);
    double y0 = 0.0;
    for (std::size_t p = 0; p < m; ++p) y0 += sweep.Y[p];
    y0 /= static_cast<double>(m);

    report.distance.push_back(d);
    report.alpha_sup_change.push_back(change);
    report.y0_mean.push_back(y0);
    report.tolerance = config.tol_w * sd_of(fresh->states(n));
    const bool converged = d < report.tolerance;
    if (converged || j >= config.max_outer) {
      report.iterations = j;
      report.converged = converged;
      report.message = converged ? "converged" : "outer iteration limit reached";
      const double nstar = n_star(spec, xi->states(n));
      return MeanFieldSolution{spec,
                               config,
                               std::move(ens),
                               std::make_shared<const FeedbackLaw>(std::move(sweep.law)),
                               fresh,
                               xi,
                               std::move(sweep.Y),
                               std::move(sweep.Mstar),
                               nstar,
                               report};
    }
    law = std::make_shared<const FeedbackLaw>(std::move(sweep.law));
    if (config.damping < 1.0) {
      xi = std::make_shared<const LawFlow>(blend_flows(*fresh, *xi, config.damping));
    } else {
      xi = fresh;
    }
    prev = std::move(ens);
  }
}

std::vector<double> meanfield_value_process(const MeanFieldSolution& sol, double u) {
  const std::size_t k = sol.ensemble.grid().require_index(u);
  const std::size_t m = sol.particles();
  const auto first = sol.Y.begin() + static_cast<std::ptrdiff_t>(k * m);
  return {first, first + static_cast<std::ptrdiff_t>(m)};
}

std::vector<std::vector<double>> meanfield_table(const MeanFieldSolution& sol) {
  std::vector<std::vector<double>> rows;
  const MeanFieldReport& r = sol.report;
  for (std::size_t j = 0; j < r.distance.size(); ++j) {
    rows.push_back({static_cast<double>(j + 1), r.distance[j], r.y0_mean[j], r.alpha_sup_change[j]});
  }
  return rows;
}

}  // namespace tigames
