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

#include "tigames/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace tigames {

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t players,
                           std::uint64_t seed, Measure measure)
    : grid_(grid), m_(paths), n_(players), seed_(seed), measure_(measure) {
  grid_.validate();
  if (paths == 0) throw SimulationError("ensemble needs at least one path");
  if (players == 0) throw SimulationError("ensemble needs at least one player");
  x_.assign((grid_.steps + 1) * n_ * m_, 0.0);
  dw_.assign(grid_.steps * n_ * m_, 0.0);
  a_.assign(grid_.steps * n_ * m_, 0.0);
  logw_.assign(m_, 0.0);
}

std::span<const double> PathEnsemble::states_at(std::size_t step, std::size_t player) const {
  return {x_.data() + idx(step, player, 0), m_};
}

std::span<const double> PathEnsemble::increments_at(std::size_t step, std::size_t player) const {
  return {dw_.data() + idx(step, player, 0), m_};
}

std::span<const double> PathEnsemble::controls_at(std::size_t step, std::size_t player) const {
  return {a_.data() + idx(step, player, 0), m_};
}

void PathEnsemble::joint_state(std::size_t path, std::size_t step, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(path, i, step);
}

namespace {

constexpr char kMagic[5] = {'T', 'I', 'G', 'E', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw SimulationError("truncated ensemble dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

double get_f64(std::istream& is) {
  const std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void PathEnsemble::write_binary(std::ostream& os) const {
  os.write(kMagic, 5);
  for (std::uint64_t v : {std::uint64_t{1}, std::uint64_t{1}, std::uint64_t{m_}, std::uint64_t{n_},
                          std::uint64_t{grid_.steps}, seed_,
                          std::uint64_t{measure_ == Measure::kTilted ? 1u : 0u}}) {
    put_u64(os, v);
  }
  put_f64(os, grid_.horizon);
  const std::size_t n = grid_.steps;
  for (std::size_t p = 0; p < m_; ++p)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k <= n; ++k) put_f64(os, x(p, i, k));
  for (std::size_t p = 0; p < m_; ++p)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n; ++k) put_f64(os, dw(p, i, k));
  for (std::size_t p = 0; p < m_; ++p)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n; ++k) put_f64(os, a(p, i, k));
  for (std::size_t p = 0; p < m_; ++p) put_f64(os, logw_[p]);
}

PathEnsemble PathEnsemble::read_binary(std::istream& is) {
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
    throw SimulationError("not a TIGE1 ensemble dump");
  }
  const std::uint64_t sd = get_u64(is), nd = get_u64(is);
  if (sd != 1 || nd != 1) throw SimulationError("unsupported ensemble dimensions");
  const std::uint64_t m = get_u64(is), n_players = get_u64(is), steps = get_u64(is);
  const std::uint64_t seed = get_u64(is), tilted = get_u64(is);
  TimeGrid grid;
  grid.steps = steps;
  grid.horizon = get_f64(is);
  PathEnsemble e(grid, m, n_players, seed, tilted ? Measure::kTilted : Measure::kReference);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n_players; ++i)
      for (std::size_t k = 0; k <= steps; ++k) e.x(p, i, k) = get_f64(is);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n_players; ++i)
      for (std::size_t k = 0; k < steps; ++k) e.dw(p, i, k) = get_f64(is);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t i = 0; i < n_players; ++i)
      for (std::size_t k = 0; k < steps; ++k) e.a(p, i, k) = get_f64(is);
  for (std::size_t p = 0; p < m; ++p) e.log_weight(p) = get_f64(is);
  return e;
}

bool PathEnsemble::bitwise_equal(const PathEnsemble& o) const {
  auto same = [](const std::vector<double>& u, const std::vector<double>& v) {
    return u.size() == v.size() &&
           (u.empty() || std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0);
  };
  return m_ == o.m_ && n_ == o.n_ && grid_.steps == o.grid_.steps &&
         grid_.horizon == o.grid_.horizon && seed_ == o.seed_ && measure_ == o.measure_ &&
         same(x_, o.x_) && same(dw_, o.dw_) && same(a_, o.a_) && same(logw_, o.logw_);
}

PathEnsemble simulate_from(const GameSpec& spec, const TimeGrid& grid, const ControlField& field,
                           std::size_t num_paths, RngSpec rng, std::size_t start_step,
                           std::span<const double> start_states, const SimulationOptions& options,
                           const PathEnsemble* source, std::size_t source_path) {
  spec.validate();
  grid.validate();
  const std::size_t n_players = spec.num_players;
  if (start_step > grid.steps) throw SimulationError("start step beyond horizon");
  if (!start_states.empty() && start_states.size() != n_players) {
    throw SimulationError("start state has wrong size");
  }
  PathEnsemble ens(grid, num_paths, n_players, rng.seed, options.measure);
  const double dt = grid.dt();
  const double sqdt = std::sqrt(dt);
  const ControlSet& cs = spec.control_set;
  const double slack = 1e-12 * std::max(1.0, cs.upper - cs.lower);
  const bool tilted = options.measure == Measure::kTilted;

  std::vector<double> states(n_players), controls(n_players);
  for (std::size_t p = 0; p < num_paths; ++p) {
    for (std::size_t i = 0; i < n_players; ++i) {
      if (start_states.empty()) {
        states[i] = spec.initial_mean +
                    (spec.initial_stddev > 0.0
                         ? spec.initial_stddev * philox_normal(rng.seed, p, static_cast<std::uint32_t>(i), 0)
                         : 0.0);
      } else {
        states[i] = start_states[i];
      }
    }
    for (std::size_t k = 0; k < start_step; ++k) {
      for (std::size_t i = 0; i < n_players; ++i) {
        if (source) {
          ens.x(p, i, k) = source->x(source_path, i, k);
          ens.dw(p, i, k) = source->dw(source_path, i, k);
          ens.a(p, i, k) = source->a(source_path, i, k);
        } else {
          ens.x(p, i, k) = states[i];
        }
      }
    }
    double logw = 0.0;
    for (std::size_t k = start_step; k < grid.steps; ++k) {
      const double t = grid.time(k);
      for (std::size_t i = 0; i < n_players; ++i) ens.x(p, i, k) = states[i];
      field(k, t, states, controls);
      const LawView law = options.law ? options.law(k) : LawView::summarize(states, controls);
      for (std::size_t i = 0; i < n_players; ++i) {
        const double a = controls[i];
        if (!(a >= cs.lower - slack && a <= cs.upper + slack)) {
          throw SimulationError("control outside the control set on path " + std::to_string(p));
        }
        const double x = states[i];
        const double b = spec.drift_b(t, x, law, a);
        const double s = spec.sigma(t, x);
        const double dw = sqdt * philox_normal(rng.seed, p, static_cast<std::uint32_t>(i), k + 1);
        ens.dw(p, i, k) = dw;
        ens.a(p, i, k) = a;
        if (tilted) {
          states[i] = x + s * (b * dt + dw);
        } else {
          states[i] = x + s * dw;
          logw += b * dw - 0.5 * b * b * dt;
        }
      }
      for (std::size_t i = 0; i < n_players; ++i) {
        if (!std::isfinite(states[i]) || std::abs(states[i]) > options.explosion_bound) {
          throw SimulationError("state exploded on path " + std::to_string(p) + " at step " +
                                std::to_string(k + 1));
        }
      }
    }
    for (std::size_t i = 0; i < n_players; ++i) ens.x(p, i, grid.steps) = states[i];
    ens.log_weight(p) = logw;
  }
  return ens;
}

PathEnsemble simulate_paths(const GameSpec& spec, const TimeGrid& grid, const ControlField& field,
                            std::size_t num_paths, RngSpec rng, const SimulationOptions& options) {
  return simulate_from(spec, grid, field, num_paths, rng, 0, {}, options);
}

double girsanov_log_weight(std::span<const double> b, std::span<const double> dw, double dt) {
  if (b.size() != dw.size()) throw SimulationError("girsanov_log_weight: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * dw[k] - 0.5 * b[k] * b[k] * dt;
  return s;
}

PathEnsemble conditional_subensemble(const GameSpec& spec, const PathEnsemble& ens,
                                     const ControlField& field, double u, std::size_t pivot,
                                     std::size_t num_paths, const SimulationOptions& options) {
  const std::size_t k = ens.grid().require_index(u);
  if (pivot >= ens.paths()) throw SimulationError("pivot path out of range");
  std::vector<double> start(ens.players());
  ens.joint_state(pivot, k, start);
  const std::uint64_t seed = mix_seed(ens.seed(), pivot * (ens.steps() + 1) + k);
  return simulate_from(spec, ens.grid(), field, num_paths, RngSpec{seed}, k, start, options, &ens,
                       pivot);
}

Estimate weighted_mean(std::span<const double> values, std::span<const double> weights) {
  const std::size_t m = values.size();
  if (m == 0) return {};
  if (!weights.empty() && weights.size() != m) throw SimulationError("weights have wrong size");
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += (weights.empty() ? 1.0 : weights[j]) * values[j];
  const double md = static_cast<double>(m);
  const double mean = s / md;
  if (m < 2) return {mean, 0.0};
  // Leave-one-out means of a linear statistic.
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double loo = (s - (weights.empty() ? 1.0 : weights[j]) * values[j]) / (md - 1.0);
    acc += (loo - mean) * (loo - mean);
  }
  return {mean, std::sqrt((md - 1.0) / md * acc)};
}

Estimate moment_estimate(const PathEnsemble& ens, Statistic statistic, std::size_t player,
                         std::size_t step) {
  if (player >= ens.players() || step > ens.steps()) {
    throw SimulationError("moment_estimate: index out of range");
  }
  const auto xs = ens.states_at(step, player);
  const std::size_t m = xs.size();
  std::vector<double> w;
  if (ens.measure() == Measure::kReference) {
    w.resize(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = std::exp(ens.log_weight(j));
  }
  auto wt = [&](std::size_t j) { return w.empty() ? 1.0 : w[j]; };
  const double md = static_cast<double>(m);

  switch (statistic) {
    case Statistic::kMean:
      return weighted_mean(xs, w);
    case Statistic::kVariance: {
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        s1 += wt(j) * xs[j];
        s2 += wt(j) * xs[j] * xs[j];
      }
      const double var = s2 / md - (s1 / md) * (s1 / md);
      if (m < 2) return {var, 0.0};
      std::vector<double> loo(m);
      double mean_loo = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double a = (s1 - wt(j) * xs[j]) / (md - 1.0);
        const double b = (s2 - wt(j) * xs[j] * xs[j]) / (md - 1.0);
        loo[j] = b - a * a;
        mean_loo += loo[j];
      }
      mean_loo /= md;
      double acc = 0.0;
      for (double v : loo) acc += (v - mean_loo) * (v - mean_loo);
      return {var, std::sqrt((md - 1.0) / md * acc)};
    }
    case Statistic::kSupNorm: {
      double top = 0.0, second = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double v = std::abs(xs[j]);
        if (v > top) {
          second = top;
          top = v;
        } else if (v > second) {
          second = v;
        }
      }
      if (m < 2) return {top, 0.0};
      // Only the arg-max path changes its leave-one-out value.
      const double mean_loo = ((md - 1.0) * top + second) / md;
      const double acc = (md - 1.0) * (top - mean_loo) * (top - mean_loo) +
                         (second - mean_loo) * (second - mean_loo);
      return {top, std::sqrt((md - 1.0) / md * acc)};
    }
  }
  return {};
}

}  // namespace tigames
