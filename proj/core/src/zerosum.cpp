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

#include "tigames/zerosum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tigames/rng.hpp"

namespace tigames {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridSaddle {
  SaddlePoint point;
  double max_step = 0.0;  // largest change of the objective between grid neighbours
};

// F(i, j) with i indexing the minimiser and j the maximiser.
template <class F>
GridSaddle grid_saddle(const ControlSet& cs, F&& objective, std::vector<double>& buf, bool with_step = true) {
  const std::size_t g = cs.grid_points;
  buf.resize(g * g);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) buf[i * g + j] = objective(cs.point(i), cs.point(j));
  }
  GridSaddle out;
  double upper = kInf, lower = -kInf;
  std::size_t ia = 0, jat = 0;
  for (std::size_t i = 0; i < g; ++i) {
    double sup = -kInf;
    for (std::size_t j = 0; j < g; ++j) sup = std::max(sup, buf[i * g + j]);
    if (sup < upper) {
      upper = sup;
      ia = i;
    }
  }
  for (std::size_t j = 0; j < g; ++j) {
    double inf = kInf;
    for (std::size_t i = 0; i < g; ++i) inf = std::min(inf, buf[i * g + j]);
    if (inf > lower) {
      lower = inf;
      jat = j;
    }
  }
  for (std::size_t i = 0; with_step && i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i + 1 < g) out.max_step = std::max(out.max_step, std::abs(buf[(i + 1) * g + j] - buf[i * g + j]));
      if (j + 1 < g) out.max_step = std::max(out.max_step, std::abs(buf[i * g + j + 1] - buf[i * g + j]));
    }
  }
  out.point = {std::max(0.0, upper - lower), upper, lower, cs.point(ia), cs.point(jat)};
  return out;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void ZeroSumSpec::validate() const {
  if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
  if (!sigma || !drift_b || !running_f || !terminal_g || !G || !dG || !d2G || !phi) {
    throw ModelError("zero-sum spec is missing a required coefficient");
  }
  control_set.validate();
}

SaddlePoint isaacs_gap(const ZeroSumSpec& spec, double t, double x, double z) {
  std::vector<double> buf;
  return grid_saddle(spec.control_set,
                     [&](double a, double at) {
                       return spec.running_f(t, x, a, at) + z * spec.drift_b(t, x, a, at);
                     },
                     buf)
      .point;
}

double isaacs_tolerance(const ZeroSumSpec& spec, double t, double x, double z) {
  std::vector<double> buf;
  return 2.0 * grid_saddle(spec.control_set,
                           [&](double a, double at) {
                             return spec.running_f(t, x, a, at) + z * spec.drift_b(t, x, a, at);
                           },
                           buf)
                   .max_step;
}

double ZeroSumSolution::y0() const {
  double s = 0.0;
  for (std::size_t p = 0; p < paths(); ++p) s += Y[p];
  return s / static_cast<double>(paths());
}

double ZeroSumSolution::z0() const {
  double s = 0.0;
  for (std::size_t p = 0; p < paths(); ++p) s += Z[p];
  return s / static_cast<double>(paths());
}

ZeroSumSolution solve_zero_sum(const ZeroSumSpec& spec, const ZeroSumConfig& config, ZeroSumSide side) {
  spec.validate();
  config.grid.validate();
  config.basis.validate();
  const std::size_t m = config.paths, n = config.grid.steps, nb = config.basis.size(false);
  if (m <= nb) throw ModelError("zero-sum solve needs more paths than basis functions");
  const double dt = config.grid.dt(), sdt = std::sqrt(dt);
  const double sign = side == ZeroSumSide::kMaximiser ? 1.0 : -1.0;

  ZeroSumSolution sol;
  sol.spec = spec;
  sol.config = config;
  sol.side = side;
  sol.X.resize((n + 1) * m);
  sol.Y.resize((n + 1) * m);
  sol.Mstar.resize((n + 1) * m);
  sol.Z.resize(n * m);
  sol.Zm.resize(n * m);
  sol.a.resize(n * m);
  sol.at.resize(n * m);
  sol.z_coefficients.resize(n);

  std::vector<double> dw(n * m);
  for (std::size_t p = 0; p < m; ++p) {
    double x = spec.initial_state;
    sol.X[p] = x;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = sdt * philox_normal(config.seed, p, 0, k + 1);
      dw[k * m + p] = w;
      x += spec.sigma(config.grid.time(k), x) * w;
      sol.X[(k + 1) * m + p] = x;
    }
  }

  for (std::size_t p = 0; p < m; ++p) {
    const double x = sol.X[n * m + p];
    const double ms = spec.phi(x);
    sol.Mstar[n * m + p] = ms;
    sol.Y[n * m + p] = sign * (spec.terminal_g(x) + spec.G(ms));
  }
  // Pathwise payoff estimator of Y_0; its spread is the Monte Carlo error.
  std::vector<double> payoff(sol.Y.begin() + static_cast<std::ptrdiff_t>(n * m), sol.Y.end());

  std::vector<double> design(m * nb), target(m), fitted(m), buf;
  std::vector<double> step0_z(m);
  for (std::size_t k = n; k-- > 0;) {
    const double t = config.grid.time(k);
    for (std::size_t p = 0; p < m; ++p) {
      config.basis.features(sol.X[k * m + p], 0.0, false, std::span<double>(design.data() + p * nb, nb));
    }
    LeastSquaresProjector proj(design, m, nb, config.basis.ridge);
    std::span<const double> ynext(sol.Y.data() + (k + 1) * m, m);
    std::span<const double> mnext(sol.Mstar.data() + (k + 1) * m, m);
    std::span<const double> w(dw.data() + k * m, m);
    std::span<double> z(sol.Z.data() + k * m, m), zm(sol.Zm.data() + k * m, m);

    proj.fit(ynext, fitted);
    for (std::size_t p = 0; p < m; ++p) target[p] = (ynext[p] - fitted[p]) * w[p] / dt;
    if (k == 0) step0_z = target;
    sol.z_coefficients[k] = proj.fit_with_coefficients(target, z);
    proj.fit(mnext, fitted);
    for (std::size_t p = 0; p < m; ++p) target[p] = (mnext[p] - fitted[p]) * w[p] / dt;
    proj.fit(target, zm);

    for (std::size_t p = 0; p < m; ++p) target[p] = mnext[p] - zm[p] * w[p];
    std::span<double> mk(sol.Mstar.data() + k * m, m);
    proj.fit(target, mk);
    for (std::size_t p = 0; p < m; ++p) target[p] = ynext[p] - z[p] * w[p];
    std::span<double> yk(sol.Y.data() + k * m, m);
    proj.fit(target, yk);

    const std::size_t stride = config.isaacs_sample > 0 ? std::max<std::size_t>(1, m / config.isaacs_sample) : 0;
    for (std::size_t p = 0; p < m; ++p) {
      const double x = sol.X[k * m + p];
      const bool sampled = stride > 0 && p % stride == 0;
      // The minimiser side maximises -J over `a` against `at`.
      GridSaddle s = grid_saddle(
          spec.control_set,
          [&](double own_or_min, double other_or_max) {
            if (side == ZeroSumSide::kMaximiser) {
              return spec.running_f(t, x, own_or_min, other_or_max) +
                     z[p] * spec.drift_b(t, x, own_or_min, other_or_max);
            }
            // Rows index `at` (minimising -J), columns index `a`.
            return -spec.running_f(t, x, other_or_max, own_or_min) +
                   z[p] * spec.drift_b(t, x, other_or_max, own_or_min);
          },
          buf, sampled);
      const double a = side == ZeroSumSide::kMaximiser ? s.point.a : s.point.at;
      const double at = side == ZeroSumSide::kMaximiser ? s.point.at : s.point.a;
      sol.a[k * m + p] = a;
      sol.at[k * m + p] = at;
      sol.max_gap = std::max(sol.max_gap, s.point.gap);
      if (sampled && s.point.gap > 2.0 * s.max_step + 1e-12) {
        throw IsaacsViolation("Isaacs condition fails on the control grid", t, x, z[p], s.point.gap,
                              2.0 * s.max_step);
      }
      const double b = spec.drift_b(t, x, a, at);
      mk[p] += dt * zm[p] * b;
      const double driver = s.point.upper - 0.5 * sign * spec.d2G(mk[p]) * zm[p] * zm[p];
      payoff[p] += dt * driver;
      yk[p] += dt * driver;
    }
  }
  sol.y0_se = sample_sd(payoff) / std::sqrt(static_cast<double>(m));
  sol.z0_se = sample_sd(step0_z) / std::sqrt(static_cast<double>(m));
  return sol;
}

AntisymmetryReport antisymmetry_check(const ZeroSumSolution& first, const ZeroSumSolution& second) {
  AntisymmetryReport r;
  r.y_defect = std::abs(first.y0() + second.y0());
  r.z_defect = std::abs(first.z0() + second.z0());
  r.y_se = std::hypot(first.y0_se, second.y0_se);
  r.z_se = std::hypot(first.z0_se, second.z0_se);
  r.pass = r.y_defect <= 3.0 * r.y_se && r.z_defect <= 3.0 * r.z_se;
  return r;
}

Estimate zero_sum_deviation_gap(const ZeroSumSolution& sol, double deviation, std::size_t window_steps,
                                std::size_t paths, std::uint64_t seed) {
  const ZeroSumSpec& spec = sol.spec;
  const TimeGrid& grid = sol.config.grid;
  const std::size_t n = grid.steps, nb = sol.config.basis.size(false);
  if (window_steps > n) throw ModelError("deviation window extends beyond the horizon");
  if (paths < 2) throw ModelError("deviation gap needs at least 2 paths");
  const double dt = grid.dt(), sdt = std::sqrt(dt);
  const double orient = sol.side == ZeroSumSide::kMaximiser ? 1.0 : -1.0;
  std::vector<double> feats(nb), buf;

  auto run = [&](bool deviate, std::vector<double>& payoff, std::vector<double>& phi) {
    payoff.assign(paths, 0.0);
    phi.assign(paths, 0.0);
    for (std::size_t p = 0; p < paths; ++p) {
      double x = spec.initial_state, acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = grid.time(k);
        sol.config.basis.features(x, 0.0, false, feats);
        // The fitted Z belongs to the solved side; the maximiser's Z is orient * Z.
        const double z = orient * evaluate(sol.z_coefficients[k], feats);
        const SaddlePoint s = grid_saddle(spec.control_set,
                                          [&](double a, double at) {
                                            return spec.running_f(t, x, a, at) + z * spec.drift_b(t, x, a, at);
                                          },
                                          buf)
                                  .point;
        const double at = deviate && k < window_steps ? deviation : s.at;
        const double b = spec.drift_b(t, x, s.a, at);
        acc += spec.running_f(t, x, s.a, at) * dt;
        x += spec.sigma(t, x) * (b * dt + sdt * philox_normal(seed, p, 0, k + 1));
      }
      payoff[p] = acc + spec.terminal_g(x);
      phi[p] = spec.phi(x);
    }
  };

  std::vector<double> j0, p0, j1, p1;
  run(false, j0, p0);
  run(true, j1, p1);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    m0 += p0[p];
    m1 += p1[p];
  }
  m0 /= static_cast<double>(paths);
  m1 /= static_cast<double>(paths);
  const double slope = spec.dG(0.5 * (m0 + m1));
  std::vector<double> d(paths);
  for (std::size_t p = 0; p < paths; ++p) d[p] = (j0[p] - j1[p]) + slope * (p0[p] - p1[p]);
  Estimate e = weighted_mean(d);
  e.value += spec.G(m0) - spec.G(m1) - slope * (m0 - m1);
  return e;
}

std::vector<std::vector<double>> zero_sum_table(const ZeroSumSolution& first, const ZeroSumSolution& second) {
  if (first.config.grid.steps != second.config.grid.steps) throw ModelError("zero-sum grids differ");
  std::vector<std::vector<double>> rows;
  const std::size_t n = first.config.grid.steps;
  auto mean_at = [](const ZeroSumSolution& s, std::size_t k) {
    double acc = 0.0;
    for (std::size_t p = 0; p < s.paths(); ++p) acc += s.y(p, k);
    return acc / static_cast<double>(s.paths());
  };
  const double gap = std::max(first.max_gap, second.max_gap);
  for (std::size_t k = 0; k <= n; ++k) {
    const double y1 = mean_at(first, k), y2 = mean_at(second, k);
    rows.push_back({first.config.grid.time(k), y1, gap, std::abs(y1 + y2)});
  }
  return rows;
}

}  // namespace tigames
