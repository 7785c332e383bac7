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

#include "tigames/convergence.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <limits>

#include "tigames/presets.hpp"
#include "tigames/rng.hpp"

namespace tigames {

RNSchedule::Flags RNSchedule::verify(std::span<const std::size_t> ns) const {
  Flags f;
  if (ns.empty()) return f;
  std::vector<double> nr2, n2r2;
  for (std::size_t n : ns) {
    const double r2 = (*this)(n) * (*this)(n), nd = static_cast<double>(n);
    nr2.push_back(nd * r2);
    n2r2.push_back(nd * nd * r2);
  }
  const bool all_zero = std::all_of(nr2.begin(), nr2.end(), [](double v) { return v == 0.0; });
  f.nr2_vanishing = all_zero || (nr2.back() <= 0.5 * nr2.front() &&
                                 std::is_sorted(nr2.rbegin(), nr2.rend()));
  const auto [lo, hi] = std::minmax_element(n2r2.begin(), n2r2.end());
  f.n2r2_bounded = all_zero || (std::isfinite(*hi) && *hi <= 10.0 * std::max(*lo, 1e-300));
  return f;
}

RNSchedule RNSchedule::zero() { return RNSchedule{[](std::size_t) { return 0.0; }}; }

RNSchedule RNSchedule::inverse(double c) {
  return RNSchedule{[c](std::size_t n) { return std::abs(c) / static_cast<double>(n); }};
}

double eta_statistic(const RNSchedule& r, std::span<const double> snapshot, double p_bar, double c) {
  if (snapshot.empty()) throw ModelError("eta_statistic: empty snapshot");
  if (!(p_bar >= 1.0)) throw ModelError("eta_statistic: p_bar must be >= 1");
  const std::size_t n = snapshot.size();
  const double rn = r(n);
  if (rn == 0.0) return 0.0;
  const double nd = static_cast<double>(n), r2 = rn * rn;
  double m2 = 0.0, mp = 0.0;
  for (double x : snapshot) {
    m2 += x * x;
    mp += std::pow(std::abs(x), 2.0 * p_bar);
  }
  m2 /= nd;
  mp /= nd;
  const double x1 = std::abs(snapshot[0]);
  return r2 * (1.0 + x1 * x1 + m2) + c * nd * r2 * (1.0 + std::pow(x1, 2.0 * p_bar) + mp) +
         nd * r2 * r2 * (1.0 + m2) * (1.0 + nd);
}

double gamma_statistic(const PathEnsemble& reference, const PathEnsemble& sample, std::size_t n,
                       double u, std::size_t blocks) {
  if (reference.players() != 1 || sample.players() != 1) {
    throw ModelError("gamma_statistic expects single-player ensembles");
  }
  if (n == 0 || blocks == 0) throw ModelError("gamma_statistic needs N >= 1 and blocks >= 1");
  if (reference.paths() < n) throw ModelError("reference cloud smaller than N");
  if (sample.paths() < n * blocks) throw ModelError("sample holds fewer than blocks * N particles");
  if (reference.steps() != sample.steps()) throw ModelError("ensembles live on different grids");
  const std::size_t k0 = reference.grid().require_index(u), steps = reference.steps();

  std::vector<std::vector<double>> ref_x, ref_a;
  for (std::size_t k = k0; k <= steps; ++k) {
    auto s = reference.states_at(k, 0);
    ref_x.emplace_back(s.begin(), s.end());
    std::sort(ref_x.back().begin(), ref_x.back().end());
    if (k < steps) {
      auto a = reference.controls_at(k, 0);
      ref_a.emplace_back(a.begin(), a.end());
      std::sort(ref_a.back().begin(), ref_a.back().end());
    }
  }
  double total = 0.0;
  std::vector<double> cloud(n);
  for (std::size_t b = 0; b < blocks; ++b) {
    double worst = 0.0;
    for (std::size_t k = k0; k <= steps; ++k) {
      auto s = sample.states_at(k, 0).subspan(b * n, n);
      cloud.assign(s.begin(), s.end());
      std::sort(cloud.begin(), cloud.end());
      double w = std::pow(wasserstein_1d(cloud, ref_x[k - k0], 2), 2);
      if (k < steps) {
        auto a = sample.controls_at(k, 0).subspan(b * n, n);
        cloud.assign(a.begin(), a.end());
        std::sort(cloud.begin(), cloud.end());
        w += std::pow(wasserstein_1d(cloud, ref_a[k - k0], 2), 2);
      }
      worst = std::max(worst, w);
    }
    total += worst;
  }
  return total / static_cast<double>(blocks);
}

RateFit estimate_rate(std::span<const double> errors, std::span<const std::size_t> ns) {
  if (errors.size() != ns.size()) throw ModelError("errors and N list differ in length");
  RateFit fit;
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    if (!(errors[j] > 0.0) || ns[j] == 0) {
      fit.warnings.push_back("dropped nonpositive error at N=" + std::to_string(ns[j]));
      continue;
    }
    lx.push_back(std::log(static_cast<double>(ns[j])));
    ly.push_back(std::log(errors[j]));
  }
  fit.used = lx.size();
  if (fit.used < 3) throw ModelError("estimate_rate needs at least 3 positive errors");
  const double n = static_cast<double>(fit.used);
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    mx += lx[j];
    my += ly[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxx += (lx[j] - mx) * (lx[j] - mx);
    sxy += (lx[j] - mx) * (ly[j] - my);
  }
  if (!(sxx > 0.0)) throw ModelError("estimate_rate needs at least two distinct N");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    const double e = ly[j] - fit.intercept - fit.slope * lx[j];
    rss += e * e;
  }
  const double se = std::sqrt(rss / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.slope - q * se;
  fit.ci_high = fit.slope + q * se;
  return fit;
}

double meanfield_reference_value(const LQParams& p, double x0, double u, double x, std::size_t panels) {
  const double e = std::exp(p.sigma * p.k * (u - p.horizon));
  const double m_u = rep_meanfield_mean(p, 0.0, x0, u);
  return e * x + rep_meanfield_eta(p, u, m_u, ExponentReading::kIntegrationVariable, panels);
}

namespace {

double mean_field_alpha(const LQParams& p, double t) {
  return std::clamp(p.sigma * std::exp(p.sigma * p.k * (t - p.horizon)), -p.a_bar, p.a_bar);
}

// Sorted standard normal draws used to build Gaussian clouds.
std::vector<double> sorted_normals(std::uint64_t seed, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t j = 0; j < count; ++j) v[j] = philox_normal(seed, j, 0, 0);
  std::sort(v.begin(), v.end());
  return v;
}

SweepRow closed_form_row(const SweepConfig& cfg, std::size_t n, const std::vector<double>& ref_std) {
  LQParams p = cfg.params;
  p.players = n;
  SweepRow row;
  row.n = n;
  const std::vector<double> x(n, cfg.x0);
  const RepNPlayer np = rep_nplayer(p, 0.0, x, cfg.panels);
  row.value_err_u0 = std::abs(np.v[0] - meanfield_reference_value(p, cfg.x0, 0.0, cfg.x0, cfg.panels));

  // Under i.i.d. mean-field states at u the error is B (mean(x) - m_u) + d_eta.
  const double u = cfg.u_mid;
  const double e_u = std::exp(p.sigma * p.k * (u - p.horizon));
  const double slope = p.kappa1 * (1.0 - e_u) / (p.sigma * p.k);
  const double d_eta = rep_eta(p, u, EtaKind::kValue, cfg.panels) -
                       rep_meanfield_eta(p, u, 0.0, ExponentReading::kIntegrationVariable, cfg.panels);
  const double var_u = rep_meanfield_variance(p, 0.0, u);
  row.value_err_umid = std::sqrt(d_eta * d_eta + slope * slope * var_u / static_cast<double>(n));

  row.control_w2_int = simpson(
      [&](double t) {
        const double d = std::clamp(rep_nplayer_control_raw(p, t), -p.a_bar, p.a_bar) - mean_field_alpha(p, t);
        return d * d;
      },
      0.0, p.horizon, cfg.panels);

  // Gaussian marginals: W2^2 between clouds scales with the variance, so the
  // sup over t sits at the terminal time.  Controls are deterministic.
  if (cfg.gamma_blocks > 0 && ref_std.size() >= n) {
    const double v_max = rep_meanfield_variance(p, 0.0, p.horizon);
    double acc = 0.0;
    std::vector<double> cloud(n);
    for (std::size_t b = 0; b < cfg.gamma_blocks; ++b) {
      for (std::size_t j = 0; j < n; ++j) {
        cloud[j] = philox_normal(mix_seed(cfg.seed, n), b * n + j, 1, 0);
      }
      std::sort(cloud.begin(), cloud.end());
      acc += v_max * std::pow(wasserstein_1d(cloud, ref_std, 2), 2);
    }
    row.gamma = acc / static_cast<double>(cfg.gamma_blocks);
  }
  row.eta = eta_statistic(RNSchedule::inverse(p.kappa2), x, cfg.p_bar, cfg.eta_c);
  return row;
}

SweepRow numerical_row(const SweepConfig& cfg, std::size_t n, const std::vector<double>& ref_std) {
  LQParams p = cfg.params;
  p.players = n;
  GameSpec spec = rep_nplayer_game(p);
  spec.initial_mean = cfg.x0;
  NPlayerConfig sc = cfg.solver;
  sc.seed = mix_seed(cfg.seed, n);
  const EquilibriumSolution sol = solve_nplayer(spec, sc);
  SweepRow row;
  row.n = n;
  const std::size_t m = sol.paths(), steps = sol.steps();
  const TimeGrid& grid = sol.ensemble.grid();
  if (!sol.report.converged) {
    row.ok = false;
    row.message = sol.report.message;
  }
  double y0 = 0.0;
  for (std::size_t q = 0; q < m; ++q) y0 += sol.y(q, 0, 0);
  y0 /= static_cast<double>(m);
  row.value_err_u0 = std::abs(y0 - meanfield_reference_value(p, cfg.x0, 0.0, cfg.x0, cfg.panels));

  const std::size_t ku = grid.index_of(cfg.u_mid).value_or(steps / 2);
  const double u = grid.time(ku);
  const double e_u = std::exp(p.sigma * p.k * (u - p.horizon));
  const double m_u = rep_meanfield_mean(p, 0.0, cfg.x0, u);
  const double eta_u = rep_meanfield_eta(p, u, m_u, ExponentReading::kIntegrationVariable, cfg.panels);
  double ss = 0.0, w2 = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    const double d = sol.y(q, 0, ku) - (e_u * sol.ensemble.x(q, 0, ku) + eta_u);
    ss += d * d;
  }
  row.value_err_umid = std::sqrt(ss / static_cast<double>(m));
  for (std::size_t k = 0; k < steps; ++k) {
    const double a_mf = mean_field_alpha(p, grid.time(k));
    double acc = 0.0;
    for (double a : sol.ensemble.controls_at(k, 0)) acc += (a - a_mf) * (a - a_mf);
    w2 += acc / static_cast<double>(m) * grid.dt();
  }
  row.control_w2_int = w2;

  if (cfg.gamma_blocks > 0) {
    const std::size_t blocks = std::min(cfg.gamma_blocks, m);
    std::vector<double> cloud(n), ref(ref_std.size()), x(n);
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t path = b * m / blocks;
      double worst = 0.0;
      for (std::size_t k = 0; k <= steps; ++k) {
        const double t = grid.time(k);
        const double mu = rep_meanfield_mean(p, 0.0, cfg.x0, t), sd = std::sqrt(rep_meanfield_variance(p, 0.0, t));
        for (std::size_t j = 0; j < ref.size(); ++j) ref[j] = mu + sd * ref_std[j];
        sol.ensemble.joint_state(path, k, cloud);
        std::sort(cloud.begin(), cloud.end());
        double w = std::pow(wasserstein_1d(cloud, ref, 2), 2);
        if (k < steps) {
          const double a_mf = mean_field_alpha(p, t);
          for (std::size_t i = 0; i < n; ++i) w += (sol.ensemble.a(path, i, k) - a_mf) * (sol.ensemble.a(path, i, k) - a_mf) / static_cast<double>(n);
        }
        worst = std::max(worst, w);
      }
      acc += worst;
    }
    row.gamma = acc / static_cast<double>(blocks);
  }
  std::vector<double> snap(n);
  sol.ensemble.joint_state(0, ku, snap);
  row.eta = eta_statistic(RNSchedule::inverse(p.kappa2), snap, cfg.p_bar, cfg.eta_c);
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.params.validate();
  if (config.ns.empty()) throw ModelError("sweep needs at least one N");
  std::vector<std::size_t> ns = config.ns;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  const std::vector<double> ref_std = sorted_normals(config.seed, config.reference_particles);

  SweepResult out;
  for (std::size_t n : ns) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    try {
      row = config.mode == SweepMode::kClosedForm ? closed_form_row(config, n, ref_std)
                                                  : numerical_row(config, n, ref_std);
    } catch (const std::exception& e) {
      row.n = n;
      row.ok = false;
      row.message = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.rows.push_back(row);
  }

  std::vector<double> errs;
  std::vector<std::size_t> used;
  for (const SweepRow& r : out.rows) {
    if (r.ok || config.mode == SweepMode::kNumerical) {
      errs.push_back(r.value_err_u0);
      used.push_back(r.n);
    }
  }
  const std::size_t positive = static_cast<std::size_t>(
      std::count_if(errs.begin(), errs.end(), [](double e) { return e > 1e-14; }));
  if (positive >= 3) {
    out.rate = estimate_rate(errs, used);
    out.rate_available = true;
  } else {
    out.note = "slope skipped: fewer than three nonzero errors";
  }
  out.bound_constant = fit_convergence_constant(errs, used);
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (errs[j] > rep_convergence_bound(out.bound_constant, used[j]) * (1.0 + 1e-12)) out.bound_holds = false;
  }
  return out;
}

std::vector<std::vector<double>> sweep_table(const SweepResult& r) {
  std::vector<std::vector<double>> rows;
  for (const SweepRow& s : r.rows) {
    rows.push_back({static_cast<double>(s.n), s.value_err_u0, s.value_err_umid, s.control_w2_int, s.gamma,
                    s.eta, s.seconds});
  }
  return rows;
}

std::vector<std::vector<double>> sweep_plot_data(const SweepResult& r) {
  std::vector<std::vector<double>> rows;
  for (const SweepRow& s : r.rows) {
    if (s.value_err_u0 > 0.0) rows.push_back({std::log(static_cast<double>(s.n)), std::log(s.value_err_u0)});
  }
  return rows;
}

}  // namespace tigames
