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

#include "tigames/lq.hpp"

#include <algorithm>
#include <cmath>

#include "tigames/model.hpp"

namespace tigames {

namespace {

void require_time(const LQParams& p, double t) {
  if (!(t <= p.horizon + 1e-12)) throw ModelError("t exceeds the horizon");
}

double clip(const LQParams& p, double a) { return std::clamp(a, -p.a_bar, p.a_bar); }

double decay(const LQParams& p, double t) { return std::exp(p.sigma * p.k * (t - p.horizon)); }

}  // namespace

void LQParams::validate() const {
  if (!(sigma >= 0.0)) throw ModelError("sigma must be >= 0");
  if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
  if (!(a_bar > 0.0)) throw ModelError("a_bar must be > 0");
  if (players < 1) throw ModelError("num_players must be >= 1");
  if (!(k > 0.0)) throw ModelError("mean reversion k must be > 0");
}

Ex1Solution ex1_solution(const LQParams& p, double t, double x) {
  require_time(p, t);
  const double s2 = p.sigma * p.sigma, tau = p.horizon - t;
  return {x + 0.5 * s2 * (1.0 - p.gamma) * tau, p.sigma, 0.0, x + 0.5 * s2 * tau, p.sigma,
          0.5 * p.sigma};
}

double ex1_mkv_value(const LQParams& p, double t, double mean, double second_moment) {
  require_time(p, t);
  if (second_moment < mean * mean - 1e-12 * std::max(1.0, mean * mean)) {
    throw ModelError("second moment below squared mean");
  }
  return mean - 0.5 * p.gamma * second_moment + 0.5 * p.gamma * mean * mean +
         0.5 * p.sigma * p.sigma * (1.0 - p.gamma) * (p.horizon - t);
}

Ex2Solution ex2_solution(const LQParams& p, double t, double x) {
  require_time(p, t);
  const double s2 = p.sigma * p.sigma, tau = p.horizon - t;
  return {x - 0.5 * s2 * (1.0 + p.gamma) * tau, p.sigma, x - s2 * tau, -p.sigma};
}

double rep_nplayer_control_raw(const LQParams& p, double t) {
  const double e = decay(p, t), n = static_cast<double>(p.players);
  return p.sigma * e + p.kappa1 * (1.0 - e) / (p.k * n) + p.kappa2 / n;
}

double rep_eta_derivative(const LQParams& p, double s, EtaKind which) {
  const double e = decay(p, s);
  const double a = clip(p, rep_nplayer_control_raw(p, s));
  if (which == EtaKind::kMstar) return -p.sigma * e * a;
  const double cross = p.kappa1 * (1.0 - e) / p.k + p.kappa2;
  return -a * (p.sigma * e + cross - 0.5 * a) + 0.5 * p.gamma * p.sigma * p.sigma * e * e;
}

double rep_eta(const LQParams& p, double t, EtaKind which, std::size_t panels) {
  require_time(p, t);
  if (panels < 10) throw ModelError("need at least 10 quadrature panels");
  return -simpson([&](double s) { return rep_eta_derivative(p, s, which); }, t, p.horizon, panels);
}

RepNPlayer rep_nplayer(const LQParams& p, double t, std::span<const double> x, std::size_t panels) {
  require_time(p, t);
  const std::size_t n = p.players;
  if (x.size() != n) throw ModelError("state vector length differs from player count");
  const double e = decay(p, t), nd = static_cast<double>(n);
  double sum = 0.0;
  for (double v : x) sum += v;
  const double eta = rep_eta(p, t, EtaKind::kValue, panels);
  const double eta_m = rep_eta(p, t, EtaKind::kMstar, panels);
  const double cross = p.kappa1 * (1.0 - e) / (p.k * nd);
  RepNPlayer out;
  out.alpha.assign(n, clip(p, rep_nplayer_control_raw(p, t)));
  out.z.assign(n * n, cross);
  out.zm.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.v.push_back(e * x[i] + cross / p.sigma * sum + eta);
    out.vm.push_back(e * x[i] + eta_m);
    out.z[i * n + i] += p.sigma * e;
    out.zm[i * n + i] = p.sigma * e;
  }
  return out;
}

double rep_meanfield_mean(const LQParams& p, double t, double x, double s) {
  const double sk = p.sigma * p.k;
  // Only valid while the control is unprojected.
  return std::exp(-sk * (s - t)) * x +
         p.sigma / (2.0 * p.k) * (decay(p, s) - std::exp(-sk * (s + p.horizon - 2.0 * t)));
}

double rep_meanfield_variance(const LQParams& p, double t, double s) {
  return p.sigma / (2.0 * p.k) * (1.0 - std::exp(-2.0 * p.sigma * p.k * (s - t)));
}

double rep_meanfield_eta(const LQParams& p, double t, double x, ExponentReading reading,
                         std::size_t panels) {
  require_time(p, t);
  if (panels < 10) throw ModelError("need at least 10 quadrature panels");
  const double et = decay(p, t);
  auto integrand = [&](double s) {
    const double e = decay(p, s);
    const double a = clip(p, p.sigma * e);
    const double var_e = reading == ExponentReading::kIntegrationVariable ? e : et;
    return -0.5 * a * a + p.kappa2 * a + p.sigma * e * a + p.kappa1 * rep_meanfield_mean(p, t, x, s) -
           0.5 * p.gamma * p.sigma * p.sigma * var_e * var_e;
  };
  return simpson(integrand, t, p.horizon, panels);
}

RepMeanField rep_meanfield(const LQParams& p, double t, double x, ExponentReading reading,
                           std::size_t panels) {
  require_time(p, t);
  const double e = decay(p, t);
  RepMeanField r;
  r.eta = rep_meanfield_eta(p, t, x, reading, panels);
  r.Y = e * x + r.eta;
  r.mstar = e * x + p.sigma / (2.0 * p.k) * (1.0 - e * e);
  r.z = r.zm = p.sigma * e;
  r.alpha = clip(p, p.sigma * e);
  return r;
}

double rep_convergence_bound(double c, std::size_t n) {
  if (n < 1) throw ModelError("N must be >= 1");
  const double nd = static_cast<double>(n);
  return c * (1.0 / nd + 1.0 / (nd * nd));
}

double fit_convergence_constant(std::span<const double> errors, std::span<const std::size_t> ns) {
  if (errors.size() != ns.size()) throw ModelError("errors and N list differ in length");
  double c = 0.0;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    c = std::max(c, errors[j] / rep_convergence_bound(1.0, ns[j]));
  }
  return c;
}

}  // namespace tigames
