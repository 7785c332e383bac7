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

// Closed-form solutions of the linear-quadratic games shipped as presets.
//
// The mean-reverting game has state dX = sigma (a - k X) dt + sigma dW, running
// reward -a^2/2 + kappa1 mean(X) + kappa2 mean(a) and mean-variance terminal
// reward X_T - gamma/2 Var(X_T).  All functions here are pure.

#include <cstddef>
#include <span>
#include <vector>

namespace tigames {

struct LQParams {
  double sigma = 1.0;
  double gamma = 0.5;
  double horizon = 1.0;
  double k = 1.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double a_bar = 10.0;
  std::size_t players = 2;

  void validate() const;
  bool operator==(const LQParams&) const = default;
};

/// Symmetric two-player game with b = a and f = a_j^2 - a_i^2.
struct Ex1Solution {
  double Y = 0.0;
  double z_own = 0.0;
  double z_cross = 0.0;
  double mstar = 0.0;
  double zm_own = 0.0;
  double alpha = 0.0;
};

Ex1Solution ex1_solution(const LQParams& p, double t, double x);

/// Value on the Wasserstein space for the McKean-Vlasov control problem with
/// the same coefficients; depends on the law through its first two moments.
double ex1_mkv_value(const LQParams& p, double t, double mean, double second_moment);

/// Two-player game with f = a^2/2 - (a - a_j)^2.
struct Ex2Solution {
  double Y = 0.0;
  double z_own = 0.0;
  double mstar = 0.0;
  double alpha = 0.0;
};

Ex2Solution ex2_solution(const LQParams& p, double t, double x);

enum class EtaKind { kValue, kMstar };

/// eta^N (value) or eta^{m,N} (M*) of the N-player mean-reverting game at t,
/// by composite Simpson on `panels` panels of [t, T].
double rep_eta(const LQParams& p, double t, EtaKind which, std::size_t panels = 512);

/// Right-hand side d eta / dt of the N-player ODEs.
double rep_eta_derivative(const LQParams& p, double s, EtaKind which);

/// Unprojected equilibrium control of the N-player game.
double rep_nplayer_control_raw(const LQParams& p, double t);

struct RepNPlayer {
  std::vector<double> v;       // v^{i,N}
  std::vector<double> vm;      // v^{m,i,N}
  std::vector<double> alpha;   // projected equilibrium controls
  std::vector<double> z;       // Z^{i,l}, N x N row-major
  std::vector<double> zm;      // Z^{i,m,l}, N x N row-major
};

RepNPlayer rep_nplayer(const LQParams& p, double t, std::span<const double> x,
                       std::size_t panels = 512);

enum class ExponentReading {
  kIntegrationVariable,  // gamma term uses e^{2 sigma k (s - T)}
  kOuterTime,            // gamma term uses e^{2 sigma k (t - T)}
};

struct RepMeanField {
  double Y = 0.0;
  double mstar = 0.0;
  double z = 0.0;
  double zm = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
};

/// Mean of X_s under the mean-field equilibrium started from X_t = x.
double rep_meanfield_mean(const LQParams& p, double t, double x, double s);
/// Variance of X_s under the mean-field equilibrium started from X_t = x.
double rep_meanfield_variance(const LQParams& p, double t, double s);

double rep_meanfield_eta(const LQParams& p, double t, double x,
                         ExponentReading reading = ExponentReading::kIntegrationVariable,
                         std::size_t panels = 512);

RepMeanField rep_meanfield(const LQParams& p, double t, double x,
                           ExponentReading reading = ExponentReading::kIntegrationVariable,
                           std::size_t panels = 512);

/// c (1/N + 1/N^2).
double rep_convergence_bound(double c, std::size_t n);

/// Smallest c with errors[j] <= c (1/N_j + 1/N_j^2) for every j.
double fit_convergence_constant(std::span<const double> errors, std::span<const std::size_t> ns);

/// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t j = 1; j < panels; ++j) {
    s += (j % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(j));
  }
  return s * h / 3.0;
}

}  // namespace tigames
