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

// N-sweeps comparing the mean-reverting N-player game with its mean-field
// limit, plus the statistics bounding the gap between the two.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tigames/lq.hpp"
#include "tigames/nplayer.hpp"
#include "tigames/sde.hpp"

namespace tigames {

/// Growth rate R_N of the interaction term aleph.
struct RNSchedule {
  std::function<double(std::size_t)> r;

  double operator()(std::size_t n) const { return r ? r(n) : 0.0; }

  struct Flags {
    bool nr2_vanishing = false;  // N R_N^2 decays across the range
    bool n2r2_bounded = false;   // N^2 R_N^2 stays within a factor 10
  };
  Flags verify(std::span<const std::size_t> ns) const;

  static RNSchedule zero();
  /// R_N = c / N.
  static RNSchedule inverse(double c);
};

/// R_N^2 (1 + |x1|^2 + mean |x|^2) + C N R_N^2 (1 + |x1|^{2p} + mean |x|^{2p})
///   + N R_N^4 (1 + mean |x|^2)(1 + N), with x1 = snapshot[0].
double eta_statistic(const RNSchedule& r, std::span<const double> snapshot, double p_bar = 1.0,
                     double c = 1.0);

/// Average over `blocks` disjoint N-clouds of `sample` of
/// sup_{t >= u} W2^2(states) + W2^2(controls) against the `reference` cloud.
/// Both ensembles are single-player.
double gamma_statistic(const PathEnsemble& reference, const PathEnsemble& sample, std::size_t n,
                       double u, std::size_t blocks);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;   // 95 %
  double ci_high = 0.0;
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

/// OLS of log(error) on log(N); nonpositive errors are dropped with a warning.
RateFit estimate_rate(std::span<const double> errors, std::span<const std::size_t> ns);

enum class SweepMode { kClosedForm, kNumerical };

struct SweepConfig {
  LQParams params;
  std::vector<std::size_t> ns{2, 4, 8, 16, 32, 64};
  SweepMode mode = SweepMode::kClosedForm;
  double x0 = 0.0;
  double u_mid = 0.5;
  std::size_t panels = 512;
  std::size_t reference_particles = 1u << 16;
  std::size_t gamma_blocks = 64;
  double p_bar = 1.0;
  double eta_c = 1.0;
  std::uint64_t seed = 20260404;
  /// Numerical mode only.
  NPlayerConfig solver;
};

struct SweepRow {
  std::size_t n = 0;
  double value_err_u0 = 0.0;
  double value_err_umid = 0.0;
  double control_w2_int = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double seconds = 0.0;
  bool ok = true;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool rate_available = false;
  RateFit rate;
  double bound_constant = 0.0;
  bool bound_holds = true;
  std::string note;
};

SweepResult run_sweep(const SweepConfig& config);

/// Mean-field value at (u, x) against the deterministic flow started at x0.
double meanfield_reference_value(const LQParams& p, double x0, double u, double x, std::size_t panels = 512);

/// Rows (N, value_err_u0, value_err_umid, control_W2_int, gamma, eta, seconds).
std::vector<std::vector<double>> sweep_table(const SweepResult& r);

/// Rows (log N, log value_err_u0) for positive errors.
std::vector<std::vector<double>> sweep_plot_data(const SweepResult& r);

}  // namespace tigames
