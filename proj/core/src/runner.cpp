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

#include "tigames/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include "json.hpp"
#include "tigames/convergence.hpp"
#include "tigames/csv.hpp"
#include "tigames/lq.hpp"
#include "tigames/meanfield.hpp"
#include "tigames/nplayer.hpp"
#include "tigames/presets.hpp"
#include "tigames/zerosum.hpp"

namespace tigames {

namespace fs = std::filesystem;

bool Verdict::pass() const {
  return converged && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int Verdict::exit_code() const {
  if (!converged) return kExitNotConverged;
  return pass() ? kExitPass : kExitCheckFailed;
}

std::string verdict_json(const Verdict& v) {
  nlohmann::json j;
  j["command"] = v.command;
  j["pass"] = v.pass();
  j["exit_code"] = v.exit_code();
  j["converged"] = v.converged;
  j["message"] = v.message;
  j["checks"] = nlohmann::json::array();
  for (const Check& c : v.checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"pass", c.pass}, {"note", c.note}});
  }
  j["artifacts"] = v.artifacts;
  return j.dump(2) + "\n";
}

namespace {

Check at_most(std::string name, double measured, double tol, std::string note = {}) {
  return {std::move(name), measured, tol, measured <= tol, std::move(note)};
}

NPlayerConfig nplayer_config(const ExperimentConfig& c) {
  NPlayerConfig n;
  n.grid = TimeGrid{c.game.params.horizon, c.numerics.steps};
  n.paths = c.numerics.paths;
  n.basis = RegressionBasis{c.numerics.basis_degree, c.numerics.ridge};
  n.picard = PicardConfig{c.numerics.picard_max_iters, c.numerics.picard_damping, c.numerics.picard_tol};
  n.seed = c.seed;
  return n;
}

void emit(Verdict& v, const fs::path& dir, const std::string& file, const std::vector<std::string>& header,
          const std::vector<std::vector<double>>& rows) {
  write_csv(dir / file, header, rows);
  v.artifacts.push_back(file);
}

// Sup over steps and players of the path-mean |alpha - reference(t)|.
double alpha_error(const EquilibriumSolution& sol, const std::function<double(double)>& reference) {
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.steps(); ++k) {
    const double ref = reference(sol.ensemble.grid().time(k));
    for (std::size_t i = 0; i < sol.players(); ++i) {
      double acc = 0.0;
      for (std::size_t p = 0; p < sol.paths(); ++p) acc += std::abs(sol.ensemble.a(p, i, k) - ref);
      worst = std::max(worst, acc / static_cast<double>(sol.paths()));
    }
  }
  return worst;
}

double mean_y0(const EquilibriumSolution& sol) {
  double acc = 0.0;
  for (std::size_t p = 0; p < sol.paths(); ++p) acc += sol.y(p, 0, 0);
  return acc / static_cast<double>(sol.paths());
}

void run_lq_verify(const ExperimentConfig& c, Verdict& v) {
  const LQParams& p = c.game.params;
  const std::string& g = c.game.preset;
  const double x = c.game.x0, dt = p.horizon / static_cast<double>(c.numerics.steps);
  if (g == "ex1") {
    LQParams unit = p;
    unit.sigma = 1.0;
    unit.gamma = 0.0;
    unit.horizon = 1.0;
    const Ex1Solution s = ex1_solution(unit, 0.0, 2.0);
    v.checks.push_back(at_most("ex1_reference_point", std::abs(s.Y - 2.5) + std::abs(s.mstar - 2.5) + std::abs(s.alpha - 0.5), 1e-12));
    v.checks.push_back(at_most("ex1_terminal", std::abs(ex1_solution(p, p.horizon, x).Y - x), 1e-12));
    v.checks.push_back(at_most("ex1_mkv_dirac", std::abs(ex1_mkv_value(p, 0.0, x, x * x) - ex1_solution(p, 0.0, x).Y), 1e-12));
    // One Euler step of E[Y_{k+1}] + dt (f - gamma/2 |Zm|^2) with E[dX] = sigma alpha dt.
    const Ex1Solution a = ex1_solution(p, 0.0, x), b = ex1_solution(p, dt, x + p.sigma * a.alpha * dt);
    v.checks.push_back(at_most("ex1_bsde_step", std::abs(b.Y - dt * 0.5 * p.gamma * a.zm_own * a.zm_own - a.Y), 1e-12));
  } else if (g == "ex2") {
    LQParams unit = p;
    unit.sigma = 1.0;
    unit.gamma = 1.0;
    unit.horizon = 1.0;
    const Ex2Solution s = ex2_solution(unit, 0.0, 0.0);
    v.checks.push_back(at_most("ex2_reference_point", std::abs(s.Y + 1.0) + std::abs(s.mstar + 1.0), 1e-12));
    v.checks.push_back(at_most("ex2_terminal", std::abs(ex2_solution(p, p.horizon, x).Y - x), 1e-12));
    const Ex2Solution a = ex2_solution(p, 0.0, x), b = ex2_solution(p, dt, x + p.sigma * a.alpha * dt);
    const double f = 0.5 * a.alpha * a.alpha;
    v.checks.push_back(at_most("ex2_bsde_step", std::abs(b.Y + dt * (f - 0.5 * p.gamma * p.sigma * p.sigma) - a.Y), 1e-12));
  } else if (g == "rep51") {
    const std::size_t q = c.numerics.quadrature_panels;
    const double e1 = rep_eta(p, 0.0, EtaKind::kValue, q), e2 = rep_eta(p, 0.0, EtaKind::kValue, 2 * q);
    v.checks.push_back(at_most("rep_eta_richardson", std::abs(e1 - e2) / std::max(std::abs(e2), 1e-300), 1e-8));
    double worst = 0.0;
    for (std::size_t n = 2; n <= 128; ++n) {
      LQParams pn = p;
      pn.players = n;
      const double bound = (std::abs(p.kappa1) / p.k + std::abs(p.kappa2)) / static_cast<double>(n);
      for (std::size_t j = 0; j <= 64; ++j) {
        const double t = p.horizon * static_cast<double>(j) / 64.0;
        const double gap = std::abs(rep_nplayer_control_raw(pn, t) - p.sigma * std::exp(p.sigma * p.k * (t - p.horizon)));
        worst = std::max(worst, gap - bound);
      }
    }
    v.checks.push_back(at_most("rep_nplayer_to_meanfield_bound", worst, 1e-12));
    const GameSpec spec = rep_nplayer_game(p);
    const std::vector<double> xs(p.players, x);
    const RepNPlayer r = rep_nplayer(p, 0.0, xs, q);
    HamiltonianState st(p.players);
    st.x = xs;
    st.z = r.z;
    st.zm = r.zm;
    st.mstar = r.vm;
    const double spacing = spec.control_set.spacing();
    v.checks.push_back(at_most("rep_hamiltonian_residual", fixed_point_residual(spec, st, r.alpha), spacing * spacing));
  } else {
    v.checks.push_back({"lq_preset", 0.0, 0.0, false, "lq-verify needs preset ex1, ex2 or rep51"});
  }
}

void run_solve_nplayer(const ExperimentConfig& c, const fs::path& dir, Verdict& v) {
  const GameSpec spec = game_from_config(c);
  const EquilibriumSolution sol = solve_nplayer(spec, nplayer_config(c));
  v.converged = sol.report.converged;
  v.message = sol.report.message;
  emit(v, dir, "nplayer.csv", {"t", "player", "mean_Y", "mean_alpha", "fixed_point_residual", "mstar_bound_slack"},
       nplayer_table(sol));
  const LQParams& p = c.game.params;
  const double x0 = c.game.x0, y0 = mean_y0(sol);
  if (c.game.preset == "ex1") {
    const double ref = ex1_solution(p, 0.0, x0).Y;
    v.checks.push_back(at_most("y0_error", std::abs(y0 - ref), std::max(0.02 * std::abs(ref), 0.01)));
    v.checks.push_back(at_most("alpha_error", alpha_error(sol, [&](double t) { return ex1_solution(p, t, x0).alpha; }), 0.05));
  } else if (c.game.preset == "ex2") {
    const double ref = ex2_solution(p, 0.0, x0).Y;
    v.checks.push_back(at_most("y0_error", std::abs(y0 - ref), 0.02 * std::abs(ref)));
    v.checks.push_back(at_most("alpha_error", alpha_error(sol, [&](double t) { return ex2_solution(p, t, x0).alpha; }), 0.05));
  } else if (c.game.preset == "rep51") {
    const std::vector<double> xs(p.players, x0);
    const double ref = rep_nplayer(p, 0.0, xs, c.numerics.quadrature_panels).v[0];
    v.checks.push_back(at_most("y0_error", std::abs(y0 - ref), std::max(0.02 * std::abs(ref), 0.01)));
    v.checks.push_back(at_most(
        "alpha_error",
        alpha_error(sol, [&](double t) { return std::clamp(rep_nplayer_control_raw(p, t), -p.a_bar, p.a_bar); }),
        0.05));
  }
  const DiagnosticsReport diag = appendix_diagnostics(sol);
  for (const BoundCheck& b : diag.checks) v.checks.push_back({b.name, b.measured, b.bound, b.pass, ""});
}

void run_solve_meanfield(const ExperimentConfig& c, const fs::path& dir, Verdict& v) {
  GameSpec spec;
  if (c.game.preset == "rep51") {
    spec = rep_meanfield_game(c.game.params);
    spec.initial_mean = c.game.x0;
  } else {
    spec = game_from_config(c);
    if (spec.num_players != 1) throw ConfigError({"game: solve-meanfield needs rep51 or a one-player custom game"});
  }
  MeanFieldConfig mc;
  mc.grid = TimeGrid{c.game.params.horizon, c.numerics.steps};
  mc.particles = c.numerics.particles;
  mc.basis = RegressionBasis{c.numerics.basis_degree, c.numerics.ridge};
  mc.max_outer = c.numerics.max_outer;
  mc.tol_w = c.numerics.tol_w;
  mc.seed = c.seed;
  const MeanFieldSolution sol = solve_meanfield(spec, mc);
  v.converged = sol.report.converged;
  v.message = sol.report.message;
  emit(v, dir, "meanfield.csv", {"iter", "sup_t_W2", "Y0_mean", "alpha_sup_change"}, meanfield_table(sol));
  v.checks.push_back(at_most("outer_iterations", static_cast<double>(sol.report.iterations),
                             static_cast<double>(c.numerics.max_outer)));
  v.checks.push_back(at_most("final_flow_distance", sol.report.distance.back(), sol.report.tolerance));
  if (c.game.preset == "rep51") {
    double y0 = 0.0;
    for (std::size_t p = 0; p < sol.particles(); ++p) y0 += sol.y(p, 0);
    y0 /= static_cast<double>(sol.particles());
    const double ref = rep_meanfield(c.game.params, 0.0, c.game.x0, ExponentReading::kIntegrationVariable,
                                     c.numerics.quadrature_panels)
                           .Y;
    v.checks.push_back(at_most("y0_error", std::abs(y0 - ref), 0.02 * std::abs(ref)));
  }
}

void run_zerosum(const ExperimentConfig& c, const fs::path& dir, Verdict& v) {
  ZeroSumSpec spec = lq_zero_sum(c.game.params);
  spec.initial_state = c.game.x0;
  ZeroSumConfig zc;
  zc.grid = TimeGrid{c.game.params.horizon, c.numerics.steps};
  zc.paths = c.numerics.paths;
  zc.basis = RegressionBasis{c.numerics.basis_degree, c.numerics.ridge};
  zc.seed = c.seed;
  try {
    const ZeroSumSolution first = solve_zero_sum(spec, zc, ZeroSumSide::kMaximiser);
    ZeroSumConfig zc2 = zc;
    zc2.seed = mix_seed(c.seed, 2);
    const ZeroSumSolution second = solve_zero_sum(spec, zc2, ZeroSumSide::kMinimiser);
    emit(v, dir, "zerosum.csv", {"t", "mean_Y", "gap_max", "antisymmetry_defect"}, zero_sum_table(first, second));
    const AntisymmetryReport a = antisymmetry_check(first, second);
    v.checks.push_back({"isaacs_gap", std::max(first.max_gap, second.max_gap), 0.0, true, "within tolerance on sampled paths"});
    v.checks.push_back(at_most("antisymmetry_y", a.y_defect, 3.0 * a.y_se));
    v.checks.push_back(at_most("antisymmetry_z", a.z_defect, 3.0 * a.z_se));
    const double ref = lq_zero_sum_value(c.game.params, 0.0, c.game.x0);
    v.checks.push_back(at_most("y0_error", std::abs(first.y0() - ref), std::max(0.02 * std::abs(ref), 0.01)));
  } catch (const IsaacsViolation& e) {
    v.checks.push_back({"isaacs_gap", e.gap, e.tolerance, false, e.what()});
  }
}

void run_converge(const ExperimentConfig& c, const fs::path& dir, Verdict& v) {
  SweepConfig sc;
  sc.params = c.game.params;
  sc.ns = c.sweep.ns;
  sc.mode = c.sweep.mode == "numerical" ? SweepMode::kNumerical : SweepMode::kClosedForm;
  sc.x0 = c.game.x0;
  sc.u_mid = c.sweep.u_mid;
  sc.panels = c.numerics.quadrature_panels;
  sc.seed = c.seed;
  sc.solver = nplayer_config(c);
  const SweepResult r = run_sweep(sc);
  emit(v, dir, "sweep.csv", {"N", "value_err_u0", "value_err_umid", "control_W2_int", "gamma", "eta", "seconds"},
       sweep_table(r));
  write_plot_data(dir / "sweep_loglog.dat", sweep_plot_data(r));
  v.artifacts.push_back("sweep_loglog.dat");
  if (r.rate_available) {
    v.checks.push_back({"rate_slope", r.rate.slope, -0.9, r.rate.slope >= -1.2 && r.rate.slope <= -0.9,
                        "accepted range [-1.2, -0.9]"});
  } else {
    v.checks.push_back({"rate_slope", 0.0, 0.0, true, r.note});
  }
  v.checks.push_back({"bound_shape", r.bound_constant, r.bound_constant, r.bound_holds, "errors <= c (1/N + 1/N^2)"});
  for (const SweepRow& row : r.rows) {
    if (!row.ok) {
      v.converged = false;
      v.message += "N=" + std::to_string(row.n) + ": " + row.message + "; ";
    }
  }
}

}  // namespace

Verdict run(const ExperimentConfig& config) {
  Verdict v;
  v.command = config.command;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  try {
    if (config.command == "lq-verify") {
      run_lq_verify(config, v);
    } else if (config.command == "solve-nplayer") {
      run_solve_nplayer(config, dir, v);
    } else if (config.command == "solve-meanfield") {
      run_solve_meanfield(config, dir, v);
    } else if (config.command == "zerosum") {
      run_zerosum(config, dir, v);
    } else if (config.command == "converge") {
      run_converge(config, dir, v);
    } else {
      throw ConfigError({"command: unknown command '" + config.command + "'"});
    }
  } catch (const ModelError& e) {
    throw ConfigError({std::string("game: ") + e.what()});
  }
  write_text(dir / "verdict.json", verdict_json(v));
  return v;
}

}  // namespace tigames
