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

#include "tigames/presets.hpp"

#include <cmath>

namespace tigames {

namespace {

GameSpec mean_variance_base(const LQParams& p, std::size_t players) {
  p.validate();
  GameSpec s;
  s.num_players = players;
  s.horizon = p.horizon;
  const double sigma = p.sigma, gamma = p.gamma;
  s.sigma = [sigma](double, double) { return sigma; };
  s.terminal_g = [gamma](double x, const LawView&) { return x - 0.5 * gamma * x * x; };
  s.G = CouplingFunction::quadratic(gamma, 0.0, 0.0);
  s.phi1 = [](double x) { return x; };
  s.phi2 = [](const LawView&) { return 0.0; };
  s.phi2_bound = 0.0;
  s.control_set = ControlSet{-p.a_bar, p.a_bar, 201};
  s.drift_bound = p.a_bar;
  return s;
}

}  // namespace

GameSpec ex1_game(const LQParams& p) {
  GameSpec s = mean_variance_base(p, 2);
  s.name = "ex1";
  s.drift_b = [](double, double, const LawView&, double a) { return a; };
  // law.second_control * N is the sum of squared controls of both players.
  s.running_f = [](double, double, const LawView& law, double a) {
    return 2.0 * law.second_control - 2.0 * a * a;
  };
  s.lambda_max = [](double, double, const LawView&, double z, double, double, double aleph) {
    return 0.5 * z + aleph;
  };
  return s;
}

GameSpec ex2_game(const LQParams& p) {
  GameSpec s = mean_variance_base(p, 2);
  s.name = "ex2";
  s.drift_b = [](double, double, const LawView&, double a) { return a; };
  s.running_f = [](double, double, const LawView& law, double a) {
    const double other = 2.0 * law.mean_control - a;
    return 0.5 * a * a - (a - other) * (a - other);
  };
  // Best response a_i = 2 a_j + z_ii; the fixed point is a_i = -z_ii/3 - 2 z_jj/3.
  s.lambda_max = [](double, double, const LawView&, double z, double, double, double aleph) {
    return -z / 3.0 + aleph;
  };
  s.aleph = [](std::size_t player, const HamiltonianState& st) {
    const std::size_t other = 1 - player;
    return -2.0 * st.z_at(other, other) / 3.0;
  };
  return s;
}

GameSpec rep_nplayer_game(const LQParams& p) {
  GameSpec s = mean_variance_base(p, p.players);
  s.name = "rep51";
  const double k = p.k, k1 = p.kappa1, k2 = p.kappa2;
  const double n = static_cast<double>(p.players);
  s.drift_b = [k](double, double x, const LawView&, double a) { return a - k * x; };
  s.running_f = [k1, k2](double, double, const LawView& law, double a) {
    return -0.5 * a * a + k1 * law.mean_state + k2 * law.mean_control;
  };
  s.lambda_max = [](double, double, const LawView&, double z, double, double, double aleph) {
    return z + aleph;
  };
  s.aleph = [k2, n](std::size_t, const HamiltonianState&) { return k2 / n; };
  s.drift_bound.reset();
  s.dissipativity = p.k;
  return s;
}

GameSpec rep_meanfield_game(const LQParams& p) {
  LQParams q = p;
  q.players = 1;
  GameSpec s = rep_nplayer_game(q);
  s.name = "rep51-meanfield";
  s.aleph = nullptr;
  return s;
}

ZeroSumSpec lq_zero_sum(const LQParams& p) {
  p.validate();
  ZeroSumSpec s;
  s.horizon = p.horizon;
  const double sigma = p.sigma, gamma = p.gamma;
  s.sigma = [sigma](double, double) { return sigma; };
  s.drift_b = [](double, double, double a, double at) { return a + at; };
  s.running_f = [](double, double, double a, double at) { return a * a - 0.5 * at * at; };
  s.terminal_g = [gamma](double x) { return x - 0.5 * gamma * x * x; };
  s.G = [gamma](double m) { return 0.5 * gamma * m * m; };
  s.dG = [gamma](double m) { return gamma * m; };
  s.d2G = [gamma](double) { return gamma; };
  s.phi = [](double x) { return x; };
  s.control_set = ControlSet{-2.0, 2.0, 41};
  return s;
}

double lq_zero_sum_value(const LQParams& p, double t, double x) {
  return x + p.sigma * p.sigma * (0.25 - 0.5 * p.gamma) * (p.horizon - t);
}

GameSpec preset_game(const std::string& name, const LQParams& p) {
  if (name == "ex1") return ex1_game(p);
  if (name == "ex2") return ex2_game(p);
  if (name == "rep51") return rep_nplayer_game(p);
  throw ModelError("unknown preset '" + name + "'");
}

}  // namespace tigames
