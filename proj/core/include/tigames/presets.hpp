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

// Ready-made games with known solutions.  Every preset supplies the
// Hamiltonian maximiser, so solvers can skip the grid search.

#include <string>

#include "tigames/lq.hpp"
#include "tigames/model.hpp"
#include "tigames/zerosum.hpp"

namespace tigames {

/// Two players, b = a, f = a_j^2 - a_i^2, g = x - gamma/2 x^2,
/// G = gamma/2 m^2, phi1 = x, phi2 = 0, A = [-a_bar, a_bar].
GameSpec ex1_game(const LQParams& p);

/// Two players, b = a, f = a^2/2 - (a - a_j)^2, same terminal structure.
GameSpec ex2_game(const LQParams& p);

/// N players, b = a - k x, f = -a^2/2 + kappa1 mean(x) + kappa2 mean(a).
GameSpec rep_nplayer_game(const LQParams& p);

/// Representative agent of the mean-field limit; the law enters through
/// the provider handed to the solver.
GameSpec rep_meanfield_game(const LQParams& p);

/// b = a + a~, f = a^2 - a~^2/2, g = x - gamma/2 x^2, G = gamma/2 m^2, phi = x.
ZeroSumSpec lq_zero_sum(const LQParams& p);

/// Closed-form value of `lq_zero_sum`: x + sigma^2 (1/4 - gamma/2) (T - t).
double lq_zero_sum_value(const LQParams& p, double t, double x);

/// Looks up "ex1", "ex2", "rep51" (N-player).
GameSpec preset_game(const std::string& name, const LQParams& p);

}  // namespace tigames
