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


#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tigames/model.hpp"
#include "tigames/presets.hpp"

namespace tigames {
namespace {

// W_p by integrating |F^-1 - G^-1|^p on a fine midpoint grid of (0, 1).
double quantile_oracle(std::vector<double> u, std::vector<double> v, int p) {
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  const int n = 200000;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double s = (j + 0.5) / n;
    const double a = u[static_cast<std::size_t>(s * u.size())];
    const double b = v[static_cast<std::size_t>(s * v.size())];
    acc += std::pow(std::abs(a - b), p);
  }
  return std::pow(acc / n, 1.0 / p);
}

TEST(ControlSet, GridAndProjection) {
  const ControlSet cs{-2.0, 2.0, 41};
  EXPECT_DOUBLE_EQ(cs.spacing(), 0.1);
  EXPECT_DOUBLE_EQ(cs.point(0), -2.0);
  EXPECT_DOUBLE_EQ(cs.point(40), 2.0);
  EXPECT_DOUBLE_EQ(project_to_A(3.0, cs), 2.0);
  EXPECT_DOUBLE_EQ(project_to_A(-7.0, cs), -2.0);
  EXPECT_DOUBLE_EQ(project_to_A(0.3, cs), 0.3);
  EXPECT_THROW((ControlSet{1.0, -1.0, 3}.validate()), ModelError);
}

TEST(TimeGrid, Indexing) {
  const TimeGrid g{1.0, 50};
  EXPECT_EQ(g.index_of(0.5), 25u);
  EXPECT_FALSE(g.index_of(0.505).has_value());
  EXPECT_THROW(g.require_index(0.505), ModelError);
  EXPECT_DOUBLE_EQ(g.time(50), 1.0);
}

TEST(EmpiricalMeasure, EmptyThrows) {
  std::vector<Atom> none;
  EXPECT_THROW(empirical_measure(none), ModelError);
}

TEST(EmpiricalMeasure, Moments) {
  const std::vector<Atom> atoms{{1.0, 2.0}, {3.0, -2.0}};
  const EmpiricalMeasure m = empirical_measure(atoms);
  const LawView v = m.view();
  EXPECT_DOUBLE_EQ(m.weight(), 0.5);
  EXPECT_DOUBLE_EQ(v.mean_state, 2.0);
  EXPECT_DOUBLE_EQ(v.mean_control, 0.0);
  EXPECT_DOUBLE_EQ(v.second_state, 5.0);
  EXPECT_DOUBLE_EQ(v.variance_state(), 1.0);
}

TEST(Wasserstein, TranslationIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> u(37);
  for (double& x : u) x = nd(rng);
  std::vector<double> v = u;
  for (double& x : v) x += 0.75;
  EXPECT_NEAR(wasserstein_1d_unsorted(u, v, 1), 0.75, 1e-14);
  EXPECT_NEAR(wasserstein_1d_unsorted(u, v, 2), 0.75, 1e-14);
  EXPECT_EQ(wasserstein_1d_unsorted(u, u, 2), 0.0);
}

TEST(Wasserstein, UnequalSizesMatchQuantileOracle) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int r = 0; r < 5; ++r) {
    std::vector<double> u(5 + r), v(8 + 3 * r);
    for (double& x : u) x = nd(rng);
    for (double& x : v) x = 2.0 * nd(rng) + 1.0;
    for (int p : {1, 2}) {
      EXPECT_NEAR(wasserstein_1d_unsorted(u, v, p), quantile_oracle(u, v, p), 1e-4);
    }
  }
}

TEST(Wasserstein, TriangleOnRandomTriples) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> sz(1, 30);
  for (int r = 0; r < 1000; ++r) {
    std::vector<double> a(sz(rng)), b(sz(rng)), c(sz(rng));
    for (double& x : a) x = nd(rng);
    for (double& x : b) x = 3.0 * nd(rng);
    for (double& x : c) x = nd(rng) + 2.0;
    for (int p : {1, 2}) {
      const double ab = wasserstein_1d_unsorted(a, b, p), bc = wasserstein_1d_unsorted(b, c, p);
      const double ac = wasserstein_1d_unsorted(a, c, p);
      ASSERT_LE(ac, ab + bc + 1e-12);
      ASSERT_NEAR(ab, wasserstein_1d_unsorted(b, a, p), 1e-12);
    }
  }
}

TEST(Wasserstein, W1BelowW2) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int r = 0; r < 200; ++r) {
    std::vector<double> a(1 + r % 13), b(1 + r % 7);
    for (double& x : a) x = nd(rng);
    for (double& x : b) x = nd(rng) * 2.0;
    EXPECT_LE(wasserstein_1d_unsorted(a, b, 1), wasserstein_1d_unsorted(a, b, 2) + 1e-12);
  }
}

TEST(Coupling, QuadraticPartials) {
  const CouplingFunction g = CouplingFunction::quadratic(2.0, 0.5, -1.0, 0.3, -0.2);
  const double m = 0.7, n = -1.1, h = 1e-5;
  EXPECT_NEAR(g.dm(m, n), (g.value(m + h, n) - g.value(m - h, n)) / (2 * h), 1e-8);
  EXPECT_NEAR(g.dn(m, n), (g.value(m, n + h) - g.value(m, n - h)) / (2 * h), 1e-8);
  EXPECT_DOUBLE_EQ(g.dmm(m, n), 2.0);
  EXPECT_DOUBLE_EQ(g.dmn(m, n), 0.5);
  EXPECT_DOUBLE_EQ(g.dnn(m, n), -1.0);
  EXPECT_EQ(CouplingFunction::zero().value(1.0, 2.0), 0.0);
}

HamiltonianState ex1_state(double z_own, double z_cross) {
  HamiltonianState st(2);
  st.x = {0.1, -0.3};
  for (std::size_t i = 0; i < 2; ++i) {
    st.z_at(i, i) = z_own;
    st.z_at(i, 1 - i) = z_cross;
    st.mstar = {0.1, -0.3};
  }
  return st;
}

TEST(Hamiltonian, GridArgmaxMatchesLambda) {
  LQParams p;
  const GameSpec spec = ex1_game(p);
  const HamiltonianState st = ex1_state(1.0, 0.0);
  const std::vector<double> controls{0.0, 0.0};
  const double grid = argmax_control(spec, st, 0, controls, ArgmaxOptions{false});
  const double lam = lambda_control(spec, st, 0);
  EXPECT_NEAR(grid, lam, spec.control_set.spacing());
  EXPECT_DOUBLE_EQ(argmax_control(spec, st, 0, controls), lam);
}

TEST(Hamiltonian, ResidualZeroAtFixedPoint) {
  LQParams p;
  const GameSpec spec = ex1_game(p);
  const HamiltonianState st = ex1_state(1.0, 0.2);
  const FixedPointResult fp = solve_hamiltonian_fixed_point(spec, st, std::vector<double>{0.0, 0.0});
  EXPECT_NEAR(fp.controls[0], 0.5, 1e-12);
  EXPECT_NEAR(fixed_point_residual(spec, st, fp.controls), 0.0, spec.control_set.spacing() * spec.control_set.spacing());
  EXPECT_GT(fixed_point_residual(spec, st, std::vector<double>{-1.0, -1.0}), 0.1);
}

TEST(Hamiltonian, ResidualIsNonnegative) {
  LQParams p;
  const GameSpec spec = ex2_game(p);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int r = 0; r < 100; ++r) {
    const HamiltonianState st = ex1_state(u(rng), u(rng));
    EXPECT_GE(fixed_point_residual(spec, st, std::vector<double>{u(rng), u(rng)}), 0.0);
  }
}

TEST(Hamiltonian, BestResponseWithoutLambda) {
  LQParams p;
  GameSpec spec = ex2_game(p);
  spec.lambda_max = nullptr;
  spec.aleph = nullptr;
  HamiltonianState st = ex1_state(1.0, 0.0);
  FixedPointOptions opt;
  opt.max_sweeps = 8;
  opt.compute_residual = true;
  const FixedPointResult fp = solve_hamiltonian_fixed_point(spec, st, std::vector<double>{0.0, 0.0}, opt);
  // Best responses a_i = 2 a_j + z_ii are expansive, and clipping to A adds fixed
  // points on the boundary; any of them must have a grid-level residual.
  EXPECT_NE(fp.method, FixedPointMethod::kUnconverged);
  const double h = spec.control_set.spacing();
  EXPECT_LE(fixed_point_residual(spec, st, fp.controls), h * h);
}

TEST(GameSpec, ValidateRejectsMissingCoefficients) {
  GameSpec s;
  EXPECT_THROW(s.validate(), ModelError);
  LQParams p;
  p.players = 0;
  EXPECT_THROW(p.validate(), ModelError);
}

}  // namespace
}  // namespace tigames
