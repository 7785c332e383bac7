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


#include <cmath>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "tigames/lq.hpp"
#include "tigames/nplayer.hpp"
#include "tigames/presets.hpp"

namespace tigames {
namespace {

NPlayerConfig small(std::size_t paths = 1u << 12, std::size_t steps = 20) {
  NPlayerConfig c;
  c.grid = TimeGrid{1.0, steps};
  c.paths = paths;
  c.seed = 77;
  return c;
}

double mean_y0(const EquilibriumSolution& s, std::size_t player = 0) {
  double acc = 0.0;
  for (std::size_t p = 0; p < s.paths(); ++p) acc += s.y(p, player, 0);
  return acc / static_cast<double>(s.paths());
}

double mean_alpha(const EquilibriumSolution& s, std::size_t k, std::size_t player = 0) {
  double acc = 0.0;
  for (double a : s.ensemble.controls_at(k, player)) acc += a;
  return acc / static_cast<double>(s.paths());
}

class Ex1Solved : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    LQParams p;
    p.gamma = 0.5;
    sol_ = new EquilibriumSolution(solve_nplayer(ex1_game(p), small()));
  }
  static void TearDownTestSuite() {
    delete sol_;
    sol_ = nullptr;
  }
  static EquilibriumSolution* sol_;
};

EquilibriumSolution* Ex1Solved::sol_ = nullptr;

TEST_F(Ex1Solved, MatchesClosedForm) {
  EXPECT_TRUE(sol_->report.converged);
  EXPECT_NEAR(mean_y0(*sol_, 0), 0.25, 0.01);
  EXPECT_NEAR(mean_y0(*sol_, 1), 0.25, 0.01);
  for (std::size_t k = 0; k < sol_->steps(); ++k) EXPECT_NEAR(mean_alpha(*sol_, k), 0.5, 0.05);
}

TEST_F(Ex1Solved, TerminalValueIsTerminalReward) {
  const std::vector<double> yT = value_process(*sol_, 1.0, 1);
  const double gamma = 0.5;
  for (std::size_t p = 0; p < sol_->paths(); p += 97) {
    const double x = sol_->ensemble.x(p, 1, sol_->steps());
    EXPECT_NEAR(yT[p], x - 0.5 * gamma * x * x + 0.5 * gamma * x * x, 1e-12);
  }
  EXPECT_THROW(value_process(*sol_, 0.333, 0), ModelError);
}

TEST_F(Ex1Solved, DiagnosticsHold) {
  const DiagnosticsReport d = appendix_diagnostics(*sol_);
  EXPECT_TRUE(d.all_pass());
  for (const BoundCheck& c : d.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.measured << " > " << c.bound;
}

TEST_F(Ex1Solved, MartingaleResiduals) {
  for (auto which : {MartingaleProcess::kMstar, MartingaleProcess::kNstar}) {
    const std::vector<Estimate> r = martingale_residuals(*sol_, which, 1u << 12, 91);
    ASSERT_EQ(r.size(), sol_->steps());
    for (const Estimate& e : r) EXPECT_LE(std::abs(e.value), 4.0 * e.se + 1e-15);
  }
}

TEST_F(Ex1Solved, ZeroDeviationGapIsExactlyZero) {
  DeviationConfig dc;
  dc.pivots = 8;
  dc.paths_per_pivot = 128;
  const DeviationResult r = epsilon_deviation_test(*sol_, 0.5, std::nullopt, dc);
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST_F(Ex1Solved, SpikeDeviationsDoNotPay) {
  DeviationConfig dc;
  dc.pivots = 8;
  dc.paths_per_pivot = 256;
  const std::vector<std::optional<double>> devs{0.0, 1.0, -1.0, 3.0};
  for (double t : {0.0, 0.5, 0.95}) {
    for (const DeviationResult& r : epsilon_deviation_test(*sol_, t, devs, dc)) {
      EXPECT_TRUE(r.pass) << "t=" << t << " dev=" << *r.deviation << " gap=" << r.gap << " thr=" << r.threshold;
    }
  }
  // A large deviation is strictly worse than the equilibrium.
  const DeviationResult far = epsilon_deviation_test(*sol_, 0.0, 5.0, dc);
  EXPECT_GT(far.gap, 3.0 * far.se);
}

TEST_F(Ex1Solved, TableShape) {
  const auto rows = nplayer_table(*sol_);
  ASSERT_EQ(rows.size(), sol_->steps() * 2);
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 6u);
    EXPECT_GE(r[5], 0.0);
  }
}

TEST(NPlayer, AsymmetricGame) {
  LQParams p;
  p.gamma = 1.0;
  const EquilibriumSolution s = solve_nplayer(ex2_game(p), small());
  EXPECT_TRUE(s.report.converged);
  EXPECT_NEAR(mean_y0(s), -1.0, 0.02);
  EXPECT_NEAR(mean_alpha(s, 5), -1.0, 0.05);
}

TEST(NPlayer, GridFixedPointWithoutLambda) {
  LQParams p;
  p.gamma = 0.5;
  GameSpec spec = ex1_game(p);
  spec.lambda_max = nullptr;
  spec.control_set = ControlSet{-2.0, 2.0, 81};
  const EquilibriumSolution s = solve_nplayer(spec, small(1u << 11, 10));
  EXPECT_TRUE(s.report.converged);
  EXPECT_NEAR(mean_y0(s), 0.25, 0.02);
  for (std::size_t k = 0; k < s.steps(); ++k) EXPECT_NEAR(mean_alpha(s, k), 0.5, 0.05);
  const double h = spec.control_set.spacing();
  for (double r : s.report.residual_trace) EXPECT_LE(r, h * h + 1e-12);
}

TEST(NPlayer, AsymmetricGridFixedPointWithoutLambda) {
  LQParams p;
  p.gamma = 0.5;
  GameSpec spec = ex2_game(p);
  spec.lambda_max = nullptr;
  spec.aleph = nullptr;
  spec.control_set = ControlSet{-2.0, 2.0, 81};
  const EquilibriumSolution s = solve_nplayer(spec, small(1u << 11, 10));
  // On a compact control set the clipped best responses a_i = 2 a_j + z have
  // boundary fixed points besides the interior one; any of them is admissible.
  const double h = spec.control_set.spacing();
  for (double r : s.report.residual_trace) EXPECT_LE(r, h * h + 1e-12);
  for (double a : s.ensemble.controls_at(3, 0)) {
    EXPECT_TRUE(std::abs(a - 2.0) < 1e-12 || std::abs(a + 2.0) < 1e-12 || std::abs(a + 1.0) < 0.2) << a;
  }
}

TEST(NPlayer, MeanRevertingGameAgainstClosedForm) {
  LQParams p;
  p.kappa1 = 0.5;
  p.kappa2 = 0.5;
  p.players = 3;
  GameSpec spec = rep_nplayer_game(p);
  spec.initial_mean = 0.2;
  const EquilibriumSolution s = solve_nplayer(spec, small());
  const std::vector<double> x0(3, 0.2);
  const double ref = rep_nplayer(p, 0.0, x0).v[0];
  EXPECT_TRUE(s.report.converged);
  EXPECT_NEAR(mean_y0(s), ref, std::max(0.02 * std::abs(ref), 0.01));
  for (std::size_t k : {0u, 10u, 19u}) {
    EXPECT_NEAR(mean_alpha(s, k, 2), rep_nplayer_control_raw(p, s.ensemble.grid().time(k)), 0.05);
  }
}

TEST(NPlayer, DeterministicUnderSeed) {
  LQParams p;
  const NPlayerConfig c = small(1u << 10, 10);
  const EquilibriumSolution a = solve_nplayer(ex2_game(p), c);
  const EquilibriumSolution b = solve_nplayer(ex2_game(p), c);
  EXPECT_TRUE(a.ensemble.bitwise_equal(b.ensemble));
  EXPECT_EQ(a.Y, b.Y);
  EXPECT_EQ(a.Mstar, b.Mstar);
  EXPECT_EQ(a.Nstar, b.Nstar);
}

TEST(NPlayer, ReportsIterationLimit) {
  LQParams p;
  NPlayerConfig c = small(1u << 10, 10);
  c.picard.max_iters = 1;
  const EquilibriumSolution s = solve_nplayer(ex1_game(p), c);
  EXPECT_FALSE(s.report.converged);
  EXPECT_EQ(s.report.iterations, 1u);
  EXPECT_FALSE(s.report.message.empty());
}

TEST(NPlayer, RejectsBadConfig) {
  LQParams p;
  NPlayerConfig c = small(1u << 10, 10);
  c.picard.tol = 0.0;
  EXPECT_THROW(solve_nplayer(ex1_game(p), c), ModelError);
}

TEST(FeedbackLaw, BlendIsConvexCombination) {
  FeedbackLaw a(3, 2, RegressionBasis{1, 0.0});
  FeedbackLaw b(3, 2, RegressionBasis{1, 0.0});
  for (double& v : a.z(1, 0, 1)) v = 2.0;
  for (double& v : b.z(1, 0, 1)) v = 4.0;
  a.blend(b, 0.25);
  for (double v : a.z(1, 0, 1)) EXPECT_DOUBLE_EQ(v, 2.5);
}

}  // namespace
}  // namespace tigames
