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
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "tigames/lq.hpp"
#include "tigames/meanfield.hpp"
#include "tigames/presets.hpp"

namespace tigames {
namespace {

LQParams params() {
  LQParams p;
  p.kappa1 = 0.5;
  p.kappa2 = 0.5;
  p.gamma = 0.5;
  return p;
}

MeanFieldConfig small() {
  MeanFieldConfig c;
  c.grid = TimeGrid{1.0, 20};
  c.particles = 1u << 12;
  c.seed = 5;
  return c;
}

GameSpec game(double x0 = 0.3) {
  GameSpec s = rep_meanfield_game(params());
  s.initial_mean = x0;
  return s;
}

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

class MeanFieldSolved : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { sol_ = new MeanFieldSolution(solve_meanfield(game(), small())); }
  static void TearDownTestSuite() {
    delete sol_;
    sol_ = nullptr;
  }
  static MeanFieldSolution* sol_;
};

MeanFieldSolution* MeanFieldSolved::sol_ = nullptr;

TEST_F(MeanFieldSolved, Converges) {
  EXPECT_TRUE(sol_->report.converged);
  EXPECT_LE(sol_->report.iterations, 10u);
  EXPECT_LT(sol_->report.distance.back(), sol_->report.tolerance);
  EXPECT_EQ(sol_->report.distance.size(), sol_->report.iterations);
}

TEST_F(MeanFieldSolved, ValueMatchesClosedForm) {
  const double ref = rep_meanfield(params(), 0.0, 0.3).Y;
  std::vector<double> y0 = meanfield_value_process(*sol_, 0.0);
  EXPECT_NEAR(mean_of(y0), ref, 0.02 * std::abs(ref));
}

TEST_F(MeanFieldSolved, FlowMomentsMatchClosedForm) {
  const LQParams p = params();
  const LawFlow& flow = *sol_->flow;
  for (std::size_t k : {5u, 10u, 20u}) {
    const double s = flow.grid().time(k);
    const LawView v = flow.view(k);
    const double sd = std::sqrt(v.variance_state());
    const double se = sd / std::sqrt(static_cast<double>(flow.particles()));
    EXPECT_NEAR(v.mean_state, rep_meanfield_mean(p, 0.0, 0.3, s), 4.0 * se + 0.01);
    EXPECT_NEAR(v.variance_state(), rep_meanfield_variance(p, 0.0, s), 0.05);
  }
}

TEST_F(MeanFieldSolved, ControlIsClosedFormFeedback) {
  const LQParams p = params();
  for (std::size_t k : {0u, 10u, 19u}) {
    const double t = sol_->ensemble.grid().time(k);
    EXPECT_NEAR(mean_of(sol_->ensemble.controls_at(k, 0)), std::exp(t - 1.0), 0.05);
  }
}

TEST_F(MeanFieldSolved, TerminalValue) {
  const std::vector<double> yT = meanfield_value_process(*sol_, 1.0);
  for (std::size_t q = 0; q < yT.size(); q += 101) EXPECT_NEAR(yT[q], sol_->ensemble.x(q, 0, 20), 1e-12);
}

TEST_F(MeanFieldSolved, WarmStartFromSolvedFlow) {
  const MeanFieldSolution again = solve_meanfield(game(), small(), sol_->flow);
  EXPECT_TRUE(again.report.converged);
  EXPECT_LE(again.report.iterations, sol_->report.iterations);
  EXPECT_LT(again.report.distance.front(), sol_->report.distance.front());
}

TEST_F(MeanFieldSolved, TableRows) {
  const auto rows = meanfield_table(*sol_);
  ASSERT_EQ(rows.size(), sol_->report.iterations);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    EXPECT_EQ(rows[j][0], static_cast<double>(j + 1));
    EXPECT_EQ(rows[j].size(), 4u);
  }
}

TEST(MeanField, IterationLimitReported) {
  MeanFieldConfig c = small();
  c.max_outer = 1;
  const MeanFieldSolution s = solve_meanfield(game(), c);
  EXPECT_FALSE(s.report.converged);
  EXPECT_FALSE(s.report.message.empty());
}

TEST(MeanField, DampedIterationConverges) {
  MeanFieldConfig c = small();
  c.damping = 0.7;
  c.max_outer = 20;
  const MeanFieldSolution s = solve_meanfield(game(), c);
  EXPECT_TRUE(s.report.converged);
}

TEST(MeanField, Deterministic) {
  MeanFieldConfig c = small();
  c.particles = 1024;
  const MeanFieldSolution a = solve_meanfield(game(), c);
  const MeanFieldSolution b = solve_meanfield(game(), c);
  EXPECT_TRUE(a.ensemble.bitwise_equal(b.ensemble));
  EXPECT_EQ(a.Y, b.Y);
}

TEST(LawFlow, DistanceProperties) {
  const TimeGrid grid{1.0, 4};
  LawFlow a(grid, 8), b(grid, 8);
  for (std::size_t k = 0; k <= 4; ++k) {
    for (std::size_t q = 0; q < 8; ++q) {
      a.states(k)[q] = 0.1 * static_cast<double>(q * (k + 1));
      b.states(k)[q] = a.states(k)[q] + (k == 2 ? 0.5 : 0.1);
      if (k < 4) {
        a.controls(k)[q] = -0.2 * static_cast<double>(q);
        b.controls(k)[q] = a.controls(k)[q] - 0.25;
      }
    }
  }
  EXPECT_EQ(lawflow_distance(a, a), 0.0);
  EXPECT_NEAR(lawflow_distance(a, b), 0.75, 1e-12);
  EXPECT_NEAR(lawflow_distance(b, a), 0.75, 1e-12);
}

TEST(LawFlow, NStarUsesTerminalLaw) {
  GameSpec s = game();
  s.phi2 = [](const LawView& law) { return law.variance_state(); };
  const std::vector<double> xs{1.0, 3.0};
  EXPECT_DOUBLE_EQ(n_star(s, xs), 1.0);
}

}  // namespace
}  // namespace tigames
