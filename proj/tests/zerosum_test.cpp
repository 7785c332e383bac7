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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tigames/presets.hpp"
#include "tigames/rng.hpp"
#include "tigames/zerosum.hpp"

namespace tigames {
namespace {

ZeroSumConfig small(std::uint64_t seed = 31) {
  ZeroSumConfig c;
  c.grid = TimeGrid{1.0, 20};
  c.paths = 1u << 11;
  c.seed = seed;
  return c;
}

LQParams params() {
  LQParams p;
  p.gamma = 0.5;
  return p;
}

TEST(Isaacs, SeparableCostsHaveNoGap) {
  const ZeroSumSpec spec = lq_zero_sum(params());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int r = 0; r < 200; ++r) {
    const double z = u(rng);
    const SaddlePoint s = isaacs_gap(spec, 0.3, u(rng), z);
    EXPECT_EQ(s.gap, 0.0);
    // inf_a a^2 + z a at -z/2, sup_at -at^2/2 + z at at z.
    EXPECT_NEAR(s.a, -0.5 * z, 0.5 * spec.control_set.spacing() + 1e-12);
    EXPECT_NEAR(s.at, z, 0.5 * spec.control_set.spacing() + 1e-12);
    EXPECT_NEAR(s.upper, 0.25 * z * z, 0.1);
  }
}

ZeroSumSpec coupled() {
  ZeroSumSpec spec = lq_zero_sum(params());
  spec.running_f = [](double, double, double a, double at) { return (a - at) * (a - at); };
  spec.control_set = ControlSet{-1.0, 1.0, 81};
  // Flat terminal reward keeps Z at 0, where the gap is largest.
  spec.terminal_g = [](double) { return 0.0; };
  spec.G = [](double) { return 0.0; };
  spec.dG = [](double) { return 0.0; };
  spec.d2G = [](double) { return 0.0; };
  return spec;
}

TEST(Isaacs, CoupledCostsHaveGap) {
  const ZeroSumSpec spec = coupled();
  const SaddlePoint s = isaacs_gap(spec, 0.0, 0.0, 0.0);
  EXPECT_NEAR(s.upper, 1.0, 1e-12);
  EXPECT_NEAR(s.lower, 0.0, 1e-12);
  EXPECT_NEAR(s.gap, 1.0, 1e-12);
  EXPECT_LT(isaacs_tolerance(spec, 0.0, 0.0, 0.0), s.gap);
}

TEST(Isaacs, SolverRaisesOnViolation) {
  try {
    solve_zero_sum(coupled(), small());
    FAIL() << "expected IsaacsViolation";
  } catch (const IsaacsViolation& e) {
    EXPECT_GT(e.gap, e.tolerance);
  }
}

class ZeroSumSolved : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const ZeroSumSpec spec = lq_zero_sum(params());
    first_ = new ZeroSumSolution(solve_zero_sum(spec, small(31), ZeroSumSide::kMaximiser));
    second_ = new ZeroSumSolution(solve_zero_sum(spec, small(mix_seed(31, 2)), ZeroSumSide::kMinimiser));
  }
  static void TearDownTestSuite() {
    delete first_;
    delete second_;
  }
  static ZeroSumSolution* first_;
  static ZeroSumSolution* second_;
};

ZeroSumSolution* ZeroSumSolved::first_ = nullptr;
ZeroSumSolution* ZeroSumSolved::second_ = nullptr;

TEST_F(ZeroSumSolved, ValueMatchesClosedForm) {
  const double ref = lq_zero_sum_value(params(), 0.0, 0.0);
  EXPECT_NEAR(first_->y0(), ref, 0.02);
  EXPECT_NEAR(second_->y0(), -ref, 0.02);
  EXPECT_NEAR(first_->z0(), 1.0, 0.1);
  EXPECT_EQ(first_->max_gap, 0.0);
}

TEST_F(ZeroSumSolved, Antisymmetry) {
  const AntisymmetryReport r = antisymmetry_check(*first_, *second_);
  EXPECT_TRUE(r.pass) << r.y_defect << " vs " << r.y_se << ", " << r.z_defect << " vs " << r.z_se;
  EXPECT_GT(r.y_se, 0.0);
}

TEST_F(ZeroSumSolved, SaddleControls) {
  const std::size_t m = first_->paths();
  for (std::size_t p = 0; p < m; p += 37) {
    EXPECT_NEAR(first_->a[5 * m + p], -0.5 * first_->Z[5 * m + p], 0.06);
    EXPECT_NEAR(first_->at[5 * m + p], first_->Z[5 * m + p], 0.06);
  }
}

TEST_F(ZeroSumSolved, MaximiserDeviationsDoNotPay) {
  for (double dev : {-1.0, 0.0, 2.0}) {
    const Estimate g = zero_sum_deviation_gap(*first_, dev, 5, 1u << 12, 8);
    EXPECT_GE(g.value, -3.0 * g.se) << dev;
  }
  const Estimate far = zero_sum_deviation_gap(*first_, -2.0, 10, 1u << 12, 8);
  EXPECT_GT(far.value, 3.0 * far.se);
}

TEST_F(ZeroSumSolved, TableShape) {
  const auto rows = zero_sum_table(*first_, *second_);
  ASSERT_EQ(rows.size(), 21u);
  for (const auto& r : rows) ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(rows.back()[0], 1.0);
}

TEST(ZeroSum, SpecValidation) {
  ZeroSumSpec s;
  EXPECT_THROW(s.validate(), ModelError);
}

}  // namespace
}  // namespace tigames
