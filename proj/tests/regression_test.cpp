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

#include "tigames/regression.hpp"

namespace tigames {
namespace {

std::vector<double> design(const RegressionBasis& b, const std::vector<double>& x,
                           const std::vector<double>& xbar, bool with_mean) {
  const std::size_t p = b.size(with_mean);
  std::vector<double> d(x.size() * p);
  for (std::size_t r = 0; r < x.size(); ++r) {
    b.features(x[r], xbar.empty() ? 0.0 : xbar[r], with_mean, std::span<double>(d.data() + r * p, p));
  }
  return d;
}

TEST(Basis, SizesAndMonomials) {
  const RegressionBasis b{2, 0.0};
  EXPECT_EQ(b.size(false), 3u);
  EXPECT_EQ(b.size(true), 6u);
  std::vector<double> f(6);
  b.features(2.0, 3.0, true, f);
  EXPECT_EQ(f, (std::vector<double>{1.0, 2.0, 3.0, 4.0, 6.0, 9.0}));
  EXPECT_THROW((RegressionBasis{4, 0.0}.validate()), RegressionError);
  EXPECT_THROW((RegressionBasis{2, -1.0}.validate()), RegressionError);
}

TEST(Projector, RecoversExactPolynomial) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> x(500), xbar(500), y(500);
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = nd(rng);
    xbar[r] = nd(rng);
    y[r] = 1.5 - 2.0 * x[r] + 0.5 * xbar[r] + 0.25 * x[r] * x[r] - x[r] * xbar[r];
  }
  const RegressionBasis b{2, 0.0};
  const std::vector<double> d = design(b, x, xbar, true);
  const RegressionResult r = regress_conditional_expectation(y, d, 6, 0.0);
  const std::vector<double> want{1.5, -2.0, 0.5, 0.25, -1.0, 0.0};
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(r.coefficients[j], want[j], 1e-10);
  for (std::size_t k = 0; k < y.size(); ++k) EXPECT_NEAR(r.fitted[k], y[k], 1e-10);
  EXPECT_EQ(r.ridge_used, 0.0);
}

TEST(Projector, ConditionalExpectationOfNoisyTarget) {
  // E[x^2 + eps | x] = x^2 for independent noise.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<double> x(1 << 15), y(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = nd(rng);
    y[r] = x[r] * x[r] + nd(rng);
  }
  const RegressionBasis b{2, 0.0};
  LeastSquaresProjector proj(design(b, x, {}, false), x.size(), 3, 0.0);
  const std::vector<double> c = proj.coefficients(y);
  EXPECT_NEAR(c[0], 0.0, 0.03);
  EXPECT_NEAR(c[1], 0.0, 0.03);
  EXPECT_NEAR(c[2], 1.0, 0.03);
}

TEST(Projector, FittedValuesAreOrthogonalProjection) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(300), y(300), fitted(300);
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = nd(rng);
    y[r] = std::sin(3.0 * x[r]);
  }
  const RegressionBasis b{3, 0.0};
  const std::vector<double> d = design(b, x, {}, false);
  LeastSquaresProjector proj(d, x.size(), 4, 0.0);
  proj.fit(y, fitted);
  for (std::size_t j = 0; j < 4; ++j) {
    double dot = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) dot += d[r * 4 + j] * (y[r] - fitted[r]);
    EXPECT_NEAR(dot / 300.0, 0.0, 1e-10);
  }
  // Projection is idempotent.
  std::vector<double> twice(300);
  proj.fit(fitted, twice);
  for (std::size_t r = 0; r < x.size(); ++r) EXPECT_NEAR(twice[r], fitted[r], 1e-10);
}

TEST(Projector, AutoRidgeOnNearCollinearDesign) {
  std::vector<double> x(200), xbar(200), y(200);
  for (std::size_t r = 0; r < x.size(); ++r) {
    x[r] = static_cast<double>(r) / 200.0;
    xbar[r] = x[r] * (1.0 + 1e-12);
    y[r] = x[r];
  }
  const RegressionBasis b{1, 0.0};
  LeastSquaresProjector proj(design(b, x, xbar, true), x.size(), 3, 0.0);
  EXPECT_GT(proj.condition_number(), kAutoRidgeCondition);
  EXPECT_EQ(proj.ridge_used(), 1e-8);
  std::vector<double> fitted(200);
  proj.fit(y, fitted);
  for (std::size_t r = 0; r < x.size(); ++r) EXPECT_NEAR(fitted[r], y[r], 1e-3);
}

TEST(Projector, RejectsTooFewRows) {
  const std::vector<double> d{1.0, 2.0, 1.0, 3.0};
  EXPECT_THROW(LeastSquaresProjector(d, 2, 2, 0.0), RegressionError);
}

TEST(Projector, RankDeficientDesign) {
  std::vector<double> d(2 * 50, 1.0);
  // Ridge is added automatically when none was requested.
  EXPECT_EQ(LeastSquaresProjector(d, 50, 2, 0.0).ridge_used(), 1e-8);
  try {
    LeastSquaresProjector(d, 50, 2, 1e-30);
    FAIL() << "expected RegressionError";
  } catch (const RegressionError& e) {
    EXPECT_GT(e.condition_number(), kRankDeficientCondition);
  }
}

TEST(Evaluate, DotProduct) {
  const std::vector<double> c{1.0, 2.0, 3.0}, f{1.0, -1.0, 0.5};
  EXPECT_DOUBLE_EQ(evaluate(c, f), 0.5);
}

}  // namespace
}  // namespace tigames
