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

// Ridge least squares used as a conditional-expectation estimator.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tigames {

class RegressionError : public std::runtime_error {
 public:
  RegressionError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}
  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

/// Monomials x^p * xbar^q with p + q <= degree.  `xbar` is the cross-player
/// state mean and is dropped for single-player ensembles.
struct RegressionBasis {
  int degree = 2;
  double ridge = 0.0;

  void validate() const;
  std::size_t size(bool with_mean) const;
  void features(double x, double xbar, bool with_mean, std::span<double> out) const;
};

/// Ridge parameter added automatically once cond(design) exceeds this.
inline constexpr double kAutoRidgeCondition = 1e10;
/// Designs still this ill-conditioned after the ridge are rejected.
inline constexpr double kRankDeficientCondition = 1e12;

/// Factorisation of a design matrix, reusable for many targets.
///
/// Columns are scaled to unit root-mean-square before solving
///   (Phi^T Phi / M + ridge I) c = Phi^T y / M.
/// If cond(Phi) > 1e10 with ridge 0, a ridge of 1e-8 is applied.
class LeastSquaresProjector {
 public:
  /// `design` is M x p, row-major.
  LeastSquaresProjector(std::span<const double> design, std::size_t rows, std::size_t cols,
                        double ridge);
  ~LeastSquaresProjector();
  LeastSquaresProjector(LeastSquaresProjector&&) noexcept;
  LeastSquaresProjector& operator=(LeastSquaresProjector&&) noexcept;

  std::size_t rows() const;
  std::size_t cols() const;
  /// Condition number of the column-scaled design before ridge.
  double condition_number() const;
  double ridge_used() const;

  /// Coefficients in the original (unscaled) feature coordinates.
  std::vector<double> coefficients(std::span<const double> targets) const;
  /// Fitted values Phi c.
  void fit(std::span<const double> targets, std::span<double> fitted) const;
  /// Both at once.
  std::vector<double> fit_with_coefficients(std::span<const double> targets,
                                            std::span<double> fitted) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RegressionResult {
  std::vector<double> coefficients;
  std::vector<double> fitted;
  double condition_number = 0.0;
  double ridge_used = 0.0;
};

/// One-shot ridge regression of `targets` on the M x p row-major `features`.
RegressionResult regress_conditional_expectation(std::span<const double> targets,
                                                 std::span<const double> features,
                                                 std::size_t num_features, double ridge);

/// Dot product of coefficients with a feature row.
double evaluate(std::span<const double> coefficients, std::span<const double> features);

}  // namespace tigames
