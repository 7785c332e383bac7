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

#include "tigames/regression.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

namespace tigames {

void RegressionBasis::validate() const {
  if (degree < 0 || degree > 3) throw RegressionError("basis degree must be in [0, 3]", 0.0);
  if (!(ridge >= 0.0)) throw RegressionError("ridge must be >= 0", 0.0);
}

std::size_t RegressionBasis::size(bool with_mean) const {
  const auto d = static_cast<std::size_t>(degree);
  return with_mean ? (d + 1) * (d + 2) / 2 : d + 1;
}

void RegressionBasis::features(double x, double xbar, bool with_mean, std::span<double> out) const {
  std::size_t c = 0;
  for (int total = 0; total <= degree; ++total) {
    if (!with_mean) {
      out[c++] = std::pow(x, total);
      continue;
    }
    for (int q = 0; q <= total; ++q) {
      out[c++] = std::pow(x, total - q) * std::pow(xbar, q);
    }
  }
}

struct LeastSquaresProjector::Impl {
  Eigen::MatrixXd phi;  // column-scaled design
  Eigen::VectorXd scale;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double cond = 0.0;
  double ridge = 0.0;
};

LeastSquaresProjector::LeastSquaresProjector(std::span<const double> design, std::size_t rows,
                                             std::size_t cols, double ridge)
    : impl_(std::make_unique<Impl>()) {
  if (cols == 0 || design.size() != rows * cols) {
    throw RegressionError("design matrix has inconsistent size", 0.0);
  }
  if (rows <= cols) throw RegressionError("need more samples than basis functions", 0.0);
  if (!(ridge >= 0.0)) throw RegressionError("ridge must be >= 0", 0.0);
  Impl& s = *impl_;
  s.phi = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      design.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double m = static_cast<double>(rows);
  s.scale.resize(static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < s.phi.cols(); ++j) {
    const double rms = std::sqrt(s.phi.col(j).squaredNorm() / m);
    s.scale(j) = rms > 0.0 && std::isfinite(rms) ? rms : 1.0;
    s.phi.col(j) /= s.scale(j);
  }
  if (!s.phi.allFinite()) throw RegressionError("non-finite regression features", 0.0);
  Eigen::MatrixXd gram = s.phi.transpose() * s.phi / m;
  // Singular values of Phi from its R factor; the Gram spectrum loses half the digits.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(s.phi);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(s.phi.cols()).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  const double lmax = sv(0) * sv(0) / m, lmin = sv(sv.size() - 1) * sv(sv.size() - 1) / m;
  s.cond = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();
  s.ridge = ridge;
  if (s.ridge == 0.0 && s.cond > kAutoRidgeCondition) s.ridge = 1e-8;
  const double cond_after = std::sqrt((lmax + s.ridge) / std::max(lmin + s.ridge, 0.0));
  if (!(cond_after < kRankDeficientCondition)) {
    throw RegressionError("design rank deficient after ridge (condition number " +
                              std::to_string(s.cond) + ")",
                          s.cond);
  }
  gram.diagonal().array() += s.ridge;
  s.llt.compute(gram);
  if (s.llt.info() != Eigen::Success) {
    throw RegressionError("normal equations not positive definite", s.cond);
  }
}

LeastSquaresProjector::~LeastSquaresProjector() = default;
LeastSquaresProjector::LeastSquaresProjector(LeastSquaresProjector&&) noexcept = default;
LeastSquaresProjector& LeastSquaresProjector::operator=(LeastSquaresProjector&&) noexcept = default;

std::size_t LeastSquaresProjector::rows() const { return static_cast<std::size_t>(impl_->phi.rows()); }
std::size_t LeastSquaresProjector::cols() const { return static_cast<std::size_t>(impl_->phi.cols()); }
double LeastSquaresProjector::condition_number() const { return impl_->cond; }
double LeastSquaresProjector::ridge_used() const { return impl_->ridge; }

std::vector<double> LeastSquaresProjector::fit_with_coefficients(std::span<const double> targets,
                                                                 std::span<double> fitted) const {
  const Impl& s = *impl_;
  if (targets.size() != rows()) throw RegressionError("target length mismatch", s.cond);
  Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const Eigen::VectorXd c = s.llt.solve(s.phi.transpose() * y / static_cast<double>(rows()));
  if (!c.allFinite()) throw RegressionError("non-finite regression output", s.cond);
  if (!fitted.empty()) {
    Eigen::Map<Eigen::VectorXd> f(fitted.data(), static_cast<Eigen::Index>(fitted.size()));
    f.noalias() = s.phi * c;
  }
  std::vector<double> out(cols());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = c(static_cast<Eigen::Index>(j)) / s.scale(static_cast<Eigen::Index>(j));
  }
  return out;
}

std::vector<double> LeastSquaresProjector::coefficients(std::span<const double> targets) const {
  return fit_with_coefficients(targets, {});
}

void LeastSquaresProjector::fit(std::span<const double> targets, std::span<double> fitted) const {
  fit_with_coefficients(targets, fitted);
}

RegressionResult regress_conditional_expectation(std::span<const double> targets,
                                                 std::span<const double> features,
                                                 std::size_t num_features, double ridge) {
  if (num_features == 0 || features.size() % num_features != 0) {
    throw RegressionError("feature matrix has inconsistent size", 0.0);
  }
  const std::size_t rows = features.size() / num_features;
  LeastSquaresProjector proj(features, rows, num_features, ridge);
  RegressionResult r;
  r.fitted.resize(rows);
  r.coefficients = proj.fit_with_coefficients(targets, r.fitted);
  r.condition_number = proj.condition_number();
  r.ridge_used = proj.ridge_used();
  return r;
}

double evaluate(std::span<const double> coefficients, std::span<const double> features) {
  double s = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * features[j];
  return s;
}

}  // namespace tigames
