// Copyright 2026 The Precis Authors. All Rights Reserved.
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

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "precis/model.hpp"
#include "precis/report.hpp"

namespace precis {

/// Numerically stable streaming moments (Welford / Chan et al. merge form).
class OnlineMoments {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const OnlineMoments& o);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sum_sq_dev() const { return m2_; }
  double variance() const { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Streaming bivariate moments for simple linear regression.
class OnlineComoments {
 public:
  void add(double x, double y);
  void merge(const OnlineComoments& o);
  std::size_t count() const { return n_; }
  double mean_x() const { return mean_x_; }
  double mean_y() const { return mean_y_; }
  double sxx() const { return m2x_; }
  double syy() const { return m2y_; }
  double sxy() const { return cxy_; }

 private:
  std::size_t n_ = 0;
  double mean_x_ = 0.0, mean_y_ = 0.0;
  double m2x_ = 0.0, m2y_ = 0.0, cxy_ = 0.0;
};

/// Result of one regression fit: R^2 = 1 - SSE/SST = Var(fitted)/Var(outcome)
/// (both identities hold because every fit here contains the mean).
struct RegressionFit {
  double r_squared = 0.0;
  double fitted_variance = 0.0;
  double residual_variance = 0.0;
  std::string regressor;
  double intercept = std::numeric_limits<double>::quiet_NaN();  // simple-linear only
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

/// Saturated group-mean regression: fitted value per row is the mean outcome
/// within its response-pattern group. R^2 = between-group / total variance.
/// Throws DegenerateOutcome when the outcome has zero variance.
RegressionFit fit_pattern_means(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const Eigen::Ref<const Eigen::MatrixXd>& patterns);

RegressionFit fit_pattern_means(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const std::vector<ResponsePattern>& patterns);

/// OLS with intercept; R^2 is the squared sample correlation. Throws
/// DegenerateRegressor / DegenerateOutcome on zero-variance input.
RegressionFit fit_simple_linear(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const Eigen::Ref<const Eigen::VectorXd>& regressor);

/// Clamped cubic B-spline basis with interior knots at empirical quantiles.
/// df is the number of basis functions (>= 4); duplicated quantiles are
/// dropped, which lowers the effective df on heavily discrete data.
struct BsplineBasis {
  Eigen::VectorXd knots;  // full clamped knot vector
  int n_basis = 0;

  static BsplineBasis from_quantiles(const Eigen::Ref<const Eigen::VectorXd>& data, int df);

  /// The four non-zero cubic basis values at x (clamped to the knot range).
  /// `first` is the index of the first of the four.
  void eval(double x, int& first, double out[4]) const;
};

/// Fitted unpenalized spline (tensor product for d = 2), evaluable anywhere.
struct SplineModel {
  std::vector<BsplineBasis> bases;
  Eigen::VectorXd coef;

  double operator()(double x) const;
  double operator()(double x, double y) const;
};

struct SplineFit {
  RegressionFit fit;
  SplineModel model;
};

/// Least-squares fit of the outcome on a cubic B-spline basis over 1 or 2
/// regressors (tensor-product columns for d = 2), normal equations solved by
/// column-pivoted QR. Throws IllConditionedBasis on rank-deficient bases.
SplineFit fit_spline_surface(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                             const Eigen::Ref<const Eigen::MatrixXd>& regressors,
                             int df_per_dim = 8);

struct ReportMeta {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t model_hash = 0;
  std::string score;
  EstimationMethod method = EstimationMethod::McNonparametric;
};

/// Wraps a fit's R^2 as a PrecisionReport with a delta-method 95% half-width
/// (asymptotic variance of a squared correlation: 4 r^2 (1 - r^2)^2 / n).
PrecisionReport r_squared_report(const RegressionFit& fit, CoefficientKind kind,
                                 const ReportMeta& meta = {});

}  // namespace precis
