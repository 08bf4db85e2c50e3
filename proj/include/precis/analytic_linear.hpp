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

#include "precis/model.hpp"

namespace precis {

/// Weights of a linear observed score w' y + offset.
struct LinearScoreWeights {
  Eigen::VectorXd weights;
  double offset = 0.0;
};

/// Regression factor score weights for a one-factor model:
/// w = lambda' Theta^{-1} / (lambda' Theta^{-1} lambda + 1/psi), offset -w'nu.
/// Requires d = 1; throws SingularTheta when Theta is not invertible
/// (condition number above 1e12).
LinearScoreWeights regression_score_weights(const LinearFactorModel& model);

/// Reliability of the regression (EAP) factor score,
/// lambda' Theta^{-1} lambda / (lambda' Theta^{-1} lambda + 1/psi). d = 1.
double reliability_eap_factor(const LinearFactorModel& model);

/// Slope of the true EAP score on eta; numerically identical to
/// reliability_eap_factor.
double true_eap_slope(const LinearFactorModel& model);

/// Coefficient omega: psi (1'lambda)^2 / (psi (1'lambda)^2 + tr Theta). d = 1.
double reliability_summed_factor(const LinearFactorModel& model);

/// Cronbach's alpha from a manifest covariance matrix (model-implied or
/// empirical): (m/(m-1)) (1 - tr(S) / 1'S1). Throws DegenerateSum when the
/// summed-score variance is zero.
double coefficient_alpha(const Eigen::MatrixXd& covariance);

/// PRMSE of the latent variable; shares its closed form with
/// reliability_eap_factor.
double prmse_lv_factor(const LinearFactorModel& model);

/// Observed EAP score of the true summed score: 1'(nu + lambda * eta_tilde).
double eap_of_true_summed_factor(const LinearFactorModel& model, double eta_tilde);

/// Model-implied manifest covariance Lambda Psi Lambda' + Theta.
Eigen::MatrixXd implied_covariance(const LinearFactorModel& model);

/// Reliability of an arbitrary linear score w'y under a (possibly
/// multidimensional) linear factor model:
/// w' Lambda Psi Lambda' w / w' (Lambda Psi Lambda' + Theta) w.
/// A direct generalization of the summed-score variance decomposition.
double reliability_linear_score(const LinearFactorModel& model,
                                const Eigen::VectorXd& score_weights);

}  // namespace precis
