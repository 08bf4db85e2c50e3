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
#include <utility>

#include "precis/model.hpp"

namespace precis::detail {

/// Posterior-mean operator K = Psi Lambda' (Lambda Psi Lambda' + Theta)^{-1},
/// so E(eta | y) = mu + K (y - nu - Lambda mu). Throws SingularTheta when the
/// manifest covariance cannot be factorized.
Eigen::MatrixXd linear_posterior_operator(const LinearFactorModel& model);

/// Latent score as a linear form xi = c' eta + c0.
std::pair<Eigen::VectorXd, double> latent_linear_coeffs(const LinearFactorModel& model,
                                                        const ScoreDefinition& latent);

/// Observed EAP score of a latent target as r' y + g (exact for the linear
/// factor model).
std::pair<Eigen::VectorXd, double> linear_eap_score_coeffs(const LinearFactorModel& model,
                                                           const ScoreDefinition& latent);

}  // namespace precis::detail
