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

#include "precis/analytic_linear.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "detail/linear_ops.hpp"

namespace precis {
namespace {

constexpr double kConditionLimit = 1e12;

/// Theta^{-1} v via a symmetric eigendecomposition with a condition check.
Eigen::MatrixXd theta_solve(const LinearFactorModel& model, const Eigen::MatrixXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.unique_covariance);
  const auto& ev = es.eigenvalues();
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (lo <= 0.0 || hi / lo > kConditionLimit)
    throw SingularTheta("unique covariance is singular or ill-conditioned");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose() * rhs;
}

void require_one_factor(const LinearFactorModel& model) {
  if (model.latent.dim() != 1)
    throw UnsupportedAnalytic("closed forms require a one-factor model (d = 1)");
}

double info(const LinearFactorModel& model) {  // lambda' Theta^{-1} lambda
  Eigen::VectorXd lambda = model.loadings.col(0);
  return lambda.dot(theta_solve(model, lambda).col(0));
}

}  // namespace

LinearScoreWeights regression_score_weights(const LinearFactorModel& model) {
  require_one_factor(model);
  Eigen::VectorXd lambda = model.loadings.col(0);
  Eigen::VectorXd ti_lambda = theta_solve(model, lambda);
  double psi = model.latent.covariance(0, 0);
  double denom = lambda.dot(ti_lambda) + 1.0 / psi;
  LinearScoreWeights w;
  w.weights = ti_lambda / denom;
  w.offset = -w.weights.dot(model.intercepts);
  return w;
}

double reliability_eap_factor(const LinearFactorModel& model) {
  require_one_factor(model);
  double a = info(model);
  double psi = model.latent.covariance(0, 0);
  // a / (a + 1/psi), written to stay finite as psi -> 0
  return psi * a / (psi * a + 1.0);
}

double true_eap_slope(const LinearFactorModel& model) { return reliability_eap_factor(model); }

double reliability_summed_factor(const LinearFactorModel& model) {
  require_one_factor(model);
  double psi = model.latent.covariance(0, 0);
  double ls = model.loadings.col(0).sum();
  double signal = psi * ls * ls;
  return signal / (signal + model.unique_covariance.trace());
}

double coefficient_alpha(const Eigen::MatrixXd& covariance) {
  const auto m = covariance.rows();
  if (m < 2 || covariance.cols() != m)
    throw ValidationError("coefficient alpha needs a square covariance with m >= 2");
  double total = covariance.sum();
  if (total <= 0.0) throw DegenerateSum("summed score has zero variance");
  double md = static_cast<double>(m);
  return md / (md - 1.0) * (1.0 - covariance.trace() / total);
}

double prmse_lv_factor(const LinearFactorModel& model) {
  // Identical closed form to the EAP-score reliability; the LV and the true
  // EAP score are perfectly correlated under this model.
  return reliability_eap_factor(model);
}

double eap_of_true_summed_factor(const LinearFactorModel& model, double eta_tilde) {
  require_one_factor(model);
  return model.intercepts.sum() + model.loadings.col(0).sum() * eta_tilde;
}

Eigen::MatrixXd implied_covariance(const LinearFactorModel& model) {
  return model.loadings * model.latent.covariance * model.loadings.transpose() +
         model.unique_covariance;
}

double reliability_linear_score(const LinearFactorModel& model,
                                const Eigen::VectorXd& score_weights) {
  if (score_weights.size() != model.n_items())
    throw ShapeMismatch("score weights length must equal the number of items");
  Eigen::MatrixXd common =
      model.loadings * model.latent.covariance * model.loadings.transpose();
  double signal = score_weights.dot(common * score_weights);
  double total = signal + score_weights.dot(model.unique_covariance * score_weights);
  if (total <= 0.0) throw DegenerateSum("score has zero variance");
  return signal / total;
}

namespace detail {

Eigen::MatrixXd linear_posterior_operator(const LinearFactorModel& model) {
  Eigen::MatrixXd sigma = implied_covariance(model);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw SingularTheta("manifest covariance cannot be factorized");
  Eigen::MatrixXd cross = model.latent.covariance * model.loadings.transpose();  // d x m
  return ldlt.solve(cross.transpose()).transpose();
}

std::pair<Eigen::VectorXd, double> latent_linear_coeffs(const LinearFactorModel& model,
                                                        const ScoreDefinition& latent) {
  const int d = model.latent.dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  double c0 = 0.0;
  switch (latent.kind) {
    case ScoreDefinition::Kind::LvComponent:
      c(latent.component) = 1.0;
      break;
    case ScoreDefinition::Kind::TrueSummed:
      c = model.loadings.colwise().sum().transpose();
      c0 = model.intercepts.sum();
      break;
    default:
      throw ValidationError("expected a latent score kind");
  }
  return {c, c0};
}

std::pair<Eigen::VectorXd, double> linear_eap_score_coeffs(const LinearFactorModel& model,
                                                           const ScoreDefinition& latent) {
  auto [c, c0] = latent_linear_coeffs(model, latent);
  Eigen::MatrixXd K = linear_posterior_operator(model);  // d x m
  Eigen::VectorXd r = K.transpose() * c;
  const Eigen::VectorXd& mu = model.latent.mean;
  double g = c.dot(mu) - r.dot(model.intercepts + model.loadings * mu) + c0;
  return {r, g};
}

}  // namespace detail
}  // namespace precis
