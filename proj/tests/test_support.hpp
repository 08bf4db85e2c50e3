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
#include <cmath>

#include "precis/model.hpp"
#include "precis/rng.hpp"

namespace testsup {

/// Three standardized indicators, loadings .3/.5/.7, standard normal factor.
inline precis::LinearFactorModel one_factor_example() {
  precis::LinearFactorModel m;
  m.intercepts = Eigen::Vector3d::Zero();
  m.loadings = Eigen::Vector3d(0.3, 0.5, 0.7);
  m.unique_covariance = Eigen::Vector3d(0.91, 0.75, 0.51).asDiagonal();
  m.latent = precis::LatentDistribution::standard_normal(1);
  return m;
}

/// Three binary items, intercepts 1/0/-2, slopes 1/1.5/2, standard normal LV.
inline precis::TwoPLModel two_pl_example() {
  precis::TwoPLModel m;
  m.intercepts = Eigen::Vector3d(1.0, 0.0, -2.0);
  m.slopes = Eigen::Vector3d(1.0, 1.5, 2.0);
  m.latent = precis::LatentDistribution::standard_normal(1);
  return m;
}

inline precis::HurdleItemPair hurdle_pair(double pres_slope, double pres_threshold,
                                          double freq_slope, double freq_t1, double freq_t2) {
  precis::HurdleItemPair p;
  p.presence.slopes = Eigen::Vector2d(pres_slope, 0.0);
  p.presence.thresholds = {pres_threshold};
  p.frequency.slopes = Eigen::Vector2d(0.0, freq_slope);
  p.frequency.thresholds = {freq_t1, freq_t2};
  return p;
}

inline precis::HurdleGradedModel small_hurdle_example(double rho = 0.58) {
  precis::HurdleGradedModel m;
  m.pairs.push_back(hurdle_pair(1.4, 0.2, 1.1, -0.8, 0.6));
  m.pairs.push_back(hurdle_pair(1.8, 0.5, 1.4, -0.5, 0.9));
  m.latent = precis::LatentDistribution::correlated_pair(rho);
  return m;
}

/// Random standardized one-factor model: loadings U(.2, .9), uniquenesses
/// 1 - lambda^2.
inline precis::LinearFactorModel random_one_factor(precis::Rng& rng, int m_items = 4) {
  precis::LinearFactorModel m;
  m.intercepts = Eigen::VectorXd::Zero(m_items);
  m.loadings.resize(m_items, 1);
  Eigen::VectorXd theta(m_items);
  for (int j = 0; j < m_items; ++j) {
    double lambda = 0.2 + 0.7 * rng.uniform01();
    m.loadings(j, 0) = lambda;
    theta(j) = 1.0 - lambda * lambda;
  }
  m.unique_covariance = theta.asDiagonal();
  m.latent = precis::LatentDistribution::standard_normal(1);
  return m;
}

inline precis::TwoPLModel random_two_pl(precis::Rng& rng, int m_items) {
  precis::TwoPLModel m;
  m.intercepts.resize(m_items);
  m.slopes.resize(m_items, 1);
  for (int j = 0; j < m_items; ++j) {
    m.intercepts(j) = -1.5 + 3.0 * rng.uniform01();
    m.slopes(j, 0) = 0.5 + 2.0 * rng.uniform01();
  }
  m.latent = precis::LatentDistribution::standard_normal(1);
  return m;
}

inline double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd ac = a.array() - a.mean();
  Eigen::VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace testsup
