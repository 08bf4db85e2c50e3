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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "precis/model.hpp"
#include "precis/quadrature.hpp"

namespace precis {

/// One simulated sample: latent draws and the manifest vectors they imply.
/// Responses hold internal category codes (discrete models) or reals
/// (linear models); structural NA is stored as NaN.
struct McSample {
  std::size_t n = 0;
  Eigen::MatrixXd latents;    // n x d
  Eigen::MatrixXd responses;  // n x n_manifest
  std::uint64_t seed = 0;
  ModelSpec model;
};

/// i.i.d. multivariate-normal draws, deterministic given the seed and
/// independent of block partitioning. Singular PSD covariances fall back to
/// an eigenvalue square root with negatives clipped at zero (warns once).
Eigen::MatrixXd sample_latents(const LatentDistribution& latent, std::size_t n,
                               std::uint64_t seed);

/// Model-consistent responses for given latent rows. Hurdle stage 2 is drawn
/// only when stage 1 = 1, otherwise NA.
Eigen::MatrixXd simulate_responses(const ModelSpec& spec, const Eigen::MatrixXd& latents,
                                   std::uint64_t seed);

McSample make_mc_sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

/// Per-row observed scores. EAP scores are computed once per distinct
/// pattern and reused; linear-factor EAP scores use the closed-form weights.
Eigen::VectorXd compute_observed_scores(const ModelSpec& spec,
                                        const Eigen::MatrixXd& responses,
                                        const ScoreDefinition& score,
                                        const QuadratureGrid& grid);

/// Per-row latent scores (LV component or true summed score).
Eigen::VectorXd compute_latent_scores(const ModelSpec& spec,
                                      const Eigen::MatrixXd& latents,
                                      const ScoreDefinition& score,
                                      const QuadratureGrid& grid);

ResponsePattern pattern_row(const Eigen::MatrixXd& responses, std::size_t row);

/// CSV dump: eta_1..eta_d, y_1..y_m, then any extra score columns; discrete
/// values are written as category values, NA as an empty field.
void dump_sample_csv(std::ostream& out, const McSample& sample,
                     const std::vector<std::pair<std::string, Eigen::VectorXd>>& scores);

/// Worker threads used for row-parallel loops; PRECISION_THREADS caps it.
int worker_count();

}  // namespace precis
