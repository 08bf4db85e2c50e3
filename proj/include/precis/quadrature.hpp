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
#include <vector>

#include "precis/model.hpp"

namespace precis {

/// Rectangular-rule grid approximating the latent density: equally spaced
/// nodes per dimension (tensor product for d = 2), weights proportional to
/// the normal density and renormalized to sum to exactly 1.
///
/// Node ordering for d = 2 is row-major: index = i0 * n1 + i1 with dimension
/// 0 outermost.
struct QuadratureGrid {
  Eigen::MatrixXd nodes;              // n_points x d
  Eigen::VectorXd weights;            // n_points, sums to 1
  std::vector<Eigen::VectorXd> axes;  // per-dimension node values

  int dim() const { return static_cast<int>(nodes.cols()); }
  int size() const { return static_cast<int>(nodes.rows()); }
};

/// Builds the default-style grid (61 nodes on [-6, 6] reproduces the
/// reference tables). d <= 2 only; throws GridTooCoarse for fewer than two
/// nodes per dimension.
QuadratureGrid build_grid(const LatentDistribution& latent, int nodes_per_dim,
                          double lo, double hi);

/// Gauss-Hermite alternative: probabilists' nodes and weights via the
/// Golub-Welsch eigenvalue method, scaled to the marginal latent
/// distributions. For correlated d = 2 latents the axis-aligned tensor grid
/// is reweighted by the joint-to-independent density ratio, then
/// renormalized.
QuadratureGrid build_gauss_hermite_grid(const LatentDistribution& latent, int nodes_per_dim);

/// P(y_j = k | eta). Discrete models only.
double item_response_prob(const ModelSpec& spec, int item, int category,
                          const Eigen::VectorXd& eta);

/// log P(y | eta) under local independence; structurally missing entries
/// contribute zero. Throws InadmissiblePattern.
double log_pattern_likelihood(const ModelSpec& spec, const ResponsePattern& y,
                              const Eigen::VectorXd& eta);

double pattern_likelihood(const ModelSpec& spec, const ResponsePattern& y,
                          const Eigen::VectorXd& eta);

/// P(y) = sum_i w_i P(y | node_i).
double marginal_probability(const ModelSpec& spec, const ResponsePattern& y,
                            const QuadratureGrid& grid);

/// Value of a latent score at one latent location. TrueSummed uses the
/// closed-form item expectation sum, so no grid is needed.
double latent_score_at(const ModelSpec& spec, const ScoreDefinition& latent_score,
                       const Eigen::VectorXd& eta);

/// E(summed score | eta); the test characteristic curve for the 2PL.
double expected_summed_score(const ModelSpec& spec, const Eigen::VectorXd& eta);

/// E(xi | y): posterior mean of a latent score given one response pattern.
/// Throws ZeroMarginal when P(y) underflows (below 1e-300).
double eap_score(const ModelSpec& spec, const ResponsePattern& y,
                 const ScoreDefinition& latent_target, const QuadratureGrid& grid);

/// Realized observed score of one pattern (summed scores need no grid; EAP
/// scores integrate over it).
double observed_score_value(const ModelSpec& spec, const ScoreDefinition& observed,
                            const ResponsePattern& y, const QuadratureGrid& grid);

/// True-score curve E(x | eta) of an observed score. Summed scores use the
/// closed-form expectation; EAP scores sum over the enumerated pattern space
/// (throws PatternSpaceTooLarge beyond `cap`).
double true_score_curve(const ModelSpec& spec, const ScoreDefinition& observed,
                        const Eigen::VectorXd& eta, const QuadratureGrid& grid,
                        std::size_t cap = kDefaultPatternCap);

/// Bulk variant of true_score_curve over rows of `etas` (n x d). The pattern
/// enumeration and per-pattern EAP values are computed once.
Eigen::VectorXd true_score_values(const ModelSpec& spec, const ScoreDefinition& observed,
                                  const Eigen::MatrixXd& etas, const QuadratureGrid& grid,
                                  std::size_t cap = kDefaultPatternCap);

/// All admissible response patterns in lexicographic order (leftmost
/// variable most significant; hurdle pair states ordered (0,NA), (1,1),
/// (1,2), (1,3)). Throws PatternSpaceTooLarge beyond `cap`.
std::vector<ResponsePattern> enumerate_patterns(const ModelSpec& spec,
                                                std::size_t cap = kDefaultPatternCap);

}  // namespace precis
