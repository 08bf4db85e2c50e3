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

#include <cstdint>
#include <vector>

#include "precis/model.hpp"
#include "precis/report.hpp"

namespace precis {

enum class McMethod { Auto, Nonparametric, SimpleLinear };

enum class QuadRule { Rectangular, GaussHermite };

/// Monte Carlo configuration. Auto picks the regression route the way the
/// procedure is normally run: saturated pattern means for discrete manifest
/// variables within the enumeration cap, the EAP regressor beyond it or for
/// continuous manifest variables, and a spline surface over the latent
/// variables for reliability.
struct McConfig {
  std::size_t n = 1'000'000;
  std::uint64_t seed = 1;
  McMethod method = McMethod::Auto;
  QuadRule quad_rule = QuadRule::Rectangular;
  int nodes_per_dim = 61;
  double grid_lo = -6.0;  // rectangular rule only
  double grid_hi = 6.0;
  int spline_df = 8;
  std::size_t pattern_cap = kDefaultPatternCap;
};

/// Reliability of an observed score by simulation: simulate, regress the
/// observed score on the latent variables (or on its true score for the
/// simple-linear route), report R^2.
PrecisionReport estimate_reliability(const ModelSpec& spec, const ScoreDefinition& observed,
                                     const McConfig& cfg);

/// PRMSE of a latent score by simulation: simulate, regress the latent score
/// on the manifest patterns (or on its observed EAP score), report R^2.
PrecisionReport estimate_prmse(const ModelSpec& spec, const ScoreDefinition& latent,
                               const McConfig& cfg);

struct ConvergenceRow {
  std::size_t n = 0;
  double r_squared = 0.0;
  double half_width = 0.0;
};

/// R^2 at each sample size in ascending `n_grid`, with the delta-method 95%
/// half-width. The coefficient kind follows the score kind (observed ->
/// reliability, latent -> PRMSE).
std::vector<ConvergenceRow> convergence_diagnostic(const ModelSpec& spec,
                                                   const ScoreDefinition& score,
                                                   const McConfig& cfg,
                                                   const std::vector<std::size_t>& n_grid);

}  // namespace precis
