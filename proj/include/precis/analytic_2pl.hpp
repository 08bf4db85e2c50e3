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

#include "precis/model.hpp"
#include "precis/quadrature.hpp"

namespace precis {

/// Everything one full pattern sweep of a unidimensional 2PL yields:
/// observed-score variances over the pattern space, true-score variances
/// over the quadrature grid, and the four precision coefficients built from
/// them.
struct TwoPlCoefficients {
  double rel_eap = 0;          // Var(tau_eap) / Var(eap)
  double rel_summed = 0;       // Var(tau_s) / Var(s)
  double prmse_lv = 0;         // Var(eap) / psi
  double prmse_true_summed = 0;  // Var(eap_of_tau_s) / Var(tau_s)

  double var_eap = 0;
  double var_true_eap = 0;
  double var_summed = 0;
  double var_true_summed = 0;
  double var_eap_true_summed = 0;
  double mean_posterior_var = 0;  // E[Var(eta | y)]
};

/// Exact pattern-sum moments (weighted by marginal probabilities) combined
/// with quadrature over eta. Requires a unidimensional 2PL and a pattern
/// space within `cap`; throws PatternSpaceTooLarge / UnsupportedAnalytic.
TwoPlCoefficients analyze_two_pl(const TwoPLModel& model, const QuadratureGrid& grid,
                                 std::size_t cap = kDefaultPatternCap);

double reliability_eap_2pl(const TwoPLModel& model, const QuadratureGrid& grid);
double reliability_summed_2pl(const TwoPLModel& model, const QuadratureGrid& grid);
double prmse_lv_2pl(const TwoPLModel& model, const QuadratureGrid& grid);
double prmse_true_summed_2pl(const TwoPLModel& model, const QuadratureGrid& grid);

/// Stability diagnostic: largest absolute change in any of the four
/// coefficients when the node count is doubled (n -> 2n - 1 keeps the
/// spacing halved and the endpoints fixed).
double two_pl_quadrature_stability(const TwoPLModel& model, const QuadratureGrid& grid);

}  // namespace precis
