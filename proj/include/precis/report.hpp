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
#include <string>

namespace precis {

enum class CoefficientKind { Reliability, Prmse };

enum class EstimationMethod { Analytic, McNonparametric, McSimpleLinear };

std::string to_string(CoefficientKind kind);
std::string to_string(EstimationMethod method);

/// One measurement-precision coefficient with its provenance.
struct PrecisionReport {
  double value = 0.0;
  CoefficientKind kind = CoefficientKind::Reliability;
  EstimationMethod method = EstimationMethod::Analytic;
  std::size_t n = 0;          // MC sample size; 0 for analytic values
  std::uint64_t seed = 0;
  std::uint64_t model_hash = 0;
  std::string score;          // score the coefficient belongs to
  std::string regressor;      // regression that produced it
  double half_width = 0.0;    // MC 95% half-width (delta method); 0 for analytic

  bool operator==(const PrecisionReport&) const = default;
};

}  // namespace precis
