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

namespace precis::detail {

/// Fills table(j, k) = P(y_j = k | eta) for every manifest variable and
/// category of a discrete model. `table` must be at least m x max_categories.
void item_prob_table(const ModelSpec& spec, const Eigen::VectorXd& eta,
                     Eigen::MatrixXd& table);

}  // namespace precis::detail
