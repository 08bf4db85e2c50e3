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
#include <string>
#include <variant>
#include <vector>

#include "precis/errors.hpp"

namespace precis {

/// Multivariate-normal latent distribution: dimension, mean, covariance.
struct LatentDistribution {
  Eigen::VectorXd mean;        // length d
  Eigen::MatrixXd covariance;  // d x d, symmetric PSD

  int dim() const { return static_cast<int>(mean.size()); }

  static LatentDistribution standard_normal(int d = 1);
  /// Two standardized latent variables with the given correlation.
  static LatentDistribution correlated_pair(double rho);
};

/// Linear common factor model: y = nu + Lambda * eta + eps, eps ~ N(0, Theta).
struct LinearFactorModel {
  Eigen::VectorXd intercepts;         // nu, length m
  Eigen::MatrixXd loadings;           // Lambda, m x d
  Eigen::MatrixXd unique_covariance;  // Theta, m x m
  LatentDistribution latent;

  int n_items() const { return static_cast<int>(intercepts.size()); }
};

/// Two-parameter logistic IRT model for dichotomous items.
/// P(y_j = 1 | eta) = logistic(alpha_j + beta_j' eta).
struct TwoPLModel {
  Eigen::VectorXd intercepts;  // alpha, length m
  Eigen::MatrixXd slopes;      // beta, m x d
  LatentDistribution latent;

  int n_items() const { return static_cast<int>(intercepts.size()); }
};

/// One graded-response item with K ordered categories. Cumulative-logit
/// response function: P(y >= k | eta) = logistic(a' eta - c_k), k = 1..K-1.
struct GradedItem {
  Eigen::VectorXd slopes;          // length d
  std::vector<double> thresholds;  // c_1 < ... < c_{K-1}

  int n_categories() const { return static_cast<int>(thresholds.size()) + 1; }
};

struct GradedResponseModel {
  std::vector<GradedItem> items;
  LatentDistribution latent;

  int n_items() const { return static_cast<int>(items.size()); }
};

/// One hurdle item pair: a binary presence indicator followed by a graded
/// frequency indicator that is structurally missing when presence = 0.
/// Presence loads only on latent dimension 0 (susceptibility), frequency
/// only on dimension 1 (severity). Frequency categories carry the values
/// 1..K (internal codes 0..K-1).
struct HurdleItemPair {
  GradedItem presence;   // K = 2, slope on dim 0
  GradedItem frequency;  // K = 3, slope on dim 1
};

struct HurdleGradedModel {
  std::vector<HurdleItemPair> pairs;
  LatentDistribution latent;  // d = 2

  int n_pairs() const { return static_cast<int>(pairs.size()); }
};

using ModelSpec =
    std::variant<LinearFactorModel, TwoPLModel, GradedResponseModel, HurdleGradedModel>;

/// Checks every type invariant (shapes, PSD covariances, threshold ordering)
/// and returns the spec unchanged. Idempotent. Downstream operations assume a
/// validated spec.
const ModelSpec& validate_model(const ModelSpec& spec);

int latent_dim(const ModelSpec& spec);

/// Number of recorded manifest variables (2 per pair for the hurdle model).
int n_manifest(const ModelSpec& spec);

bool discrete_manifest(const ModelSpec& spec);

/// Category count of one manifest variable of a discrete model.
int n_categories(const ModelSpec& spec, int item);

/// Value an internal category code stands for when written to external
/// output (hurdle frequency codes 0..2 represent the values 1..3; all other
/// discrete variables use the code itself).
double category_value(const ModelSpec& spec, int item, int code);

/// Count of admissible response patterns; throws PatternSpaceTooLarge above
/// `cap`.
std::size_t admissible_pattern_count(const ModelSpec& spec, std::size_t cap);

inline constexpr std::size_t kDefaultPatternCap = std::size_t{1} << 20;

/// One realized manifest-variable vector. `missing` flags structural NA
/// entries (hurdle frequency when presence = 0).
struct ResponsePattern {
  std::vector<double> values;
  std::vector<std::uint8_t> missing;

  ResponsePattern() = default;
  explicit ResponsePattern(std::vector<double> v)
      : values(std::move(v)), missing(values.size(), 0) {}
  ResponsePattern(std::vector<double> v, std::vector<std::uint8_t> na)
      : values(std::move(v)), missing(std::move(na)) {}

  int size() const { return static_cast<int>(values.size()); }
  bool is_missing(int j) const { return missing[static_cast<std::size_t>(j)] != 0; }

  bool operator==(const ResponsePattern&) const = default;
};

bool pattern_admissible(const ModelSpec& spec, const ResponsePattern& y);
/// Throws InadmissiblePattern with a diagnostic message.
void require_admissible(const ModelSpec& spec, const ResponsePattern& y);

/// A rule mapping manifest vectors to an observed score (summed, EAP of a
/// latent score) or latent vectors to a latent score (one LV component, the
/// true summed score).
struct ScoreDefinition {
  enum class Kind { Summed, EapOf, LvComponent, TrueSummed };

  Kind kind = Kind::Summed;
  Kind eap_target = Kind::LvComponent;  // meaningful only when kind == EapOf
  int component = 0;                    // LV index for LvComponent targets

  static ScoreDefinition summed() { return {}; }
  static ScoreDefinition lv(int component = 0) {
    ScoreDefinition s;
    s.kind = Kind::LvComponent;
    s.component = component;
    return s;
  }
  static ScoreDefinition true_summed() {
    ScoreDefinition s;
    s.kind = Kind::TrueSummed;
    return s;
  }
  static ScoreDefinition eap_of(const ScoreDefinition& latent_score);

  bool observed() const { return kind == Kind::Summed || kind == Kind::EapOf; }
  bool latent() const { return !observed(); }

  /// The latent score an EAP score predicts.
  ScoreDefinition target_score() const;

  std::string label() const;

  bool operator==(const ScoreDefinition&) const = default;
};

/// Checks a score definition against a model (component index < d, kind
/// consistency). Throws ValidationError.
void validate_score(const ModelSpec& spec, const ScoreDefinition& score);

/// FNV-1a hash of the canonical serialized parameters; stable across runs
/// and platforms.
std::uint64_t model_hash(const ModelSpec& spec);

}  // namespace precis
