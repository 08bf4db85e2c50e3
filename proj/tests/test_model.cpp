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

#include <doctest.h>

#include "precis/model.hpp"
#include "precis/quadrature.hpp"
#include "test_support.hpp"

using namespace precis;

TEST_CASE("one-factor example spec validates") {
  ModelSpec spec = testsup::one_factor_example();
  CHECK_NOTHROW(validate_model(spec));
  CHECK(latent_dim(spec) == 1);
  CHECK(n_manifest(spec) == 3);
  CHECK_FALSE(discrete_manifest(spec));
}

TEST_CASE("negative unique variance is rejected") {
  LinearFactorModel m = testsup::one_factor_example();
  m.unique_covariance(1, 1) = -0.2;
  ModelSpec spec = m;
  CHECK_THROWS_AS(validate_model(spec), NonPSDCovariance);
}

TEST_CASE("non-monotone thresholds are rejected") {
  GradedResponseModel m;
  GradedItem item;
  item.slopes = Eigen::VectorXd::Constant(1, 1.2);
  item.thresholds = {0.5, 0.2};
  m.items.push_back(item);
  m.latent = LatentDistribution::standard_normal(1);
  ModelSpec spec = m;
  CHECK_THROWS_AS(validate_model(spec), NonMonotoneThresholds);
}

TEST_CASE("shape mismatches are rejected") {
  LinearFactorModel m = testsup::one_factor_example();
  m.loadings = Eigen::MatrixXd::Ones(2, 1);
  CHECK_THROWS_AS(validate_model(ModelSpec{m}), ShapeMismatch);

  TwoPLModel t = testsup::two_pl_example();
  t.slopes = Eigen::MatrixXd::Ones(3, 2);
  CHECK_THROWS_AS(validate_model(ModelSpec{t}), ShapeMismatch);
}

TEST_CASE("validation is idempotent") {
  ModelSpec spec = testsup::two_pl_example();
  const ModelSpec& once = validate_model(spec);
  const ModelSpec& twice = validate_model(once);
  CHECK(model_hash(twice) == model_hash(spec));
  CHECK(std::get<TwoPLModel>(twice).intercepts == std::get<TwoPLModel>(spec).intercepts);
}

TEST_CASE("hurdle structure is validated") {
  HurdleGradedModel m = testsup::small_hurdle_example();
  CHECK_NOTHROW(validate_model(ModelSpec{m}));

  SUBCASE("correlation must be inside (-1, 1)") {
    m.latent = LatentDistribution::correlated_pair(1.0);
    CHECK_THROWS_AS(validate_model(ModelSpec{m}), NonPSDCovariance);
  }
  SUBCASE("presence must not load on severity") {
    m.pairs[0].presence.slopes(1) = 0.4;
    CHECK_THROWS_AS(validate_model(ModelSpec{m}), ShapeMismatch);
  }
  SUBCASE("frequency must have three categories") {
    m.pairs[0].frequency.thresholds = {0.1};
    CHECK_THROWS_AS(validate_model(ModelSpec{m}), ShapeMismatch);
  }
}

TEST_CASE("hurdle admissibility: stage 2 missing iff stage 1 absent") {
  ModelSpec spec = testsup::small_hurdle_example();
  for (const auto& y : enumerate_patterns(spec)) {
    CHECK(pattern_admissible(spec, y));
    for (int p = 0; p < 2; ++p)
      CHECK((y.values[static_cast<std::size_t>(2 * p)] == 0.0) == y.is_missing(2 * p + 1));
  }
  ResponsePattern bad({0.0, 1.0, 1.0, 2.0});  // presence 0 with observed frequency
  CHECK_FALSE(pattern_admissible(spec, bad));
  ResponsePattern bad2({1.0, 0.0, 1.0, 0.0}, {0, 1, 0, 0});  // presence 1 with NA frequency
  CHECK_FALSE(pattern_admissible(spec, bad2));
  CHECK_THROWS_AS(require_admissible(spec, bad), InadmissiblePattern);
}

TEST_CASE("2PL patterns must be binary and complete") {
  ModelSpec spec = testsup::two_pl_example();
  CHECK(pattern_admissible(spec, ResponsePattern({1.0, 0.0, 1.0})));
  CHECK_FALSE(pattern_admissible(spec, ResponsePattern({2.0, 0.0, 1.0})));
  CHECK_FALSE(pattern_admissible(spec, ResponsePattern({1.0, 0.0, 1.0}, {0, 1, 0})));
  CHECK_FALSE(pattern_admissible(spec, ResponsePattern({1.0, 0.0})));
}

TEST_CASE("score definitions") {
  ScoreDefinition s = ScoreDefinition::summed();
  CHECK(s.observed());
  CHECK(s.label() == "sum");

  ScoreDefinition eap = ScoreDefinition::eap_of(ScoreDefinition::lv(1));
  CHECK(eap.observed());
  CHECK(eap.target_score() == ScoreDefinition::lv(1));
  CHECK(eap.label() == "eap(eta2)");

  CHECK(ScoreDefinition::true_summed().latent());
  CHECK_THROWS_AS(ScoreDefinition::eap_of(ScoreDefinition::summed()), ValidationError);

  ModelSpec spec = testsup::two_pl_example();
  CHECK_THROWS_AS(validate_score(spec, ScoreDefinition::lv(3)), ValidationError);
  CHECK_NOTHROW(validate_score(spec, ScoreDefinition::lv(0)));
}

TEST_CASE("pattern counts and the enumeration cap") {
  CHECK(admissible_pattern_count(ModelSpec{testsup::two_pl_example()}, kDefaultPatternCap) == 8);
  CHECK(admissible_pattern_count(ModelSpec{testsup::small_hurdle_example()},
                                 kDefaultPatternCap) == 16);

  Rng rng(42);
  TwoPLModel wide = testsup::random_two_pl(rng, 25);
  CHECK_THROWS_AS(admissible_pattern_count(ModelSpec{wide}, kDefaultPatternCap),
                  PatternSpaceTooLarge);
}

TEST_CASE("model hashes separate distinct parameter sets") {
  ModelSpec a = testsup::two_pl_example();
  ModelSpec b = testsup::two_pl_example();
  CHECK(model_hash(a) == model_hash(b));
  std::get<TwoPLModel>(b).slopes(0, 0) += 1e-12;
  CHECK(model_hash(a) != model_hash(b));
}

TEST_CASE("hurdle frequency categories carry values 1..3") {
  ModelSpec spec = testsup::small_hurdle_example();
  CHECK(category_value(spec, 0, 1) == 1.0);  // presence code = value
  CHECK(category_value(spec, 1, 0) == 1.0);  // frequency codes 0..2 -> 1..3
  CHECK(category_value(spec, 1, 2) == 3.0);
  CHECK(category_value(ModelSpec{testsup::two_pl_example()}, 0, 1) == 1.0);
}
