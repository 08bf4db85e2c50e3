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

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "precis/analytic_2pl.hpp"
#include "precis/quadrature.hpp"
#include "precis/simulation.hpp"
#include "test_support.hpp"

using namespace precis;

TEST_CASE("latent draws match their distribution at n = 1e6") {
  Eigen::MatrixXd z = sample_latents(LatentDistribution::standard_normal(1), 1'000'000, 101);
  CHECK(std::abs(z.col(0).mean()) < 0.005);
  double var = (z.col(0).array() - z.col(0).mean()).square().mean();
  CHECK(std::abs(var - 1.0) < 0.01);

  Eigen::MatrixXd b = sample_latents(LatentDistribution::correlated_pair(0.58), 1'000'000, 5);
  CHECK(std::abs(testsup::correlation(b.col(0), b.col(1)) - 0.58) < 0.005);
}

TEST_CASE("latent draws are deterministic in the seed") {
  auto latent = LatentDistribution::standard_normal(2);
  Eigen::MatrixXd a = sample_latents(latent, 5000, 7);
  Eigen::MatrixXd b = sample_latents(latent, 5000, 7);
  CHECK(a == b);
  Eigen::MatrixXd c = sample_latents(latent, 5000, 8);
  CHECK(a != c);
}

TEST_CASE("thread cap does not change the draws") {
  // per-row substreams make the sample independent of the block schedule
  auto latent = LatentDistribution::standard_normal(1);
  Eigen::MatrixXd base = sample_latents(latent, 40000, 3);
  setenv("PRECISION_THREADS", "1", 1);
  Eigen::MatrixXd serial = sample_latents(latent, 40000, 3);
  unsetenv("PRECISION_THREADS");
  CHECK(base == serial);
}

TEST_CASE("2PL responses reproduce the pattern marginals") {
  ModelSpec spec = testsup::two_pl_example();
  McSample sample = make_mc_sample(spec, 1'000'000, 11);
  QuadratureGrid grid = build_grid(LatentDistribution::standard_normal(1), 61, -6.0, 6.0);

  std::map<std::vector<int>, int> counts;
  for (Eigen::Index i = 0; i < sample.responses.rows(); ++i) {
    std::vector<int> key(3);
    for (int j = 0; j < 3; ++j) key[static_cast<std::size_t>(j)] =
        static_cast<int>(sample.responses(i, j));
    counts[key] += 1;
  }
  CHECK(counts.size() == 8);
  for (const auto& [key, count] : counts) {
    std::vector<double> v(key.begin(), key.end());
    double expected = marginal_probability(spec, ResponsePattern(v), grid);
    CHECK(std::abs(count / 1e6 - expected) < 0.005);
  }
}

TEST_CASE("zero slopes decouple responses from the latent variable") {
  TwoPLModel flat = testsup::two_pl_example();
  flat.slopes.setZero();
  ModelSpec spec = flat;
  McSample sample = make_mc_sample(spec, 1'000'000, 13);
  for (int j = 0; j < 3; ++j) {
    double expected = 1.0 / (1.0 + std::exp(-flat.intercepts(j)));
    CHECK(std::abs(sample.responses.col(j).mean() - expected) < 0.005);
    CHECK(std::abs(testsup::correlation(sample.responses.col(j), sample.latents.col(0))) <
          0.005);
  }
}

TEST_CASE("hurdle responses are structurally missing exactly when absent") {
  ModelSpec spec = testsup::small_hurdle_example();
  McSample sample = make_mc_sample(spec, 200000, 17);
  for (Eigen::Index i = 0; i < sample.responses.rows(); ++i) {
    for (int p = 0; p < 2; ++p) {
      bool absent = sample.responses(i, 2 * p) == 0.0;
      CHECK(absent == std::isnan(sample.responses(i, 2 * p + 1)));
    }
  }
}

TEST_CASE("observed scores per row") {
  ModelSpec spec = testsup::two_pl_example();
  QuadratureGrid grid = build_grid(LatentDistribution::standard_normal(1), 61, -6.0, 6.0);

  Eigen::MatrixXd rows(2, 3);
  rows << 1, 0, 1, 0, 1, 1;
  Eigen::VectorXd sums = compute_observed_scores(spec, rows, ScoreDefinition::summed(), grid);
  CHECK(sums(0) == 2.0);
  CHECK(sums(1) == 2.0);

  Eigen::VectorXd eaps = compute_observed_scores(
      spec, rows, ScoreDefinition::eap_of(ScoreDefinition::lv(0)), grid);
  CHECK(std::abs(eaps(1) - 0.76) < 0.005);  // pattern [0,1,1]
  CHECK(eaps(0) == doctest::Approx(eap_score(spec, ResponsePattern({1.0, 0.0, 1.0}),
                                             ScoreDefinition::lv(0), grid))
                       .epsilon(1e-12));
}

TEST_CASE("hurdle summed score reconstructs the original codes") {
  ModelSpec spec = testsup::small_hurdle_example();
  Eigen::MatrixXd rows(3, 4);
  double na = std::numeric_limits<double>::quiet_NaN();
  rows << 1, 2, 0, na,   // original 3 + 0
      0, na, 0, na,      // original 0 + 0
      1, 0, 1, 1;        // original 1 + 2
  Eigen::VectorXd s =
      compute_observed_scores(spec, rows, ScoreDefinition::summed(), QuadratureGrid{});
  CHECK(s(0) == 3.0);
  CHECK(s(1) == 0.0);
  CHECK(s(2) == 3.0);
}

TEST_CASE("latent scores per row") {
  LinearFactorModel lin = testsup::one_factor_example();
  ModelSpec spec = lin;
  Eigen::MatrixXd etas(3, 1);
  etas << -1.0, 0.0, 2.0;

  Eigen::VectorXd lv = compute_latent_scores(spec, etas, ScoreDefinition::lv(0),
                                             QuadratureGrid{});
  CHECK(lv == etas.col(0));

  Eigen::VectorXd ts = compute_latent_scores(spec, etas, ScoreDefinition::true_summed(),
                                             QuadratureGrid{});
  for (int i = 0; i < 3; ++i) CHECK(ts(i) == doctest::Approx(1.5 * etas(i, 0)).epsilon(1e-12));

  ModelSpec two_pl = testsup::two_pl_example();
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd t0 = compute_latent_scores(two_pl, zero, ScoreDefinition::true_summed(),
                                             QuadratureGrid{});
  CHECK(t0(0) == doctest::Approx(1.3502615006521224).epsilon(1e-12));
}

TEST_CASE("the whole pipeline is bit-reproducible") {
  ModelSpec spec = testsup::two_pl_example();
  QuadratureGrid grid = build_grid(LatentDistribution::standard_normal(1), 61, -6.0, 6.0);
  McSample a = make_mc_sample(spec, 20000, 99);
  McSample b = make_mc_sample(spec, 20000, 99);
  CHECK(a.latents == b.latents);
  CHECK(a.responses == b.responses);

  ScoreDefinition eap = ScoreDefinition::eap_of(ScoreDefinition::lv(0));
  CHECK(compute_observed_scores(spec, a.responses, eap, grid) ==
        compute_observed_scores(spec, b.responses, eap, grid));
}

TEST_CASE("empirical summed-score variance matches the pattern sums") {
  TwoPLModel m = testsup::two_pl_example();
  ModelSpec spec = m;
  McSample sample = make_mc_sample(spec, 1'000'000, 21);
  Eigen::VectorXd s =
      compute_observed_scores(spec, sample.responses, ScoreDefinition::summed(), QuadratureGrid{});
  double var_emp = (s.array() - s.mean()).square().mean();
  QuadratureGrid grid = build_grid(m.latent, 61, -6.0, 6.0);
  double var_exact = analyze_two_pl(m, grid).var_summed;
  CHECK(std::abs(var_emp - var_exact) / var_exact < 0.01);
}

TEST_CASE("error scores have mean zero and are uncorrelated with true scores") {
  ModelSpec spec = testsup::two_pl_example();
  McSample sample = make_mc_sample(spec, 1'000'000, 23);
  Eigen::VectorXd s =
      compute_observed_scores(spec, sample.responses, ScoreDefinition::summed(), QuadratureGrid{});
  Eigen::VectorXd tau = true_score_values(spec, ScoreDefinition::summed(), sample.latents,
                                          QuadratureGrid{});
  Eigen::VectorXd err = s - tau;
  double sd_s = std::sqrt((s.array() - s.mean()).square().mean());
  CHECK(std::abs(err.mean()) <= 0.005 * sd_s);
  CHECK(std::abs(testsup::correlation(err, tau)) <= 0.005);
}

TEST_CASE("sample dump uses category values and empty NA fields") {
  ModelSpec spec = testsup::small_hurdle_example();
  McSample sample = make_mc_sample(spec, 64, 31);
  Eigen::VectorXd s =
      compute_observed_scores(spec, sample.responses, ScoreDefinition::summed(), QuadratureGrid{});
  std::ostringstream out;
  dump_sample_csv(out, sample, {{"sum", s}});

  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "eta_1,eta_2,y_1,y_2,y_3,y_4,sum");

  std::string line;
  int rows = 0;
  bool saw_na = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",,") != std::string::npos) saw_na = true;
  }
  CHECK(rows == 64);
  CHECK(saw_na);  // some presence draw is 0 in 64 rows
}
