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

#include "precis/estimator.hpp"

#include <iostream>
#include <optional>

#include "precis/quadrature.hpp"
#include "precis/regression.hpp"
#include "precis/simulation.hpp"

namespace precis {
namespace {

void check_config(const McConfig& cfg) {
  if (cfg.n < 1000) throw ValidationError("MC sample size must be at least 1000");
  if (cfg.n < 100'000)
    std::cerr << "precis: MC sample size " << cfg.n
              << " is small; estimates may be noisy\n";
}

QuadratureGrid grid_for(const ModelSpec& spec, const McConfig& cfg) {
  auto latent = std::visit([](const auto& m) { return m.latent; }, spec);
  if (cfg.quad_rule == QuadRule::GaussHermite)
    return build_gauss_hermite_grid(latent, cfg.nodes_per_dim);
  return build_grid(latent, cfg.nodes_per_dim, cfg.grid_lo, cfg.grid_hi);
}

ReportMeta meta_for(const ModelSpec& spec, const ScoreDefinition& score, const McConfig& cfg,
                    EstimationMethod method) {
  ReportMeta meta;
  meta.n = cfg.n;
  meta.seed = cfg.seed;
  meta.model_hash = model_hash(spec);
  meta.score = score.label();
  meta.method = method;
  return meta;
}

bool needs_grid_for_observed(const ModelSpec& spec, const ScoreDefinition& observed) {
  return observed.kind == ScoreDefinition::Kind::EapOf &&
         !std::holds_alternative<LinearFactorModel>(spec);
}

}  // namespace

PrecisionReport estimate_reliability(const ModelSpec& spec, const ScoreDefinition& observed,
                                     const McConfig& cfg) {
  if (!observed.observed()) throw ValidationError("reliability belongs to observed scores");
  validate_score(spec, observed);
  check_config(cfg);
  const int d = latent_dim(spec);

  std::optional<QuadratureGrid> grid;
  if (needs_grid_for_observed(spec, observed)) grid = grid_for(spec, cfg);
  const QuadratureGrid& g = grid ? *grid : QuadratureGrid{};

  McSample sample = make_mc_sample(spec, cfg.n, cfg.seed);
  Eigen::VectorXd x = compute_observed_scores(spec, sample.responses, observed, g);

  bool spline_route = cfg.method == McMethod::Nonparametric ||
                      (cfg.method == McMethod::Auto && d <= 2);
  if (spline_route) {
    SplineFit sf = fit_spline_surface(x, sample.latents, cfg.spline_df);
    return r_squared_report(sf.fit, CoefficientKind::Reliability,
                            meta_for(spec, observed, cfg, EstimationMethod::McNonparametric));
  }

  // simple linear regression of the observed score on its true score
  Eigen::VectorXd truth = true_score_values(spec, observed, sample.latents, g, cfg.pattern_cap);
  RegressionFit fit = fit_simple_linear(x, truth);
  fit.regressor = "true_score(" + observed.label() + ")";
  return r_squared_report(fit, CoefficientKind::Reliability,
                          meta_for(spec, observed, cfg, EstimationMethod::McSimpleLinear));
}

PrecisionReport estimate_prmse(const ModelSpec& spec, const ScoreDefinition& latent,
                               const McConfig& cfg) {
  if (!latent.latent()) throw ValidationError("PRMSE belongs to latent scores");
  validate_score(spec, latent);
  check_config(cfg);

  McSample sample = make_mc_sample(spec, cfg.n, cfg.seed);
  Eigen::VectorXd xi = compute_latent_scores(spec, sample.latents, latent, QuadratureGrid{});

  bool discrete = discrete_manifest(spec);
  bool pattern_route = false;
  std::string fallback_note;
  if (cfg.method == McMethod::Nonparametric || cfg.method == McMethod::Auto) {
    if (discrete) {
      try {
        admissible_pattern_count(spec, cfg.pattern_cap);
        pattern_route = true;
      } catch (const PatternSpaceTooLarge&) {
        if (cfg.method == McMethod::Nonparametric) throw;
        fallback_note = " [pattern space beyond cap]";
      }
    } else if (cfg.method == McMethod::Nonparametric) {
      // the regression of a latent score on continuous manifest variables is
      // exactly linear here, and the EAP score is that linear combination
      fallback_note = " [continuous manifest variables]";
    }
  }

  if (pattern_route) {
    RegressionFit fit = fit_pattern_means(xi, sample.responses);
    return r_squared_report(fit, CoefficientKind::Prmse,
                            meta_for(spec, latent, cfg, EstimationMethod::McNonparametric));
  }

  ScoreDefinition eap = ScoreDefinition::eap_of(latent);
  std::optional<QuadratureGrid> grid;
  if (needs_grid_for_observed(spec, eap)) grid = grid_for(spec, cfg);
  const QuadratureGrid& g = grid ? *grid : QuadratureGrid{};
  Eigen::VectorXd predictor = compute_observed_scores(spec, sample.responses, eap, g);
  RegressionFit fit = fit_simple_linear(xi, predictor);
  fit.regressor = "eap(" + latent.label() + ")" + fallback_note;
  return r_squared_report(fit, CoefficientKind::Prmse,
                          meta_for(spec, latent, cfg, EstimationMethod::McSimpleLinear));
}

std::vector<ConvergenceRow> convergence_diagnostic(const ModelSpec& spec,
                                                   const ScoreDefinition& score,
                                                   const McConfig& cfg,
                                                   const std::vector<std::size_t>& n_grid) {
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw ValidationError("n grid must be ascending");

  std::vector<ConvergenceRow> rows;
  rows.reserve(n_grid.size());
  for (std::size_t n : n_grid) {
    McConfig c = cfg;
    c.n = n;
    PrecisionReport rep = score.observed() ? estimate_reliability(spec, score, c)
                                           : estimate_prmse(spec, score, c);
    rows.push_back({n, rep.value, rep.half_width});
  }
  return rows;
}

}  // namespace precis
