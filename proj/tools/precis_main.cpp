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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "precis/analytic_2pl.hpp"
#include "precis/analytic_linear.hpp"
#include "precis/estimator.hpp"
#include "precis/model_io.hpp"
#include "precis/quadrature.hpp"
#include "precis/regression.hpp"
#include "precis/simulation.hpp"

namespace {

using namespace precis;

struct CommonOpts {
  std::string model_path;
  int nodes = 61;
  std::vector<double> range{-6.0, 6.0};
  std::string quad = "rect";
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--model", opts.model_path, "model config file (JSON)")->required();
  cmd->add_option("--nodes", opts.nodes, "quadrature nodes per dimension")
      ->check(CLI::Range(2, 4001));
  cmd->add_option("--range", opts.range, "rectangular quadrature range lo hi")->expected(2);
  cmd->add_option("--quad", opts.quad, "quadrature rule: rect | gauss-hermite")
      ->check(CLI::IsMember({"rect", "gauss-hermite"}));
  cmd->add_option("--out", opts.out_path, "write CSV here instead of a table on stdout");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << std::setprecision(17);
  return out;
}

QuadratureGrid make_grid(const ModelSpec& spec, const CommonOpts& opts) {
  auto latent = std::visit([](const auto& m) { return m.latent; }, spec);
  if (opts.quad == "gauss-hermite") return build_gauss_hermite_grid(latent, opts.nodes);
  return build_grid(latent, opts.nodes, opts.range[0], opts.range[1]);
}

void apply_grid_opts(McConfig& cfg, const CommonOpts& opts) {
  cfg.nodes_per_dim = opts.nodes;
  cfg.grid_lo = opts.range[0];
  cfg.grid_hi = opts.range[1];
  cfg.quad_rule = opts.quad == "gauss-hermite" ? QuadRule::GaussHermite : QuadRule::Rectangular;
}

ScoreDefinition parse_observed_score(const std::string& sel) {
  if (sel == "sum") return ScoreDefinition::summed();
  if (sel == "eap") return ScoreDefinition::eap_of(ScoreDefinition::lv(0));
  if (sel.rfind("eap:", 0) == 0)
    return ScoreDefinition::eap_of(ScoreDefinition::lv(std::stoi(sel.substr(4))));
  if (sel == "eap-tsum") return ScoreDefinition::eap_of(ScoreDefinition::true_summed());
  throw CLI::ValidationError("--score",
                             "observed score must be sum, eap, eap:<i> or eap-tsum");
}

ScoreDefinition parse_latent_score(const std::string& sel) {
  if (sel == "lv") return ScoreDefinition::lv(0);
  if (sel.rfind("lv:", 0) == 0) return ScoreDefinition::lv(std::stoi(sel.substr(3)));
  if (sel == "tsum") return ScoreDefinition::true_summed();
  throw CLI::ValidationError("--score", "latent score must be lv, lv:<i> or tsum");
}

std::string pattern_string(const ModelSpec& spec, const ResponsePattern& y) {
  bool wide = false;
  for (int j = 0; j < y.size(); ++j)
    if (!y.is_missing(j) &&
        category_value(spec, j, static_cast<int>(y.values[static_cast<std::size_t>(j)])) >= 10)
      wide = true;
  std::string s;
  for (int j = 0; j < y.size(); ++j) {
    if (wide && j) s += '-';
    if (y.is_missing(j)) {
      s += 'N';
    } else {
      int v = static_cast<int>(
          category_value(spec, j, static_cast<int>(y.values[static_cast<std::size_t>(j)])));
      s += std::to_string(v);
    }
  }
  return s;
}

int cmd_score_table(const CommonOpts& opts) {
  ModelSpec spec = load_model_config(opts.model_path);
  QuadratureGrid grid = make_grid(spec, opts);
  auto patterns = enumerate_patterns(spec);
  const int d = latent_dim(spec);

  std::vector<ScoreDefinition> eap_targets;
  for (int k = 0; k < d; ++k) eap_targets.push_back(ScoreDefinition::lv(k));

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "pattern,prob";
  if (d == 1) csv << ",eap_eta";
  else
    for (int k = 0; k < d; ++k) csv << ",eap_eta" << (k + 1);
  csv << ",s\n";

  if (opts.out_path.empty()) {
    std::cout << std::left << std::setw(16) << "pattern" << std::right << std::setw(8)
              << "prob";
    for (int k = 0; k < d; ++k)
      std::cout << std::setw(12)
                << (d == 1 ? std::string("eap_eta") : "eap_eta" + std::to_string(k + 1));
    std::cout << std::setw(8) << "s" << "\n";
  }
  for (const auto& y : patterns) {
    double prob = marginal_probability(spec, y, grid);
    double s = observed_score_value(spec, ScoreDefinition::summed(), y, grid);
    std::vector<double> eaps;
    for (const auto& t : eap_targets) eaps.push_back(eap_score(spec, y, t, grid));

    csv << pattern_string(spec, y) << "," << prob;
    for (double e : eaps) csv << "," << e;
    csv << "," << s << "\n";
    if (opts.out_path.empty()) {
      std::cout << std::left << std::setw(16) << pattern_string(spec, y) << std::right
                << std::fixed << std::setprecision(4) << std::setw(8) << prob;
      for (double e : eaps) std::cout << std::setw(12) << e;
      std::cout << std::setw(8) << std::setprecision(0) << s << std::defaultfloat
                << std::setprecision(6) << "\n";
    }
  }
  if (!opts.out_path.empty()) open_out(opts.out_path) << csv.str();
  return 0;
}

void print_reports(const std::vector<PrecisionReport>& reports, const std::string& out_path) {
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    out << "kind,score,method,n,seed,value,half_width,regressor,model_hash\n";
    for (const auto& r : reports)
      out << to_string(r.kind) << "," << r.score << "," << to_string(r.method) << "," << r.n
          << "," << r.seed << "," << r.value << "," << r.half_width << ",\"" << r.regressor
          << "\"," << r.model_hash << "\n";
    return;
  }
  std::cout << std::left << std::setw(13) << "kind" << std::setw(16) << "score"
            << std::setw(20) << "method" << std::right << std::setw(9) << "value" << "\n";
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(13) << to_string(r.kind) << std::setw(16) << r.score
              << std::setw(20) << to_string(r.method) << std::right << std::fixed
              << std::setprecision(4) << std::setw(9) << r.value << std::defaultfloat
              << std::setprecision(6);
    if (r.n)
      std::cout << "  (n=" << r.n << ", seed=" << r.seed << ", +/-" << std::fixed
                << std::setprecision(4) << r.half_width << std::defaultfloat
                << std::setprecision(6) << ")";
    std::cout << "\n";
  }
}

int cmd_analytic(const CommonOpts& opts) {
  ModelSpec spec = load_model_config(opts.model_path);
  std::vector<PrecisionReport> reports;
  auto make = [&](double value, CoefficientKind kind, const std::string& score) {
    PrecisionReport r;
    r.value = value;
    r.kind = kind;
    r.method = EstimationMethod::Analytic;
    r.score = score;
    r.model_hash = model_hash(spec);
    reports.push_back(std::move(r));
  };

  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    if (lin->latent.dim() != 1)
      throw UnsupportedAnalytic(
          "analytic coefficients cover the one-factor model; use the mc command");
    make(reliability_eap_factor(*lin), CoefficientKind::Reliability, "eap(eta1)");
    make(reliability_summed_factor(*lin), CoefficientKind::Reliability, "sum");
    make(prmse_lv_factor(*lin), CoefficientKind::Prmse, "eta1");
    make(prmse_lv_factor(*lin), CoefficientKind::Prmse, "true_sum");
  } else if (const auto* tpl = std::get_if<TwoPLModel>(&spec)) {
    QuadratureGrid grid = make_grid(spec, opts);
    TwoPlCoefficients c = analyze_two_pl(*tpl, grid);
    make(c.rel_eap, CoefficientKind::Reliability, "eap(eta1)");
    make(c.rel_summed, CoefficientKind::Reliability, "sum");
    make(c.prmse_lv, CoefficientKind::Prmse, "eta1");
    make(c.prmse_true_summed, CoefficientKind::Prmse, "true_sum");
    if (opts.out_path.empty())
      std::cout << std::fixed << std::setprecision(4) << "Var(true_sum) = "
                << c.var_true_summed << "   Var(eap(true_sum)) = " << c.var_eap_true_summed
                << "   node-doubling stability = " << std::setprecision(6)
                << two_pl_quadrature_stability(*tpl, grid) << std::defaultfloat << "\n";
  } else {
    throw UnsupportedAnalytic("no closed forms for this model family; use the mc command");
  }
  print_reports(reports, opts.out_path);
  return 0;
}

int cmd_curve(const CommonOpts& opts, const std::string& score_sel, int steps,
              const std::vector<double>& curve_range) {
  ModelSpec spec = load_model_config(opts.model_path);
  if (latent_dim(spec) != 1) throw ValidationError("curve requires a unidimensional model");
  ScoreDefinition score = parse_observed_score(score_sel);
  QuadratureGrid grid = make_grid(spec, opts);

  std::ostringstream csv;
  csv << std::setprecision(17) << "eta,true_score\n";
  double lo = curve_range[0], hi = curve_range[1];
  for (int i = 0; i < steps; ++i) {
    double eta = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    Eigen::VectorXd e(1);
    e(0) = eta;
    csv << eta << "," << true_score_curve(spec, score, e, grid) << "\n";
  }
  if (opts.out_path.empty()) std::cout << csv.str();
  else open_out(opts.out_path) << csv.str();
  return 0;
}

int cmd_mc(const CommonOpts& opts, const std::string& kind, const std::string& score_sel,
           const McConfig& cfg, const std::string& dump_path) {
  ModelSpec spec = load_model_config(opts.model_path);
  McConfig c = cfg;
  apply_grid_opts(c, opts);

  PrecisionReport rep;
  ScoreDefinition score;
  if (kind == "reliability") {
    score = parse_observed_score(score_sel);
    rep = estimate_reliability(spec, score, c);
  } else {
    score = parse_latent_score(score_sel);
    rep = estimate_prmse(spec, score, c);
  }
  print_reports({rep}, opts.out_path);

  if (!dump_path.empty()) {
    McSample sample = make_mc_sample(spec, c.n, c.seed);
    std::vector<std::pair<std::string, Eigen::VectorXd>> cols;
    if (score.observed()) {
      QuadratureGrid grid = make_grid(spec, opts);
      cols.emplace_back(score.label(),
                        compute_observed_scores(spec, sample.responses, score, grid));
    } else {
      cols.emplace_back(score.label(),
                        compute_latent_scores(spec, sample.latents, score, QuadratureGrid{}));
    }
    auto out = open_out(dump_path);
    dump_sample_csv(out, sample, cols);
  }
  return 0;
}

int cmd_surface(const CommonOpts& opts, const std::string& score_sel, const McConfig& cfg) {
  ModelSpec spec = load_model_config(opts.model_path);
  if (latent_dim(spec) != 2) throw ValidationError("surface requires a two-dimensional model");
  if (opts.out_path.empty()) throw ValidationError("surface requires --out");
  ScoreDefinition score = parse_observed_score(score_sel);

  McConfig c = cfg;
  apply_grid_opts(c, opts);

  McSample sample = make_mc_sample(spec, c.n, c.seed);
  QuadratureGrid grid = make_grid(spec, opts);
  Eigen::VectorXd x = compute_observed_scores(spec, sample.responses, score, grid);
  SplineFit sf = fit_spline_surface(x, sample.latents, c.spline_df);

  auto out = open_out(opts.out_path);
  out << "# r_squared=" << sf.fit.r_squared << "\n";
  out << "eta1,eta2,fitted\n";
  for (int i = 0; i < 41; ++i) {
    double e1 = -3.0 + 6.0 * static_cast<double>(i) / 40.0;
    for (int j = 0; j < 41; ++j) {
      double e2 = -3.0 + 6.0 * static_cast<double>(j) / 40.0;
      out << e1 << "," << e2 << "," << sf.model(e1, e2) << "\n";
    }
  }
  std::cout << "reliability " << score.label() << " R^2 = " << std::fixed
            << std::setprecision(4) << sf.fit.r_squared << std::defaultfloat
            << "  (lattice written to " << opts.out_path << ")\n";
  return 0;
}

int cmd_convergence(const CommonOpts& opts, const std::string& kind,
                    const std::string& score_sel, const McConfig& cfg,
                    const std::vector<std::size_t>& n_grid) {
  ModelSpec spec = load_model_config(opts.model_path);
  McConfig c = cfg;
  apply_grid_opts(c, opts);
  ScoreDefinition score =
      kind == "reliability" ? parse_observed_score(score_sel) : parse_latent_score(score_sel);
  auto rows = convergence_diagnostic(spec, score, c, n_grid);

  std::ostringstream csv;
  csv << std::setprecision(17) << "n,r_squared,half_width\n";
  for (const auto& r : rows) csv << r.n << "," << r.r_squared << "," << r.half_width << "\n";
  if (opts.out_path.empty()) {
    std::cout << std::left << std::setw(10) << "n" << std::right << std::setw(10)
              << "r_squared" << std::setw(12) << "half_width" << "\n";
    for (const auto& r : rows)
      std::cout << std::left << std::setw(10) << r.n << std::right << std::fixed
                << std::setprecision(4) << std::setw(10) << r.r_squared << std::setw(12)
                << r.half_width << std::defaultfloat << std::setprecision(6) << "\n";
  } else {
    open_out(opts.out_path) << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measurement-precision coefficients for latent-variable models"};
  app.require_subcommand(1);

  CommonOpts table_opts, analytic_opts, mc_opts, curve_opts, surface_opts, conv_opts;

  auto* table_cmd = app.add_subcommand(
      "score-table",
      "marginal probability, EAP score and summed score of every response pattern");
  add_common(table_cmd, table_opts);

  auto* analytic_cmd =
      app.add_subcommand("analytic", "closed-form / quadrature coefficients (one-factor, 2PL)");
  add_common(analytic_cmd, analytic_opts);

  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo reliability or PRMSE");
  McConfig mc_cfg;
  std::string mc_kind = "reliability", mc_score = "sum", mc_method = "auto", mc_dump;
  add_common(mc_cmd, mc_opts);
  mc_cmd->add_option("--kind", mc_kind, "reliability | prmse")
      ->check(CLI::IsMember({"reliability", "prmse"}));
  mc_cmd->add_option("--score", mc_score,
                     "observed: sum|eap|eap:<i>|eap-tsum; latent: lv|lv:<i>|tsum");
  mc_cmd->add_option("--n", mc_cfg.n, "MC sample size")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}));
  mc_cmd->add_option("--seed", mc_cfg.seed, "RNG seed");
  mc_cmd->add_option("--method", mc_method, "auto | nonparametric | simple-linear")
      ->check(CLI::IsMember({"auto", "nonparametric", "simple-linear"}));
  mc_cmd->add_option("--df", mc_cfg.spline_df, "spline basis size per dimension")
      ->check(CLI::Range(4, 64));
  mc_cmd->add_option("--dump", mc_dump, "also dump the simulated sample as CSV");

  auto* curve_cmd = app.add_subcommand("curve", "true-score curve over an eta grid");
  std::string curve_score = "sum";
  int curve_steps = 161;
  std::vector<double> curve_range{-4.0, 4.0};
  add_common(curve_cmd, curve_opts);
  curve_cmd->add_option("--score", curve_score, "sum|eap|eap:<i>|eap-tsum");
  curve_cmd->add_option("--steps", curve_steps, "grid points")->check(CLI::Range(2, 100000));
  curve_cmd->add_option("--curve-range", curve_range, "curve range lo hi")->expected(2);

  auto* surface_cmd = app.add_subcommand(
      "surface", "fitted reliability regression surface on a 41x41 lattice (d = 2)");
  McConfig surface_cfg;
  std::string surface_score = "sum";
  add_common(surface_cmd, surface_opts);
  surface_cmd->add_option("--score", surface_score, "sum|eap:<i>");
  surface_cmd->add_option("--n", surface_cfg.n, "MC sample size")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}));
  surface_cmd->add_option("--seed", surface_cfg.seed, "RNG seed");
  surface_cmd->add_option("--df", surface_cfg.spline_df, "spline basis size per dimension")
      ->check(CLI::Range(4, 64));

  auto* conv_cmd = app.add_subcommand("convergence", "R^2 against MC sample size");
  McConfig conv_cfg;
  std::string conv_kind = "reliability", conv_score = "sum";
  std::vector<std::size_t> conv_grid{1000, 10000, 100000, 1000000};
  add_common(conv_cmd, conv_opts);
  conv_cmd->add_option("--kind", conv_kind, "reliability | prmse")
      ->check(CLI::IsMember({"reliability", "prmse"}));
  conv_cmd->add_option("--score", conv_score, "score selector (see mc)");
  conv_cmd->add_option("--n-grid", conv_grid, "ascending sample sizes");
  conv_cmd->add_option("--seed", conv_cfg.seed, "RNG seed");

  try {
    app.parse(argc, argv);
    if (table_cmd->parsed()) return cmd_score_table(table_opts);
    if (analytic_cmd->parsed()) return cmd_analytic(analytic_opts);
    if (mc_cmd->parsed()) {
      mc_cfg.method = mc_method == "auto"            ? McMethod::Auto
                      : mc_method == "nonparametric" ? McMethod::Nonparametric
                                                     : McMethod::SimpleLinear;
      return cmd_mc(mc_opts, mc_kind, mc_score, mc_cfg, mc_dump);
    }
    if (curve_cmd->parsed())
      return cmd_curve(curve_opts, curve_score, curve_steps, curve_range);
    if (surface_cmd->parsed()) return cmd_surface(surface_opts, surface_score, surface_cfg);
    if (conv_cmd->parsed())
      return cmd_convergence(conv_opts, conv_kind, conv_score, conv_cfg, conv_grid);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const precis::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const precis::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const precis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
