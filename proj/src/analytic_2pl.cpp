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

#include "precis/analytic_2pl.hpp"

#include <cmath>

namespace precis {
namespace {

double quad_variance(const Eigen::VectorXd& curve, const Eigen::VectorXd& weights) {
  double mean = curve.dot(weights);
  double m2 = curve.cwiseProduct(curve).dot(weights);
  return m2 - mean * mean;
}

}  // namespace

TwoPlCoefficients analyze_two_pl(const TwoPLModel& model, const QuadratureGrid& grid,
                                 std::size_t cap) {
  if (model.latent.dim() != 1)
    throw UnsupportedAnalytic("pattern-sum coefficients require a unidimensional 2PL");
  if (grid.dim() != 1) throw ShapeMismatch("grid dimension does not match the model");
  ModelSpec spec = model;
  const std::size_t npat = admissible_pattern_count(spec, cap);
  const int m = model.n_items();
  const int G = grid.size();
  const Eigen::VectorXd& w = grid.weights;
  Eigen::VectorXd nodes = grid.nodes.col(0);

  // per-item success probabilities at every node
  Eigen::MatrixXd p1(m, G);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < G; ++i) {
      double z = model.intercepts(j) + model.slopes(j, 0) * nodes(i);
      p1(j, i) = 1.0 / (1.0 + std::exp(-z));
    }
  Eigen::VectorXd tcc = p1.colwise().sum().transpose();  // true summed score curve

  // pattern sweep: accumulate pattern moments and the true-EAP curve
  Eigen::VectorXd lik(G), tau_eap = Eigen::VectorXd::Zero(G);
  double p_sum = 0.0;
  double eap_m1 = 0.0, eap_m2 = 0.0;
  double s_m1 = 0.0, s_m2 = 0.0;
  double ts_m1 = 0.0, ts_m2 = 0.0;
  double post_var = 0.0;

  std::vector<int> y(static_cast<std::size_t>(m), 0);
  for (std::size_t count = 0; count < npat; ++count) {
    lik.setOnes();
    int s = 0;
    for (int j = 0; j < m; ++j) {
      if (y[static_cast<std::size_t>(j)] == 1) {
        lik.array() *= p1.row(j).transpose().array();
        ++s;
      } else {
        lik.array() *= (1.0 - p1.row(j).transpose().array());
      }
    }
    Eigen::VectorXd wl = w.cwiseProduct(lik);
    double prob = wl.sum();
    p_sum += prob;
    if (prob > 1e-300) {
      double eap = wl.dot(nodes) / prob;
      double eap2 = wl.dot(nodes.cwiseProduct(nodes)) / prob;
      double eap_ts = wl.dot(tcc) / prob;
      eap_m1 += prob * eap;
      eap_m2 += prob * eap * eap;
      ts_m1 += prob * eap_ts;
      ts_m2 += prob * eap_ts * eap_ts;
      post_var += prob * (eap2 - eap * eap);
      tau_eap += eap * lik;
    }
    double sd = static_cast<double>(s);
    s_m1 += prob * sd;
    s_m2 += prob * sd * sd;

    for (int j = m - 1; j >= 0; --j) {
      auto sj = static_cast<std::size_t>(j);
      if (++y[sj] < 2) break;
      y[sj] = 0;
    }
  }

  TwoPlCoefficients out;
  out.var_eap = eap_m2 - eap_m1 * eap_m1;
  out.var_summed = s_m2 - s_m1 * s_m1;
  out.var_eap_true_summed = ts_m2 - ts_m1 * ts_m1;
  out.var_true_eap = quad_variance(tau_eap, w);
  out.var_true_summed = quad_variance(tcc, w);
  out.mean_posterior_var = post_var;

  double psi = model.latent.covariance(0, 0);
  out.rel_eap = out.var_true_eap / out.var_eap;
  out.rel_summed = out.var_true_summed / out.var_summed;
  out.prmse_lv = out.var_eap / psi;
  out.prmse_true_summed = out.var_eap_true_summed / out.var_true_summed;
  return out;
}

double reliability_eap_2pl(const TwoPLModel& model, const QuadratureGrid& grid) {
  return analyze_two_pl(model, grid).rel_eap;
}

double reliability_summed_2pl(const TwoPLModel& model, const QuadratureGrid& grid) {
  return analyze_two_pl(model, grid).rel_summed;
}

double prmse_lv_2pl(const TwoPLModel& model, const QuadratureGrid& grid) {
  return analyze_two_pl(model, grid).prmse_lv;
}

double prmse_true_summed_2pl(const TwoPLModel& model, const QuadratureGrid& grid) {
  return analyze_two_pl(model, grid).prmse_true_summed;
}

double two_pl_quadrature_stability(const TwoPLModel& model, const QuadratureGrid& grid) {
  double lo = grid.axes[0](0);
  double hi = grid.axes[0](grid.axes[0].size() - 1);
  QuadratureGrid fine = build_grid(model.latent, 2 * grid.size() - 1, lo, hi);
  TwoPlCoefficients a = analyze_two_pl(model, grid);
  TwoPlCoefficients b = analyze_two_pl(model, fine);
  double d = std::abs(a.rel_eap - b.rel_eap);
  d = std::max(d, std::abs(a.rel_summed - b.rel_summed));
  d = std::max(d, std::abs(a.prmse_lv - b.prmse_lv));
  d = std::max(d, std::abs(a.prmse_true_summed - b.prmse_true_summed));
  return d;
}

}  // namespace precis
