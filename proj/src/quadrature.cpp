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

#include "precis/quadrature.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "detail/linear_ops.hpp"
#include "detail/model_kernels.hpp"
#include "detail/threading.hpp"

namespace precis {
namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// P(y >= k | eta) under the cumulative-logit graded response function.
double grm_cumulative(const GradedItem& item, int k, const Eigen::VectorXd& eta) {
  if (k <= 0) return 1.0;
  if (k >= item.n_categories()) return 0.0;
  return logistic(item.slopes.dot(eta) - item.thresholds[static_cast<std::size_t>(k - 1)]);
}

double grm_prob(const GradedItem& item, int k, const Eigen::VectorXd& eta) {
  double p = grm_cumulative(item, k, eta) - grm_cumulative(item, k + 1, eta);
  return p > 0.0 ? p : 0.0;
}

const GradedItem& hurdle_item(const HurdleGradedModel& m, int item) {
  const auto& pair = m.pairs[static_cast<std::size_t>(item / 2)];
  return item % 2 == 0 ? pair.presence : pair.frequency;
}

}  // namespace

QuadratureGrid build_grid(const LatentDistribution& latent, int nodes_per_dim,
                          double lo, double hi) {
  if (nodes_per_dim < 2) throw GridTooCoarse("need at least 2 nodes per dimension");
  if (!(lo < hi)) throw ValidationError("grid range must satisfy lo < hi");
  const int d = latent.dim();
  if (d > 2) throw UnsupportedModel("tensor-product grids support d <= 2");

  Eigen::VectorXd axis(nodes_per_dim);
  double step = (hi - lo) / static_cast<double>(nodes_per_dim - 1);
  for (int i = 0; i < nodes_per_dim; ++i) axis(i) = lo + step * i;

  QuadratureGrid grid;
  grid.axes.assign(static_cast<std::size_t>(d), axis);

  Eigen::LLT<Eigen::MatrixXd> llt(latent.covariance);
  if (llt.info() != Eigen::Success)
    throw NonPSDCovariance("latent covariance must be positive definite for quadrature");

  if (d == 1) {
    grid.nodes = axis;
    grid.weights.resize(nodes_per_dim);
    for (int i = 0; i < nodes_per_dim; ++i) {
      double z = (axis(i) - latent.mean(0));
      grid.weights(i) = std::exp(-0.5 * z * z / latent.covariance(0, 0));
    }
  } else {
    const int n = nodes_per_dim * nodes_per_dim;
    grid.nodes.resize(n, 2);
    grid.weights.resize(n);
    for (int i0 = 0; i0 < nodes_per_dim; ++i0) {
      for (int i1 = 0; i1 < nodes_per_dim; ++i1) {
        int idx = i0 * nodes_per_dim + i1;
        Eigen::Vector2d x(axis(i0), axis(i1));
        grid.nodes.row(idx) = x;
        Eigen::VectorXd z = llt.matrixL().solve(x - latent.mean);
        grid.weights(idx) = std::exp(-0.5 * z.squaredNorm());
      }
    }
  }
  grid.weights /= grid.weights.sum();
  return grid;
}

namespace {

/// Probabilists' Gauss-Hermite rule: nodes are the eigenvalues of the Jacobi
/// matrix (off-diagonal sqrt(k)), weights the squared first eigenvector
/// components. Integrates polynomials up to degree 2n - 1 exactly against
/// the standard normal density.
void hermite_rule(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes = es.eigenvalues();
  weights = es.eigenvectors().row(0).transpose().cwiseAbs2();
  weights /= weights.sum();
}

}  // namespace

QuadratureGrid build_gauss_hermite_grid(const LatentDistribution& latent, int nodes_per_dim) {
  if (nodes_per_dim < 2) throw GridTooCoarse("need at least 2 nodes per dimension");
  const int d = latent.dim();
  if (d > 2) throw UnsupportedModel("tensor-product grids support d <= 2");

  Eigen::VectorXd z, w;
  hermite_rule(nodes_per_dim, z, w);

  QuadratureGrid grid;
  if (d == 1) {
    double sd = std::sqrt(latent.covariance(0, 0));
    grid.nodes = (z.array() * sd + latent.mean(0)).matrix();
    grid.weights = w;
    grid.axes.push_back(grid.nodes.col(0));
    return grid;
  }

  double sd0 = std::sqrt(latent.covariance(0, 0));
  double sd1 = std::sqrt(latent.covariance(1, 1));
  double rho = latent.covariance(0, 1) / (sd0 * sd1);
  if (!(rho > -1.0 && rho < 1.0))
    throw NonPSDCovariance("latent covariance must be positive definite for quadrature");
  Eigen::VectorXd a0 = (z.array() * sd0 + latent.mean(0)).matrix();
  Eigen::VectorXd a1 = (z.array() * sd1 + latent.mean(1)).matrix();
  grid.axes = {a0, a1};

  const int n = nodes_per_dim * nodes_per_dim;
  grid.nodes.resize(n, 2);
  grid.weights.resize(n);
  double c = 1.0 - rho * rho;
  for (int i0 = 0; i0 < nodes_per_dim; ++i0) {
    for (int i1 = 0; i1 < nodes_per_dim; ++i1) {
      int idx = i0 * nodes_per_dim + i1;
      grid.nodes(idx, 0) = a0(i0);
      grid.nodes(idx, 1) = a1(i1);
      // joint density over product of marginals at the standardized node
      double ratio = std::exp(-0.5 * (rho * rho * (z(i0) * z(i0) + z(i1) * z(i1)) -
                                      2.0 * rho * z(i0) * z(i1)) /
                              c) /
                     std::sqrt(c);
      grid.weights(idx) = w(i0) * w(i1) * ratio;
    }
  }
  grid.weights /= grid.weights.sum();
  return grid;
}

double item_response_prob(const ModelSpec& spec, int item, int category,
                          const Eigen::VectorXd& eta) {
  if (item < 0 || item >= n_manifest(spec))
    throw InadmissiblePattern("item index out of range");
  if (category < 0 || category >= n_categories(spec, item))
    throw InadmissiblePattern("category out of range for item");

  struct V {
    int item, category;
    const Eigen::VectorXd& eta;
    double operator()(const LinearFactorModel&) const {
      throw UnsupportedModel("continuous-response model has no category probabilities");
    }
    double operator()(const TwoPLModel& m) const {
      double z = m.intercepts(item) + m.slopes.row(item).dot(eta);
      return category == 1 ? logistic(z) : logistic(-z);
    }
    double operator()(const GradedResponseModel& m) const {
      return grm_prob(m.items[static_cast<std::size_t>(item)], category, eta);
    }
    double operator()(const HurdleGradedModel& m) const {
      return grm_prob(hurdle_item(m, item), category, eta);
    }
  };
  return std::visit(V{item, category, eta}, spec);
}

double log_pattern_likelihood(const ModelSpec& spec, const ResponsePattern& y,
                              const Eigen::VectorXd& eta) {
  require_admissible(spec, y);
  if (!discrete_manifest(spec))
    throw UnsupportedModel("pattern likelihoods are defined for discrete models");
  double ll = 0.0;
  for (int j = 0; j < y.size(); ++j) {
    if (y.is_missing(j)) continue;  // structural NA contributes factor 1
    int code = static_cast<int>(y.values[static_cast<std::size_t>(j)]);
    ll += std::log(item_response_prob(spec, j, code, eta));
  }
  return ll;
}

double pattern_likelihood(const ModelSpec& spec, const ResponsePattern& y,
                          const Eigen::VectorXd& eta) {
  return std::exp(log_pattern_likelihood(spec, y, eta));
}

double marginal_probability(const ModelSpec& spec, const ResponsePattern& y,
                            const QuadratureGrid& grid) {
  if (grid.dim() != latent_dim(spec))
    throw ShapeMismatch("grid dimension does not match the model");
  double p = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd node = grid.nodes.row(i).transpose();
    p += grid.weights(i) * pattern_likelihood(spec, y, node);
  }
  return p;
}

double expected_summed_score(const ModelSpec& spec, const Eigen::VectorXd& eta) {
  struct V {
    const Eigen::VectorXd& eta;
    double operator()(const LinearFactorModel& m) const {
      return m.intercepts.sum() + (m.loadings * eta).sum();
    }
    double operator()(const TwoPLModel& m) const {
      double s = 0.0;
      for (int j = 0; j < m.n_items(); ++j)
        s += logistic(m.intercepts(j) + m.slopes.row(j).dot(eta));
      return s;
    }
    double operator()(const GradedResponseModel& m) const {
      double s = 0.0;
      for (const auto& item : m.items)
        for (int k = 1; k < item.n_categories(); ++k)
          s += static_cast<double>(k) * grm_prob(item, k, eta);
      return s;
    }
    double operator()(const HurdleGradedModel& m) const {
      // E(original code) = P(presence) * E(frequency value); the stages are
      // conditionally independent given eta.
      double s = 0.0;
      for (const auto& pair : m.pairs) {
        double pres = grm_cumulative(pair.presence, 1, eta);
        double freq = 0.0;
        for (int k = 0; k < pair.frequency.n_categories(); ++k)
          freq += static_cast<double>(k + 1) * grm_prob(pair.frequency, k, eta);
        s += pres * freq;
      }
      return s;
    }
  };
  return std::visit(V{eta}, spec);
}

double latent_score_at(const ModelSpec& spec, const ScoreDefinition& latent_score,
                       const Eigen::VectorXd& eta) {
  switch (latent_score.kind) {
    case ScoreDefinition::Kind::LvComponent:
      return eta(latent_score.component);
    case ScoreDefinition::Kind::TrueSummed:
      return expected_summed_score(spec, eta);
    default:
      throw ValidationError("latent_score_at requires a latent score kind");
  }
}

double eap_score(const ModelSpec& spec, const ResponsePattern& y,
                 const ScoreDefinition& latent_target, const QuadratureGrid& grid) {
  if (!latent_target.latent()) throw ValidationError("EAP target must be a latent score");
  validate_score(spec, latent_target);
  double num = 0.0, denom = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd node = grid.nodes.row(i).transpose();
    double lik = grid.weights(i) * pattern_likelihood(spec, y, node);
    denom += lik;
    num += lik * latent_score_at(spec, latent_target, node);
  }
  if (denom < 1e-300) throw ZeroMarginal("pattern probability underflows");
  return num / denom;
}

namespace {

double summed_score_of_pattern(const ModelSpec& spec, const ResponsePattern& y) {
  if (const auto* hurdle = std::get_if<HurdleGradedModel>(&spec)) {
    double s = 0.0;
    for (int p = 0; p < hurdle->n_pairs(); ++p) {
      if (y.values[static_cast<std::size_t>(2 * p)] == 0.0) continue;  // original y = 0
      s += y.values[static_cast<std::size_t>(2 * p + 1)] + 1.0;        // codes 0..2 -> 1..3
    }
    return s;
  }
  double s = 0.0;
  for (int j = 0; j < y.size(); ++j) s += y.values[static_cast<std::size_t>(j)];
  return s;
}

}  // namespace

double observed_score_value(const ModelSpec& spec, const ScoreDefinition& observed,
                            const ResponsePattern& y, const QuadratureGrid& grid) {
  if (!observed.observed()) throw ValidationError("expected an observed score kind");
  require_admissible(spec, y);
  if (observed.kind == ScoreDefinition::Kind::Summed) return summed_score_of_pattern(spec, y);
  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    auto [r, g] = detail::linear_eap_score_coeffs(*lin, observed.target_score());
    Eigen::Map<const Eigen::VectorXd> vals(y.values.data(),
                                           static_cast<Eigen::Index>(y.values.size()));
    return r.dot(vals) + g;
  }
  return eap_score(spec, y, observed.target_score(), grid);
}

std::vector<ResponsePattern> enumerate_patterns(const ModelSpec& spec, std::size_t cap) {
  if (!discrete_manifest(spec))
    throw UnsupportedModel("continuous manifest variables have no finite pattern space");
  std::size_t total = admissible_pattern_count(spec, cap);

  const int m = n_manifest(spec);
  const auto* hurdle = std::get_if<HurdleGradedModel>(&spec);
  // odometer over per-unit admissible states; rightmost unit moves fastest
  const int units = hurdle ? hurdle->n_pairs() : m;
  std::vector<int> state(static_cast<std::size_t>(units), 0);
  std::vector<int> radix(static_cast<std::size_t>(units));
  for (int u = 0; u < units; ++u)
    radix[static_cast<std::size_t>(u)] =
        hurdle ? 1 + hurdle->pairs[static_cast<std::size_t>(u)].frequency.n_categories()
               : n_categories(spec, u);

  std::vector<ResponsePattern> out;
  out.reserve(total);
  for (std::size_t count = 0; count < total; ++count) {
    ResponsePattern y(std::vector<double>(static_cast<std::size_t>(m), 0.0));
    if (hurdle) {
      for (int u = 0; u < units; ++u) {
        int s = state[static_cast<std::size_t>(u)];
        if (s == 0) {
          y.values[static_cast<std::size_t>(2 * u)] = 0.0;
          y.missing[static_cast<std::size_t>(2 * u + 1)] = 1;
        } else {
          y.values[static_cast<std::size_t>(2 * u)] = 1.0;
          y.values[static_cast<std::size_t>(2 * u + 1)] = static_cast<double>(s - 1);
        }
      }
    } else {
      for (int u = 0; u < units; ++u)
        y.values[static_cast<std::size_t>(u)] = static_cast<double>(state[static_cast<std::size_t>(u)]);
    }
    out.push_back(std::move(y));
    for (int u = units - 1; u >= 0; --u) {
      auto su = static_cast<std::size_t>(u);
      if (++state[su] < radix[su]) break;
      state[su] = 0;
    }
  }
  return out;
}

double true_score_curve(const ModelSpec& spec, const ScoreDefinition& observed,
                        const Eigen::VectorXd& eta, const QuadratureGrid& grid,
                        std::size_t cap) {
  if (!observed.observed()) throw ValidationError("true scores belong to observed scores");
  if (observed.kind == ScoreDefinition::Kind::Summed)
    return expected_summed_score(spec, eta);

  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    auto [r, g] = detail::linear_eap_score_coeffs(*lin, observed.target_score());
    return r.dot(lin->intercepts + lin->loadings * eta) + g;
  }

  // E(x | eta) = sum_y x(y) P(y | eta) over the enumerated pattern space
  auto patterns = enumerate_patterns(spec, cap);
  double t = 0.0;
  for (const auto& y : patterns) {
    double x = observed_score_value(spec, observed, y, grid);
    t += x * pattern_likelihood(spec, y, eta);
  }
  return t;
}

Eigen::VectorXd true_score_values(const ModelSpec& spec, const ScoreDefinition& observed,
                                  const Eigen::MatrixXd& etas, const QuadratureGrid& grid,
                                  std::size_t cap) {
  if (!observed.observed()) throw ValidationError("true scores belong to observed scores");
  const auto n = static_cast<std::size_t>(etas.rows());
  Eigen::VectorXd out(etas.rows());

  if (observed.kind == ScoreDefinition::Kind::Summed) {
    if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
      double base = lin->intercepts.sum();
      Eigen::VectorXd colsum = lin->loadings.colwise().sum().transpose();
      out = (etas * colsum).array() + base;
      return out;
    }
    detail::parallel_blocks(n, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Eigen::VectorXd eta = etas.row(static_cast<Eigen::Index>(i)).transpose();
        out(static_cast<Eigen::Index>(i)) = expected_summed_score(spec, eta);
      }
    });
    return out;
  }

  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    auto [r, g] = detail::linear_eap_score_coeffs(*lin, observed.target_score());
    Eigen::VectorXd slope = lin->loadings.transpose() * r;
    double base = r.dot(lin->intercepts) + g;
    out = (etas * slope).array() + base;
    return out;
  }

  // Discrete EAP-score true curve: memoize the per-pattern EAP values, then
  // evaluate sum_y xi_tilde(y) P(y | eta) at each row via a per-row item
  // probability table.
  auto patterns = enumerate_patterns(spec, cap);
  const auto npat = patterns.size();
  const int m = n_manifest(spec);
  Eigen::VectorXd xhat(static_cast<Eigen::Index>(npat));
  for (std::size_t p = 0; p < npat; ++p)
    xhat(static_cast<Eigen::Index>(p)) = observed_score_value(spec, observed, patterns[p], grid);

  std::vector<std::vector<std::int16_t>> codes(npat);  // -1 = missing
  for (std::size_t p = 0; p < npat; ++p) {
    codes[p].resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
      codes[p][static_cast<std::size_t>(j)] =
          patterns[p].is_missing(j)
              ? std::int16_t{-1}
              : static_cast<std::int16_t>(patterns[p].values[static_cast<std::size_t>(j)]);
  }
  int max_cat = 0;
  for (int j = 0; j < m; ++j) max_cat = std::max(max_cat, n_categories(spec, j));

  detail::parallel_blocks(n, [&](std::size_t, std::size_t b, std::size_t e) {
    Eigen::MatrixXd table(m, max_cat);
    for (std::size_t i = b; i < e; ++i) {
      Eigen::VectorXd eta = etas.row(static_cast<Eigen::Index>(i)).transpose();
      detail::item_prob_table(spec, eta, table);
      double t = 0.0;
      for (std::size_t p = 0; p < npat; ++p) {
        double lik = 1.0;
        for (int j = 0; j < m; ++j) {
          std::int16_t c = codes[p][static_cast<std::size_t>(j)];
          if (c >= 0) lik *= table(j, c);
        }
        t += xhat(static_cast<Eigen::Index>(p)) * lik;
      }
      out(static_cast<Eigen::Index>(i)) = t;
    }
  });
  return out;
}

namespace detail {

void item_prob_table(const ModelSpec& spec, const Eigen::VectorXd& eta,
                     Eigen::MatrixXd& table) {
  struct V {
    const Eigen::VectorXd& eta;
    Eigen::MatrixXd& table;
    void operator()(const LinearFactorModel&) const {
      throw UnsupportedModel("continuous-response model has no category probabilities");
    }
    void operator()(const TwoPLModel& m) const {
      for (int j = 0; j < m.n_items(); ++j) {
        double p1 = logistic(m.intercepts(j) + m.slopes.row(j).dot(eta));
        table(j, 0) = 1.0 - p1;
        table(j, 1) = p1;
      }
    }
    void operator()(const GradedResponseModel& m) const {
      for (int j = 0; j < m.n_items(); ++j) {
        const auto& item = m.items[static_cast<std::size_t>(j)];
        for (int k = 0; k < item.n_categories(); ++k) table(j, k) = grm_prob(item, k, eta);
      }
    }
    void operator()(const HurdleGradedModel& m) const {
      for (int j = 0; j < 2 * m.n_pairs(); ++j) {
        const auto& item = hurdle_item(m, j);
        for (int k = 0; k < item.n_categories(); ++k) table(j, k) = grm_prob(item, k, eta);
      }
    }
  };
  std::visit(V{eta, table}, spec);
}

}  // namespace detail

}  // namespace precis
