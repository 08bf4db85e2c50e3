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

#include "precis/simulation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <limits>
#include <unordered_map>

#include "precis/rng.hpp"
#include "detail/linear_ops.hpp"
#include "detail/model_kernels.hpp"
#include "detail/threading.hpp"

namespace precis {
namespace {

constexpr std::uint64_t kLatentDomain = 0;
constexpr std::uint64_t kResponseDomain = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// Lower-triangular factor L with cov = L L'. Falls back to an eigenvalue
/// square root (negatives clipped at zero) for PSD-but-singular matrices.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  std::cerr << "precis: " << what
            << " is singular; using a clipped eigenvalue square root\n";
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace

Eigen::MatrixXd sample_latents(const LatentDistribution& latent, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) throw ValidationError("need n >= 1 draws");
  const int d = latent.dim();
  Eigen::MatrixXd factor = covariance_factor(latent.covariance, "latent covariance");
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(n), d);

  detail::parallel_blocks(n, [&](std::size_t, std::size_t b, std::size_t e) {
    Eigen::VectorXd z(d);
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = Rng::substream(seed, kLatentDomain, i);
      for (int k = 0; k < d; ++k) z(k) = rng.normal();
      draws.row(static_cast<Eigen::Index>(i)) = (latent.mean + factor * z).transpose();
    }
  });
  return draws;
}

namespace {

struct ResponseSimulator {
  const Eigen::MatrixXd& latents;
  std::uint64_t seed;

  Eigen::MatrixXd operator()(const LinearFactorModel& m) const {
    const auto n = latents.rows();
    Eigen::MatrixXd factor = covariance_factor(m.unique_covariance, "unique covariance");
    Eigen::MatrixXd y(n, m.n_items());
    detail::parallel_blocks(static_cast<std::size_t>(n),
                            [&](std::size_t, std::size_t b, std::size_t e) {
      Eigen::VectorXd z(m.n_items());
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(seed, kResponseDomain, i);
        for (int j = 0; j < m.n_items(); ++j) z(j) = rng.normal();
        const auto row = static_cast<Eigen::Index>(i);
        y.row(row) =
            (m.intercepts + m.loadings * latents.row(row).transpose() + factor * z)
                .transpose();
      }
    });
    return y;
  }

  Eigen::MatrixXd operator()(const TwoPLModel& m) const {
    const auto n = latents.rows();
    Eigen::MatrixXd y(n, m.n_items());
    detail::parallel_blocks(static_cast<std::size_t>(n),
                            [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(seed, kResponseDomain, i);
        const auto row = static_cast<Eigen::Index>(i);
        for (int j = 0; j < m.n_items(); ++j) {
          double p1 = logistic(m.intercepts(j) + m.slopes.row(j).dot(latents.row(row)));
          y(row, j) = rng.uniform01() < p1 ? 1.0 : 0.0;
        }
      }
    });
    return y;
  }

  static int draw_graded(const GradedItem& item, const Eigen::VectorXd& eta, Rng& rng) {
    // code = number of cumulative thresholds passed by one uniform draw
    double u = rng.uniform01();
    int code = 0;
    for (std::size_t k = 0; k < item.thresholds.size(); ++k) {
      double cum = logistic(item.slopes.dot(eta) - item.thresholds[k]);
      if (u < cum) ++code;
      else break;
    }
    return code;
  }

  Eigen::MatrixXd operator()(const GradedResponseModel& m) const {
    const auto n = latents.rows();
    Eigen::MatrixXd y(n, m.n_items());
    detail::parallel_blocks(static_cast<std::size_t>(n),
                            [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(seed, kResponseDomain, i);
        const auto row = static_cast<Eigen::Index>(i);
        Eigen::VectorXd eta = latents.row(row).transpose();
        for (int j = 0; j < m.n_items(); ++j)
          y(row, j) = static_cast<double>(
              draw_graded(m.items[static_cast<std::size_t>(j)], eta, rng));
      }
    });
    return y;
  }

  Eigen::MatrixXd operator()(const HurdleGradedModel& m) const {
    const auto n = latents.rows();
    Eigen::MatrixXd y(n, 2 * m.n_pairs());
    detail::parallel_blocks(static_cast<std::size_t>(n),
                            [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(seed, kResponseDomain, i);
        const auto row = static_cast<Eigen::Index>(i);
        Eigen::VectorXd eta = latents.row(row).transpose();
        for (int p = 0; p < m.n_pairs(); ++p) {
          const auto& pair = m.pairs[static_cast<std::size_t>(p)];
          int pres = draw_graded(pair.presence, eta, rng);
          y(row, 2 * p) = static_cast<double>(pres);
          y(row, 2 * p + 1) =
              pres == 1 ? static_cast<double>(draw_graded(pair.frequency, eta, rng)) : kNaN;
        }
      }
    });
    return y;
  }
};

}  // namespace

Eigen::MatrixXd simulate_responses(const ModelSpec& spec, const Eigen::MatrixXd& latents,
                                   std::uint64_t seed) {
  if (latents.cols() != latent_dim(spec))
    throw ShapeMismatch("latent draws do not match the model dimension");
  return std::visit(ResponseSimulator{latents, seed}, spec);
}

McSample make_mc_sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
  McSample sample;
  sample.n = n;
  sample.seed = seed;
  sample.model = spec;
  sample.latents = sample_latents(std::visit([](const auto& m) { return m.latent; }, spec),
                                  n, seed);
  sample.responses = simulate_responses(spec, sample.latents, seed);
  return sample;
}

namespace {

/// EAP scores for discrete models, memoized per distinct response pattern.
/// For two-dimensional models with simple structure (every item loading on
/// one dimension) the pattern likelihood factorizes over the two axes, so
/// posterior sums reduce to a weight-matrix product between the two per-axis
/// likelihood vectors.
class DiscreteEapEngine {
 public:
  DiscreteEapEngine(const ModelSpec& spec, const QuadratureGrid& grid,
                    std::vector<ScoreDefinition> targets)
      : spec_(spec), grid_(grid), targets_(std::move(targets)) {
    const int d = latent_dim(spec_);
    if (grid_.dim() != d) throw ShapeMismatch("grid dimension does not match the model");
    m_ = n_manifest(spec_);
    for (const auto& t : targets_) {
      if (!t.latent()) throw ValidationError("EAP targets must be latent scores");
      validate_score(spec_, t);
    }
    separable_ = d == 2 && detect_separable();
    if (separable_) build_separable();
    else build_generic();
  }

  std::size_t n_targets() const { return targets_.size(); }

  /// Deterministic bulk evaluation: one column per target.
  Eigen::MatrixXd eaps_for_rows(const Eigen::MatrixXd& responses) const {
    const auto n = responses.rows();
    // collect distinct patterns in first-seen order
    std::unordered_map<std::string, int> index;
    index.reserve(4096);
    std::vector<int> row_pattern(static_cast<std::size_t>(n));
    std::vector<std::string> keys;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::string key = encode_row(responses, i);
      auto [it, inserted] = index.emplace(std::move(key), static_cast<int>(keys.size()));
      if (inserted) keys.push_back(it->first);
      row_pattern[static_cast<std::size_t>(i)] = it->second;
    }

    Eigen::MatrixXd distinct(static_cast<Eigen::Index>(keys.size()),
                             static_cast<Eigen::Index>(targets_.size()));
    detail::parallel_blocks(keys.size(), [&](std::size_t, std::size_t b, std::size_t e) {
      std::vector<double> vals(targets_.size());
      for (std::size_t k = b; k < e; ++k) {
        compute(keys[k], vals);
        for (std::size_t t = 0; t < targets_.size(); ++t)
          distinct(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = vals[t];
      }
    });

    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(targets_.size()));
    for (Eigen::Index i = 0; i < n; ++i)
      out.row(i) = distinct.row(row_pattern[static_cast<std::size_t>(i)]);
    return out;
  }

 private:
  std::string encode_row(const Eigen::MatrixXd& responses, Eigen::Index row) const {
    std::string key(static_cast<std::size_t>(m_), '\0');
    for (int j = 0; j < m_; ++j) {
      double v = responses(row, j);
      key[static_cast<std::size_t>(j)] =
          std::isnan(v) ? static_cast<char>(0xFF) : static_cast<char>(static_cast<int>(v));
    }
    return key;
  }

  bool detect_separable() {
    dim_of_item_.assign(static_cast<std::size_t>(m_), 0);
    const auto slopes_of = [&](int j) -> Eigen::VectorXd {
      struct V {
        int j;
        Eigen::VectorXd operator()(const LinearFactorModel&) const { return {}; }
        Eigen::VectorXd operator()(const TwoPLModel& m) const {
          return m.slopes.row(j).transpose();
        }
        Eigen::VectorXd operator()(const GradedResponseModel& m) const {
          return m.items[static_cast<std::size_t>(j)].slopes;
        }
        Eigen::VectorXd operator()(const HurdleGradedModel& m) const {
          const auto& p = m.pairs[static_cast<std::size_t>(j / 2)];
          return j % 2 == 0 ? p.presence.slopes : p.frequency.slopes;
        }
      };
      return std::visit(V{j}, spec_);
    };
    for (int j = 0; j < m_; ++j) {
      Eigen::VectorXd s = slopes_of(j);
      bool on0 = s(0) != 0.0, on1 = s(1) != 0.0;
      if (on0 && on1) return false;
      dim_of_item_[static_cast<std::size_t>(j)] = on1 ? 1 : 0;
    }
    return true;
  }

  void build_generic() {
    const int G = grid_.size();
    int max_cat = 0;
    for (int j = 0; j < m_; ++j) max_cat = std::max(max_cat, n_categories(spec_, j));
    log_table_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(max_cat),
                      Eigen::VectorXd());
    max_cat_ = max_cat;
    Eigen::MatrixXd probs(m_, max_cat);
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < n_categories(spec_, j); ++k)
        log_table_[static_cast<std::size_t>(j * max_cat + k)] = Eigen::VectorXd(G);
    for (int i = 0; i < G; ++i) {
      Eigen::VectorXd node = grid_.nodes.row(i).transpose();
      detail::item_prob_table(spec_, node, probs);
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < n_categories(spec_, j); ++k)
          log_table_[static_cast<std::size_t>(j * max_cat + k)](i) = std::log(probs(j, k));
    }
    xi_.resize(targets_.size());
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      xi_[t].resize(G);
      for (int i = 0; i < G; ++i) {
        Eigen::VectorXd node = grid_.nodes.row(i).transpose();
        xi_[t](i) = latent_score_at(spec_, targets_[t], node);
      }
    }
  }

  void build_separable() {
    const int n0 = static_cast<int>(grid_.axes[0].size());
    const int n1 = static_cast<int>(grid_.axes[1].size());
    weight_mat_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(grid_.weights.data(), n0, n1);
    int max_cat = 0;
    for (int j = 0; j < m_; ++j) max_cat = std::max(max_cat, n_categories(spec_, j));
    max_cat_ = max_cat;
    axis_log_table_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(max_cat),
                           Eigen::VectorXd());
    for (int j = 0; j < m_; ++j) {
      int dim = dim_of_item_[static_cast<std::size_t>(j)];
      const Eigen::VectorXd& axis = grid_.axes[static_cast<std::size_t>(dim)];
      for (int k = 0; k < n_categories(spec_, j); ++k) {
        Eigen::VectorXd col(axis.size());
        for (Eigen::Index i = 0; i < axis.size(); ++i) {
          Eigen::Vector2d eta = Eigen::Vector2d::Zero();
          eta(dim) = axis(i);
          col(i) = std::log(item_response_prob(spec_, j, k, eta));
        }
        axis_log_table_[static_cast<std::size_t>(j * max_cat + k)] = std::move(col);
      }
    }
    // per-target weighted score surface M_t = W .* Xi_t, so that the
    // posterior numerator is a' M_t b
    target_mat_.resize(targets_.size());
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      Eigen::MatrixXd M(n0, n1);
      for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1) {
          Eigen::Vector2d eta(grid_.axes[0](i0), grid_.axes[1](i1));
          M(i0, i1) = latent_score_at(spec_, targets_[t], eta) * weight_mat_(i0, i1);
        }
      target_mat_[t] = std::move(M);
    }
  }

  void compute(const std::string& key, std::vector<double>& out) const {
    if (separable_) compute_separable(key, out);
    else compute_generic(key, out);
  }

  void compute_generic(const std::string& key, std::vector<double>& out) const {
    const int G = grid_.size();
    Eigen::VectorXd loglik = Eigen::VectorXd::Zero(G);
    for (int j = 0; j < m_; ++j) {
      auto code = static_cast<unsigned char>(key[static_cast<std::size_t>(j)]);
      if (code == 0xFF) continue;
      loglik += log_table_[static_cast<std::size_t>(j * max_cat_ + code)];
    }
    Eigen::VectorXd lik = loglik.array().exp();
    double denom = grid_.weights.dot(lik);
    if (denom < 1e-300) throw ZeroMarginal("pattern probability underflows");
    for (std::size_t t = 0; t < targets_.size(); ++t)
      out[t] = grid_.weights.cwiseProduct(xi_[t]).dot(lik) / denom;
  }

  void compute_separable(const std::string& key, std::vector<double>& out) const {
    const int n0 = static_cast<int>(grid_.axes[0].size());
    const int n1 = static_cast<int>(grid_.axes[1].size());
    Eigen::VectorXd la = Eigen::VectorXd::Zero(n0), lb = Eigen::VectorXd::Zero(n1);
    for (int j = 0; j < m_; ++j) {
      auto code = static_cast<unsigned char>(key[static_cast<std::size_t>(j)]);
      if (code == 0xFF) continue;
      const auto& col = axis_log_table_[static_cast<std::size_t>(j * max_cat_ + code)];
      if (dim_of_item_[static_cast<std::size_t>(j)] == 0) la += col;
      else lb += col;
    }
    Eigen::VectorXd a = la.array().exp();
    Eigen::VectorXd b = lb.array().exp();
    Eigen::VectorXd wb = weight_mat_ * b;
    double denom = a.dot(wb);
    if (denom < 1e-300) throw ZeroMarginal("pattern probability underflows");
    for (std::size_t t = 0; t < targets_.size(); ++t)
      out[t] = a.dot(target_mat_[t] * b) / denom;
  }

  const ModelSpec& spec_;
  const QuadratureGrid& grid_;
  std::vector<ScoreDefinition> targets_;
  int m_ = 0;
  int max_cat_ = 0;
  bool separable_ = false;
  std::vector<int> dim_of_item_;

  // generic path
  std::vector<Eigen::VectorXd> log_table_;  // [item * max_cat + cat] -> per-node log prob
  std::vector<Eigen::VectorXd> xi_;         // per-target node values

  // separable path
  Eigen::MatrixXd weight_mat_;                  // n0 x n1
  std::vector<Eigen::VectorXd> axis_log_table_; // [item * max_cat + cat] -> per-axis-node
  std::vector<Eigen::MatrixXd> target_mat_;     // W .* Xi per target
};

Eigen::VectorXd summed_scores_rows(const ModelSpec& spec, const Eigen::MatrixXd& responses) {
  const auto n = responses.rows();
  Eigen::VectorXd out(n);
  if (const auto* hurdle = std::get_if<HurdleGradedModel>(&spec)) {
    const int pairs = hurdle->n_pairs();
    detail::parallel_blocks(static_cast<std::size_t>(n),
                            [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        double s = 0.0;
        for (int p = 0; p < pairs; ++p)
          if (responses(row, 2 * p) != 0.0) s += responses(row, 2 * p + 1) + 1.0;
        out(row) = s;
      }
    });
    return out;
  }
  out = responses.rowwise().sum();
  return out;
}

}  // namespace

Eigen::VectorXd compute_observed_scores(const ModelSpec& spec,
                                        const Eigen::MatrixXd& responses,
                                        const ScoreDefinition& score,
                                        const QuadratureGrid& grid) {
  if (!score.observed()) throw ValidationError("expected an observed score kind");
  if (responses.cols() != n_manifest(spec))
    throw ShapeMismatch("response columns do not match the model");
  if (score.kind == ScoreDefinition::Kind::Summed) return summed_scores_rows(spec, responses);

  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    auto [r, g] = detail::linear_eap_score_coeffs(*lin, score.target_score());
    return (responses * r).array() + g;
  }
  DiscreteEapEngine engine(spec, grid, {score.target_score()});
  return engine.eaps_for_rows(responses).col(0);
}

Eigen::VectorXd compute_latent_scores(const ModelSpec& spec, const Eigen::MatrixXd& latents,
                                      const ScoreDefinition& score,
                                      const QuadratureGrid& grid) {
  if (!score.latent()) throw ValidationError("expected a latent score kind");
  validate_score(spec, score);
  if (latents.cols() != latent_dim(spec))
    throw ShapeMismatch("latent columns do not match the model");
  if (score.kind == ScoreDefinition::Kind::LvComponent) return latents.col(score.component);
  // true summed score via the true-score curve of the summed score
  return true_score_values(spec, ScoreDefinition::summed(), latents, grid);
}

ResponsePattern pattern_row(const Eigen::MatrixXd& responses, std::size_t row) {
  const auto r = static_cast<Eigen::Index>(row);
  std::vector<double> values(static_cast<std::size_t>(responses.cols()), 0.0);
  std::vector<std::uint8_t> missing(values.size(), 0);
  for (Eigen::Index j = 0; j < responses.cols(); ++j) {
    double v = responses(r, j);
    if (std::isnan(v)) missing[static_cast<std::size_t>(j)] = 1;
    else values[static_cast<std::size_t>(j)] = v;
  }
  return {std::move(values), std::move(missing)};
}

void dump_sample_csv(std::ostream& out, const McSample& sample,
                     const std::vector<std::pair<std::string, Eigen::VectorXd>>& scores) {
  const int d = static_cast<int>(sample.latents.cols());
  const int m = static_cast<int>(sample.responses.cols());
  const bool discrete = discrete_manifest(sample.model);
  out.precision(17);

  for (int k = 0; k < d; ++k) out << (k ? "," : "") << "eta_" << (k + 1);
  for (int j = 0; j < m; ++j) out << ",y_" << (j + 1);
  for (const auto& [name, col] : scores) out << "," << name;
  out << "\n";

  for (Eigen::Index i = 0; i < sample.latents.rows(); ++i) {
    for (int k = 0; k < d; ++k) out << (k ? "," : "") << sample.latents(i, k);
    for (int j = 0; j < m; ++j) {
      double v = sample.responses(i, j);
      out << ",";
      if (std::isnan(v)) continue;  // NA encoded as empty field
      if (discrete) out << category_value(sample.model, j, static_cast<int>(v));
      else out << v;
    }
    for (const auto& [name, col] : scores) out << "," << col(i);
    out << "\n";
  }
}

}  // namespace precis
