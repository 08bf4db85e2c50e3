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

#include "precis/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <sstream>

namespace precis {
namespace {

bool symmetric(const Eigen::MatrixXd& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + a.cwiseAbs().maxCoeff());
}

void check_psd(const Eigen::MatrixXd& a, const char* name) {
  if (!symmetric(a)) throw NonPSDCovariance(std::string(name) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  double min_ev = es.eigenvalues().minCoeff();
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (min_ev < -1e-10 * scale)
    throw NonPSDCovariance(std::string(name) + " has a negative eigenvalue");
}

void check_latent(const LatentDistribution& latent) {
  if (latent.dim() < 1) throw ShapeMismatch("latent dimension must be >= 1");
  if (latent.covariance.rows() != latent.dim() || latent.covariance.cols() != latent.dim())
    throw ShapeMismatch("latent covariance shape does not match dimension");
  check_psd(latent.covariance, "latent covariance");
}

void check_graded_item(const GradedItem& item, int d, const char* where) {
  if (item.slopes.size() != d)
    throw ShapeMismatch(std::string(where) + ": slope length does not match latent dimension");
  if (item.n_categories() < 2)
    throw ShapeMismatch(std::string(where) + ": needs at least 2 categories");
  for (std::size_t k = 1; k < item.thresholds.size(); ++k) {
    if (!(item.thresholds[k] > item.thresholds[k - 1]))
      throw NonMonotoneThresholds(std::string(where) +
                                  ": thresholds must be strictly increasing");
  }
  for (double c : item.thresholds)
    if (!std::isfinite(c)) throw ValidationError(std::string(where) + ": non-finite threshold");
}

struct Validator {
  void operator()(const LinearFactorModel& m) const {
    check_latent(m.latent);
    const int n = m.n_items();
    const int d = m.latent.dim();
    if (n < 1) throw ShapeMismatch("linear factor model needs at least one item");
    if (m.loadings.rows() != n || m.loadings.cols() != d)
      throw ShapeMismatch("loadings must be m x d");
    if (m.unique_covariance.rows() != n || m.unique_covariance.cols() != n)
      throw ShapeMismatch("unique covariance must be m x m");
    check_psd(m.unique_covariance, "unique covariance");
    if (m.unique_covariance.diagonal().minCoeff() <= 0.0)
      throw NonPSDCovariance("unique covariance diagonal must be strictly positive");
  }

  void operator()(const TwoPLModel& m) const {
    check_latent(m.latent);
    const int n = m.n_items();
    if (n < 1) throw ShapeMismatch("2PL model needs at least one item");
    if (m.slopes.rows() != n || m.slopes.cols() != m.latent.dim())
      throw ShapeMismatch("slopes must be m x d");
  }

  void operator()(const GradedResponseModel& m) const {
    check_latent(m.latent);
    for (std::size_t j = 0; j < m.items.size(); ++j) {
      std::string where = "item " + std::to_string(j);
      check_graded_item(m.items[j], m.latent.dim(), where.c_str());
    }
  }

  void operator()(const HurdleGradedModel& m) const {
    check_latent(m.latent);
    if (m.latent.dim() != 2) throw ShapeMismatch("hurdle model requires d = 2");
    double psi1 = m.latent.covariance(0, 0);
    double psi2 = m.latent.covariance(1, 1);
    if (psi1 <= 0.0 || psi2 <= 0.0)
      throw NonPSDCovariance("hurdle latent variances must be positive");
    double rho = m.latent.covariance(0, 1) / std::sqrt(psi1 * psi2);
    if (!(rho > -1.0 && rho < 1.0))
      throw NonPSDCovariance("hurdle latent correlation must lie in (-1, 1)");
    if (m.pairs.empty()) throw ShapeMismatch("hurdle model needs at least one item pair");
    for (std::size_t j = 0; j < m.pairs.size(); ++j) {
      const auto& p = m.pairs[j];
      std::string w1 = "pair " + std::to_string(j) + " presence";
      std::string w2 = "pair " + std::to_string(j) + " frequency";
      check_graded_item(p.presence, 2, w1.c_str());
      check_graded_item(p.frequency, 2, w2.c_str());
      if (p.presence.n_categories() != 2)
        throw ShapeMismatch(w1 + ": must be binary (K = 2)");
      if (p.frequency.n_categories() != 3)
        throw ShapeMismatch(w2 + ": must have K = 3 categories");
      // simple structure: stage 1 on LV 0 only, stage 2 on LV 1 only
      if (p.presence.slopes(1) != 0.0)
        throw ShapeMismatch(w1 + ": must not load on the severity dimension");
      if (p.frequency.slopes(0) != 0.0)
        throw ShapeMismatch(w2 + ": must not load on the susceptibility dimension");
    }
  }
};

}  // namespace

LatentDistribution LatentDistribution::standard_normal(int d) {
  return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)};
}

LatentDistribution LatentDistribution::correlated_pair(double rho) {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, rho, rho, 1.0;
  return {Eigen::VectorXd::Zero(2), cov};
}

const ModelSpec& validate_model(const ModelSpec& spec) {
  std::visit(Validator{}, spec);
  return spec;
}

int latent_dim(const ModelSpec& spec) {
  return std::visit([](const auto& m) { return m.latent.dim(); }, spec);
}

int n_manifest(const ModelSpec& spec) {
  struct V {
    int operator()(const LinearFactorModel& m) const { return m.n_items(); }
    int operator()(const TwoPLModel& m) const { return m.n_items(); }
    int operator()(const GradedResponseModel& m) const { return m.n_items(); }
    int operator()(const HurdleGradedModel& m) const { return 2 * m.n_pairs(); }
  };
  return std::visit(V{}, spec);
}

bool discrete_manifest(const ModelSpec& spec) {
  return !std::holds_alternative<LinearFactorModel>(spec);
}

int n_categories(const ModelSpec& spec, int item) {
  struct V {
    int item;
    int operator()(const LinearFactorModel&) const {
      throw UnsupportedModel("continuous-response model has no categories");
    }
    int operator()(const TwoPLModel&) const { return 2; }
    int operator()(const GradedResponseModel& m) const {
      return m.items[static_cast<std::size_t>(item)].n_categories();
    }
    int operator()(const HurdleGradedModel& m) const {
      const auto& p = m.pairs[static_cast<std::size_t>(item / 2)];
      return (item % 2 == 0) ? p.presence.n_categories() : p.frequency.n_categories();
    }
  };
  return std::visit(V{item}, spec);
}

double category_value(const ModelSpec& spec, int item, int code) {
  if (std::holds_alternative<HurdleGradedModel>(spec) && item % 2 == 1)
    return static_cast<double>(code + 1);  // frequency categories carry values 1..3
  return static_cast<double>(code);
}

std::size_t admissible_pattern_count(const ModelSpec& spec, std::size_t cap) {
  struct V {
    std::size_t cap;
    std::size_t count = 1;

    void mul(std::size_t k) {
      if (count > cap / k + 1) count = cap + 1;  // saturate, avoid overflow
      else count *= k;
    }
    std::size_t operator()(const LinearFactorModel&) {
      throw UnsupportedModel("continuous manifest variables have no finite pattern space");
    }
    std::size_t operator()(const TwoPLModel& m) {
      for (int j = 0; j < m.n_items(); ++j) mul(2);
      return count;
    }
    std::size_t operator()(const GradedResponseModel& m) {
      for (const auto& it : m.items) mul(static_cast<std::size_t>(it.n_categories()));
      return count;
    }
    std::size_t operator()(const HurdleGradedModel& m) {
      // per pair: (0, NA) plus presence=1 with each frequency category
      for (const auto& p : m.pairs)
        mul(1 + static_cast<std::size_t>(p.frequency.n_categories()));
      return count;
    }
  };
  std::size_t c = std::visit(V{cap}, spec);
  if (c > cap) {
    std::ostringstream msg;
    msg << "pattern space exceeds cap " << cap;
    throw PatternSpaceTooLarge(msg.str());
  }
  return c;
}

bool pattern_admissible(const ModelSpec& spec, const ResponsePattern& y) {
  if (y.size() != n_manifest(spec)) return false;
  if (const auto* lin = std::get_if<LinearFactorModel>(&spec)) {
    (void)lin;
    for (int j = 0; j < y.size(); ++j)
      if (y.is_missing(j) || !std::isfinite(y.values[static_cast<std::size_t>(j)]))
        return false;
    return true;
  }
  const auto* hurdle = std::get_if<HurdleGradedModel>(&spec);
  for (int j = 0; j < y.size(); ++j) {
    bool na_allowed = hurdle != nullptr && j % 2 == 1;
    if (y.is_missing(j)) {
      if (!na_allowed) return false;
      continue;
    }
    double v = y.values[static_cast<std::size_t>(j)];
    if (!(v == std::floor(v)) || v < 0.0 || v >= static_cast<double>(n_categories(spec, j)))
      return false;
  }
  if (hurdle != nullptr) {
    // stage 2 missing iff stage 1 = 0
    for (int p = 0; p < hurdle->n_pairs(); ++p) {
      bool pres_zero = y.values[static_cast<std::size_t>(2 * p)] == 0.0;
      if (pres_zero != y.is_missing(2 * p + 1)) return false;
    }
  }
  return true;
}

void require_admissible(const ModelSpec& spec, const ResponsePattern& y) {
  if (!pattern_admissible(spec, y))
    throw InadmissiblePattern("response pattern is not admissible for this model");
}

ScoreDefinition ScoreDefinition::eap_of(const ScoreDefinition& latent_score) {
  if (!latent_score.latent())
    throw ValidationError("eap_of requires a latent score target");
  ScoreDefinition s;
  s.kind = Kind::EapOf;
  s.eap_target = latent_score.kind;
  s.component = latent_score.component;
  return s;
}

ScoreDefinition ScoreDefinition::target_score() const {
  if (kind != Kind::EapOf) throw ValidationError("only EAP scores have a target");
  ScoreDefinition s;
  s.kind = eap_target;
  s.component = component;
  return s;
}

std::string ScoreDefinition::label() const {
  switch (kind) {
    case Kind::Summed: return "sum";
    case Kind::LvComponent: return "eta" + std::to_string(component + 1);
    case Kind::TrueSummed: return "true_sum";
    case Kind::EapOf: return "eap(" + target_score().label() + ")";
  }
  return "?";
}

void validate_score(const ModelSpec& spec, const ScoreDefinition& score) {
  int d = latent_dim(spec);
  if (score.kind == ScoreDefinition::Kind::LvComponent ||
      (score.kind == ScoreDefinition::Kind::EapOf &&
       score.eap_target == ScoreDefinition::Kind::LvComponent)) {
    if (score.component < 0 || score.component >= d)
      throw ValidationError("LV component index out of range");
  }
  if (score.kind == ScoreDefinition::Kind::EapOf &&
      score.eap_target != ScoreDefinition::Kind::LvComponent &&
      score.eap_target != ScoreDefinition::Kind::TrueSummed)
    throw ValidationError("EAP target must be a latent score");
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  fnv_bytes(h, &bits, sizeof bits);
}

void fnv_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
  fnv_double(h, static_cast<double>(m.rows()));
  fnv_double(h, static_cast<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) fnv_double(h, m(i, j));
}

void fnv_latent(std::uint64_t& h, const LatentDistribution& l) {
  fnv_matrix(h, l.mean);
  fnv_matrix(h, l.covariance);
}

void fnv_item(std::uint64_t& h, const GradedItem& it) {
  fnv_matrix(h, it.slopes);
  for (double c : it.thresholds) fnv_double(h, c);
  fnv_double(h, static_cast<double>(it.thresholds.size()));
}

}  // namespace

std::uint64_t model_hash(const ModelSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  struct V {
    std::uint64_t& h;
    void operator()(const LinearFactorModel& m) const {
      fnv_bytes(h, "lin", 3);
      fnv_matrix(h, m.intercepts);
      fnv_matrix(h, m.loadings);
      fnv_matrix(h, m.unique_covariance);
      fnv_latent(h, m.latent);
    }
    void operator()(const TwoPLModel& m) const {
      fnv_bytes(h, "2pl", 3);
      fnv_matrix(h, m.intercepts);
      fnv_matrix(h, m.slopes);
      fnv_latent(h, m.latent);
    }
    void operator()(const GradedResponseModel& m) const {
      fnv_bytes(h, "grm", 3);
      for (const auto& it : m.items) fnv_item(h, it);
      fnv_latent(h, m.latent);
    }
    void operator()(const HurdleGradedModel& m) const {
      fnv_bytes(h, "hur", 3);
      for (const auto& p : m.pairs) {
        fnv_item(h, p.presence);
        fnv_item(h, p.frequency);
      }
      fnv_latent(h, m.latent);
    }
  };
  std::visit(V{h}, spec);
  return h;
}

}  // namespace precis
