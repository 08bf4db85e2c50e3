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

#include "precis/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace precis {
namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vec_from_json(const json& a, const char* field) {
  if (!a.is_array()) throw ParseError(std::string(field) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(std::string(field) + " must hold numbers");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd mat_from_json(const json& a, const char* field) {
  if (!a.is_array() || a.empty())
    throw ParseError(std::string(field) + " must be a non-empty array");
  if (!a[0].is_array()) {  // flat vector == single column
    Eigen::VectorXd v = vec_from_json(a, field);
    return v;
  }
  const auto rows = static_cast<Eigen::Index>(a.size());
  const auto cols = static_cast<Eigen::Index>(a[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = a[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(field) + " rows must have equal lengths");
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number()) throw ParseError(std::string(field) + " must hold numbers");
      m(i, j) = cell.get<double>();
    }
  }
  return m;
}

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + field);
  return *it;
}

json latent_to_json(const LatentDistribution& latent) {
  return {{"dimension", latent.dim()},
          {"mean", vec_to_json(latent.mean)},
          {"covariance", mat_to_json(latent.covariance)}};
}

LatentDistribution latent_from_json(const json& j, int default_dim) {
  int d = default_dim;
  if (j.contains("dimension")) d = j["dimension"].get<int>();
  if (d < 1) throw ParseError("latent dimension must be >= 1");
  LatentDistribution latent = LatentDistribution::standard_normal(d);
  if (j.contains("mean")) latent.mean = vec_from_json(j["mean"], "latent.mean");
  if (j.contains("covariance"))
    latent.covariance = mat_from_json(j["covariance"], "latent.covariance");
  return latent;
}

json graded_item_to_json(const GradedItem& item) {
  return {{"slopes", vec_to_json(item.slopes)}, {"thresholds", item.thresholds}};
}

GradedItem graded_item_from_json(const json& j, int d) {
  GradedItem item;
  item.slopes = vec_from_json(require(j, "slopes"), "item slopes");
  if (item.slopes.size() == 1 && d > 1) {
    // scalar shorthand is only valid for unidimensional models
    throw ParseError("item slopes must list every latent dimension");
  }
  for (const auto& c : require(j, "thresholds")) {
    if (!c.is_number()) throw ParseError("thresholds must hold numbers");
    item.thresholds.push_back(c.get<double>());
  }
  return item;
}

}  // namespace

nlohmann::json model_to_json(const ModelSpec& spec) {
  struct V {
    json operator()(const LinearFactorModel& m) const {
      return {{"model_type", "linear_factor"},
              {"intercepts", vec_to_json(m.intercepts)},
              {"loadings", mat_to_json(m.loadings)},
              {"unique_covariance", mat_to_json(m.unique_covariance)},
              {"latent", latent_to_json(m.latent)}};
    }
    json operator()(const TwoPLModel& m) const {
      return {{"model_type", "2pl"},
              {"intercepts", vec_to_json(m.intercepts)},
              {"slopes", mat_to_json(m.slopes)},
              {"latent", latent_to_json(m.latent)}};
    }
    json operator()(const GradedResponseModel& m) const {
      json items = json::array();
      for (const auto& it : m.items) items.push_back(graded_item_to_json(it));
      return {{"model_type", "graded"},
              {"items", std::move(items)},
              {"latent", latent_to_json(m.latent)}};
    }
    json operator()(const HurdleGradedModel& m) const {
      json pairs = json::array();
      for (const auto& p : m.pairs) {
        pairs.push_back({{"presence",
                          {{"slope", p.presence.slopes(0)},
                           {"threshold", p.presence.thresholds[0]}}},
                         {"frequency",
                          {{"slope", p.frequency.slopes(1)},
                           {"thresholds", p.frequency.thresholds}}}});
      }
      return {{"model_type", "hurdle_graded"},
              {"item_pairs", std::move(pairs)},
              {"latent", latent_to_json(m.latent)}};
    }
  };
  return std::visit(V{}, spec);
}

ModelSpec model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model config must be a JSON object");
  std::string type = require(j, "model_type").get<std::string>();

  if (type == "linear_factor") {
    LinearFactorModel m;
    m.intercepts = vec_from_json(require(j, "intercepts"), "intercepts");
    m.loadings = mat_from_json(require(j, "loadings"), "loadings");
    if (j.contains("unique_covariance")) {
      m.unique_covariance = mat_from_json(j["unique_covariance"], "unique_covariance");
      if (m.unique_covariance.cols() == 1 && m.unique_covariance.rows() > 1)
        m.unique_covariance =
            Eigen::MatrixXd(m.unique_covariance.col(0).asDiagonal());
    } else if (j.contains("unique_variances")) {
      Eigen::VectorXd v = vec_from_json(j["unique_variances"], "unique_variances");
      m.unique_covariance = Eigen::MatrixXd(v.asDiagonal());
    } else {
      throw ParseError("missing field: unique_covariance (or unique_variances)");
    }
    m.latent = latent_from_json(j.value("latent", json::object()),
                                static_cast<int>(m.loadings.cols()));
    return m;
  }

  if (type == "2pl") {
    TwoPLModel m;
    m.intercepts = vec_from_json(require(j, "intercepts"), "intercepts");
    m.slopes = mat_from_json(require(j, "slopes"), "slopes");
    m.latent = latent_from_json(j.value("latent", json::object()),
                                static_cast<int>(m.slopes.cols()));
    return m;
  }

  if (type == "graded") {
    GradedResponseModel m;
    const auto& latent_field = j.value("latent", json::object());
    int d = latent_field.contains("dimension") ? latent_field["dimension"].get<int>() : 1;
    for (const auto& item : require(j, "items"))
      m.items.push_back(graded_item_from_json(item, d));
    m.latent = latent_from_json(latent_field, d);
    return m;
  }

  if (type == "hurdle_graded") {
    HurdleGradedModel m;
    for (const auto& pj : require(j, "item_pairs")) {
      HurdleItemPair pair;
      const auto& pres = require(pj, "presence");
      const auto& freq = require(pj, "frequency");
      pair.presence.slopes = Eigen::Vector2d(require(pres, "slope").get<double>(), 0.0);
      pair.presence.thresholds = {require(pres, "threshold").get<double>()};
      pair.frequency.slopes = Eigen::Vector2d(0.0, require(freq, "slope").get<double>());
      for (const auto& c : require(freq, "thresholds"))
        pair.frequency.thresholds.push_back(c.get<double>());
      m.pairs.push_back(std::move(pair));
    }
    m.latent = latent_from_json(j.value("latent", json::object()), 2);
    return m;
  }

  throw ParseError("unknown model_type: " + type);
}

ModelSpec load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  ModelSpec spec = model_from_json(j);
  validate_model(spec);
  return spec;
}

std::string model_to_config_string(const ModelSpec& spec) {
  return model_to_json(spec).dump(2) + "\n";
}

}  // namespace precis
