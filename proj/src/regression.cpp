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

#include "precis/regression.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "detail/threading.hpp"

namespace precis {

void OnlineMoments::merge(const OnlineMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  double total = static_cast<double>(n_ + o.n_);
  double delta = o.mean_ - mean_;
  m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / total;
  mean_ += delta * static_cast<double>(o.n_) / total;
  n_ += o.n_;
}

void OnlineComoments::add(double x, double y) {
  ++n_;
  double inv = 1.0 / static_cast<double>(n_);
  double dx = x - mean_x_;
  double dy = y - mean_y_;
  mean_x_ += dx * inv;
  mean_y_ += dy * inv;
  m2x_ += dx * (x - mean_x_);
  m2y_ += dy * (y - mean_y_);
  cxy_ += dx * (y - mean_y_);
}

void OnlineComoments::merge(const OnlineComoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  double total = na + nb;
  double dx = o.mean_x_ - mean_x_;
  double dy = o.mean_y_ - mean_y_;
  m2x_ += o.m2x_ + dx * dx * na * nb / total;
  m2y_ += o.m2y_ + dy * dy * na * nb / total;
  cxy_ += o.cxy_ + dx * dy * na * nb / total;
  mean_x_ += dx * nb / total;
  mean_y_ += dy * nb / total;
  n_ += o.n_;
}

RegressionFit fit_simple_linear(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const Eigen::Ref<const Eigen::VectorXd>& regressor) {
  const auto n = outcome.size();
  if (regressor.size() != n) throw ShapeMismatch("outcome and regressor lengths differ");
  if (n < 3) throw ValidationError("simple linear regression needs n >= 3");

  OnlineComoments mom;
  for (Eigen::Index i = 0; i < n; ++i) mom.add(regressor(i), outcome(i));
  if (mom.sxx() <= 0.0) throw DegenerateRegressor("regressor has zero variance");
  if (mom.syy() <= 0.0) throw DegenerateOutcome("outcome has zero variance");

  RegressionFit fit;
  fit.n = static_cast<std::size_t>(n);
  fit.slope = mom.sxy() / mom.sxx();
  fit.intercept = mom.mean_y() - fit.slope * mom.mean_x();
  double r2 = mom.sxy() * mom.sxy() / (mom.sxx() * mom.syy());
  fit.r_squared = std::clamp(r2, 0.0, 1.0);
  fit.fitted_variance = fit.slope * fit.slope * mom.sxx() / static_cast<double>(n);
  fit.residual_variance =
      std::max(0.0, mom.syy() - mom.sxy() * mom.sxy() / mom.sxx()) / static_cast<double>(n);
  fit.regressor = "simple_linear";
  return fit;
}

namespace {

std::string row_key(const Eigen::Ref<const Eigen::MatrixXd>& patterns, Eigen::Index row) {
  std::string key(static_cast<std::size_t>(patterns.cols()), '\0');
  for (Eigen::Index j = 0; j < patterns.cols(); ++j) {
    double v = patterns(row, j);
    key[static_cast<std::size_t>(j)] =
        std::isnan(v) ? static_cast<char>(0xFF) : static_cast<char>(static_cast<int>(v));
  }
  return key;
}

struct GroupStat {
  std::size_t n = 0;
  double sum = 0.0;
};

RegressionFit pattern_means_from_keys(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                      const std::vector<std::string>& keys) {
  const auto n = outcome.size();
  if (n < 2) throw ValidationError("pattern-mean regression needs n >= 2");

  std::unordered_map<std::string, GroupStat> groups;
  groups.reserve(1024);
  OnlineMoments total;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& g = groups[keys[static_cast<std::size_t>(i)]];
    ++g.n;
    g.sum += outcome(i);
    total.add(outcome(i));
  }
  if (groups.size() < 2) throw ValidationError("need at least 2 distinct patterns");
  if (total.sum_sq_dev() <= 0.0) throw DegenerateOutcome("outcome has zero variance");

  double grand = total.mean();
  double ssb = 0.0;
  for (const auto& [key, g] : groups) {
    double mean = g.sum / static_cast<double>(g.n);
    ssb += static_cast<double>(g.n) * (mean - grand) * (mean - grand);
  }
  double sst = total.sum_sq_dev();

  RegressionFit fit;
  fit.n = static_cast<std::size_t>(n);
  fit.r_squared = std::clamp(ssb / sst, 0.0, 1.0);
  fit.fitted_variance = ssb / static_cast<double>(n);
  fit.residual_variance = std::max(0.0, sst - ssb) / static_cast<double>(n);
  fit.regressor = "pattern_means(" + std::to_string(groups.size()) + " groups)";
  return fit;
}

}  // namespace

RegressionFit fit_pattern_means(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const Eigen::Ref<const Eigen::MatrixXd>& patterns) {
  if (patterns.rows() != outcome.size())
    throw ShapeMismatch("outcome and pattern rows differ");
  std::vector<std::string> keys(static_cast<std::size_t>(outcome.size()));
  for (Eigen::Index i = 0; i < outcome.size(); ++i)
    keys[static_cast<std::size_t>(i)] = row_key(patterns, i);
  return pattern_means_from_keys(outcome, keys);
}

RegressionFit fit_pattern_means(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                                const std::vector<ResponsePattern>& patterns) {
  if (static_cast<Eigen::Index>(patterns.size()) != outcome.size())
    throw ShapeMismatch("outcome and pattern rows differ");
  std::vector<std::string> keys(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& p = patterns[i];
    std::string key(p.values.size(), '\0');
    for (std::size_t j = 0; j < p.values.size(); ++j)
      key[j] = p.missing[j] ? static_cast<char>(0xFF)
                            : static_cast<char>(static_cast<int>(p.values[j]));
    keys[i] = std::move(key);
  }
  return pattern_means_from_keys(outcome, keys);
}

BsplineBasis BsplineBasis::from_quantiles(const Eigen::Ref<const Eigen::VectorXd>& data,
                                          int df) {
  if (df < 4) throw ValidationError("cubic B-spline basis needs df >= 4");
  if (data.size() < 2) throw ValidationError("need at least two data points");
  std::vector<double> sorted(data.data(), data.data() + data.size());
  std::sort(sorted.begin(), sorted.end());
  double lo = sorted.front(), hi = sorted.back();
  if (!(lo < hi)) throw IllConditionedBasis("regressor has zero range");

  int interior = df - 4;
  std::vector<double> knots;
  for (int r = 0; r < 4; ++r) knots.push_back(lo);
  double prev = lo;
  for (int q = 1; q <= interior; ++q) {
    double frac = static_cast<double>(q) / static_cast<double>(interior + 1);
    double pos = frac * static_cast<double>(sorted.size() - 1);
    auto idx = static_cast<std::size_t>(pos);
    double w = pos - static_cast<double>(idx);
    double value = sorted[idx];
    if (idx + 1 < sorted.size()) value = (1.0 - w) * sorted[idx] + w * sorted[idx + 1];
    if (value > prev && value < hi) {  // drop duplicated quantiles
      knots.push_back(value);
      prev = value;
    }
  }
  for (int r = 0; r < 4; ++r) knots.push_back(hi);

  BsplineBasis basis;
  basis.knots = Eigen::Map<Eigen::VectorXd>(knots.data(), static_cast<Eigen::Index>(knots.size()));
  basis.n_basis = static_cast<int>(knots.size()) - 4;
  return basis;
}

void BsplineBasis::eval(double x, int& first, double out[4]) const {
  constexpr int order = 4;
  const int nk = static_cast<int>(knots.size());
  const int lo = order - 1;
  const int hi = nk - order;
  if (x <= knots(lo)) x = knots(lo);
  if (x >= knots(hi)) x = knots(hi);

  int span = lo;
  while (span < hi - 1 && x >= knots(span + 1)) ++span;

  double left[order], right[order];
  out[0] = 1.0;
  for (int j = 1; j < order; ++j) {
    left[j] = x - knots(span + 1 - j);
    right[j] = knots(span + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
  first = span - order + 1;
}

double SplineModel::operator()(double x) const {
  int first;
  double n[4];
  bases[0].eval(x, first, n);
  double v = 0.0;
  for (int r = 0; r < 4; ++r) v += coef(first + r) * n[r];
  return v;
}

double SplineModel::operator()(double x, double y) const {
  int f0, f1;
  double n0[4], n1[4];
  bases[0].eval(x, f0, n0);
  bases[1].eval(y, f1, n1);
  const int nb1 = bases[1].n_basis;
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += coef((f0 + a) * nb1 + f1 + b) * n0[a] * n1[b];
  return v;
}

SplineFit fit_spline_surface(const Eigen::Ref<const Eigen::VectorXd>& outcome,
                             const Eigen::Ref<const Eigen::MatrixXd>& regressors,
                             int df_per_dim) {
  const auto n = outcome.size();
  const int d = static_cast<int>(regressors.cols());
  if (regressors.rows() != n) throw ShapeMismatch("outcome and regressor rows differ");
  if (d < 1 || d > 2) throw ValidationError("spline fits support 1 or 2 regressors");
  if (n < 8 * df_per_dim) throw ValidationError("sample too small for the basis size");

  SplineModel model;
  model.bases.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    model.bases.push_back(BsplineBasis::from_quantiles(regressors.col(k), df_per_dim));
  const int nb0 = model.bases[0].n_basis;
  const int nb1 = d == 2 ? model.bases[1].n_basis : 1;
  const int p = nb0 * nb1;

  // streaming normal equations; per-block partials merged in block order
  const std::size_t rows = static_cast<std::size_t>(n);
  const std::size_t nblocks = (rows + detail::kRowBlock - 1) / detail::kRowBlock;
  std::vector<Eigen::MatrixXd> gram_part(nblocks);
  std::vector<Eigen::VectorXd> rhs_part(nblocks);

  detail::parallel_blocks(rows, [&](std::size_t blk, std::size_t b, std::size_t e) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
    int idx[16];
    double val[16];
    for (std::size_t i = b; i < e; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      int nnz = 0;
      if (d == 1) {
        int f0;
        double n0[4];
        model.bases[0].eval(regressors(row, 0), f0, n0);
        for (int a = 0; a < 4; ++a) {
          idx[nnz] = f0 + a;
          val[nnz++] = n0[a];
        }
      } else {
        int f0, f1;
        double n0[4], n1[4];
        model.bases[0].eval(regressors(row, 0), f0, n0);
        model.bases[1].eval(regressors(row, 1), f1, n1);
        for (int a = 0; a < 4; ++a)
          for (int bb = 0; bb < 4; ++bb) {
            idx[nnz] = (f0 + a) * nb1 + f1 + bb;
            val[nnz++] = n0[a] * n1[bb];
          }
      }
      double yv = outcome(row);
      for (int a = 0; a < nnz; ++a) {
        r(idx[a]) += val[a] * yv;
        for (int bb = 0; bb <= a; ++bb) G(idx[a], idx[bb]) += val[a] * val[bb];
      }
    }
    gram_part[blk] = std::move(G);
    rhs_part[blk] = std::move(r);
  });

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    gram += gram_part[blk];
    rhs += rhs_part[blk];
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  if (qr.rank() < p) throw IllConditionedBasis("collinear spline basis columns");
  {
    Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 0.0 || diag.maxCoeff() / diag.minCoeff() > 1e12)
      throw IllConditionedBasis("spline basis is numerically ill-conditioned");
  }
  model.coef = qr.solve(rhs);

  // second pass for stable SSE / SST / fitted variance
  std::vector<OnlineMoments> out_part(nblocks), fit_part(nblocks), res_part(nblocks);
  detail::parallel_blocks(rows, [&](std::size_t blk, std::size_t b, std::size_t e) {
    OnlineMoments om, fm, rm;
    for (std::size_t i = b; i < e; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      double f = d == 1 ? model(regressors(row, 0))
                        : model(regressors(row, 0), regressors(row, 1));
      om.add(outcome(row));
      fm.add(f);
      rm.add(outcome(row) - f);
    }
    out_part[blk] = om;
    fit_part[blk] = fm;
    res_part[blk] = rm;
  });
  OnlineMoments om, fm, rm;
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    om.merge(out_part[blk]);
    fm.merge(fit_part[blk]);
    rm.merge(res_part[blk]);
  }
  double sst = om.sum_sq_dev();
  if (sst <= 0.0) throw DegenerateOutcome("outcome has zero variance");
  double sse = rm.sum_sq_dev() +
               static_cast<double>(rm.count()) * rm.mean() * rm.mean();

  SplineFit out;
  out.fit.n = rows;
  out.fit.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  out.fit.fitted_variance = fm.variance();
  out.fit.residual_variance = sse / static_cast<double>(rows);
  out.fit.regressor = d == 1 ? "spline(df=" + std::to_string(nb0) + ")"
                             : "spline(df=" + std::to_string(nb0) + "x" + std::to_string(nb1) + ")";
  out.model = std::move(model);
  return out;
}

std::string to_string(CoefficientKind kind) {
  return kind == CoefficientKind::Reliability ? "reliability" : "prmse";
}

std::string to_string(EstimationMethod method) {
  switch (method) {
    case EstimationMethod::Analytic: return "analytic";
    case EstimationMethod::McNonparametric: return "mc-nonparametric";
    case EstimationMethod::McSimpleLinear: return "mc-simple-linear";
  }
  return "?";
}

PrecisionReport r_squared_report(const RegressionFit& fit, CoefficientKind kind,
                                 const ReportMeta& meta) {
  PrecisionReport rep;
  rep.value = fit.r_squared;
  rep.kind = kind;
  rep.method = meta.method;
  rep.n = meta.n ? meta.n : fit.n;
  rep.seed = meta.seed;
  rep.model_hash = meta.model_hash;
  rep.score = meta.score;
  rep.regressor = fit.regressor;
  double r2 = fit.r_squared;
  rep.half_width =
      rep.n ? 1.96 * 2.0 * std::sqrt(r2) * (1.0 - r2) / std::sqrt(static_cast<double>(rep.n))
            : 0.0;
  return rep;
}

}  // namespace precis
