// Copyright 2026 The semood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semood/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "semood/eval.hpp"
#include "semood/numerics.hpp"
#include "semood/rng.hpp"

namespace semood {

// ---------------------------------------------------------------------------
// Feature statistics

template <class Real>
FeatureStats feature_stats(const BasicTensor<Real>& maps) {
  require(maps.rank() == 3, ErrorCode::kShapeMismatch,
          "feature_stats: expected C×H×W maps, got " + shape_to_string(maps.shape()));
  const std::size_t c = maps.dim(0);
  const std::size_t hw = maps.dim(1) * maps.dim(2);
  require(hw >= 1, ErrorCode::kInvalidArgument, "feature_stats: empty spatial extent");
  FeatureStats s;
  s.values.assign(2 * c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const Real* z = maps.data().data() + ch * hw;
    double mean = 0.0;
    for (std::size_t i = 0; i < hw; ++i) mean += z[i];
    mean /= static_cast<double>(hw);
    double var = 0.0;
    for (std::size_t i = 0; i < hw; ++i) {
      const double d = z[i] - mean;
      var += d * d;
    }
    s.values[ch] = mean;
    s.values[c + ch] = std::sqrt(var / static_cast<double>(hw));
  }
  return s;
}

template <class Real>
std::vector<Real> feature_stats_backward(const BasicTensor<Real>& maps, const FeatureStats& stats,
                                         std::span<const double> d_stats) {
  const std::size_t c = maps.dim(0);
  const std::size_t hw = maps.dim(1) * maps.dim(2);
  require(stats.values.size() == 2 * c && d_stats.size() == 2 * c, ErrorCode::kShapeMismatch,
          "feature_stats_backward: statistics do not match maps");
  std::vector<Real> out(maps.size());
  const double inv = 1.0 / static_cast<double>(hw);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double mean = stats.values[ch];
    const double sigma = stats.values[c + ch];
    const double g_mean = d_stats[ch] * inv;
    const double g_sigma = sigma > 0.0 ? d_stats[c + ch] * inv / sigma : 0.0;
    const Real* z = maps.data().data() + ch * hw;
    Real* o = out.data() + ch * hw;
    for (std::size_t i = 0; i < hw; ++i) {
      o[i] = static_cast<Real>(g_mean + g_sigma * (z[i] - mean));
    }
  }
  return out;
}

template FeatureStats feature_stats(const BasicTensor<float>&);
template FeatureStats feature_stats(const BasicTensor<double>&);
template std::vector<float> feature_stats_backward(const BasicTensor<float>&, const FeatureStats&,
                                                   std::span<const double>);
template std::vector<double> feature_stats_backward(const BasicTensor<double>&,
                                                    const FeatureStats&, std::span<const double>);

// ---------------------------------------------------------------------------
// SEM

namespace {

double round_to_float(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

SemModel fit_sem(const Matrix& top_features, const Matrix& low_stats,
                 std::span<const int> labels, const SemOptions& options) {
  require(top_features.rows == low_stats.rows && labels.size() == top_features.rows,
          ErrorCode::kShapeMismatch, "fit_sem: feature tables and labels disagree in length");
  const std::size_t classes = std::set<int>(labels.begin(), labels.end()).size();
  SemModel m;
  m.meta.top_components = options.top_components ? options.top_components : classes;
  m.meta.low_components = options.low_components;
  m.meta.seed = options.gmm.seed;
  m.meta.net_version = options.net_version;
  m.meta.projection = options.projection;
  const std::size_t need = std::max(m.meta.top_components, m.meta.low_components);
  require(top_features.rows >= need, ErrorCode::kInvalidArgument,
          "fit_sem: " + std::to_string(top_features.rows) + " samples, need at least " +
              std::to_string(need));
  const Rng root(options.gmm.seed);
  GmmOptions gmm = options.gmm;
  gmm.seed = root.derive(1).next_u64();
  m.top = fit_pipeline(top_features, labels, m.meta.top_components, options.max_dim,
                       options.projection, gmm);
  gmm.seed = root.derive(2).next_u64();
  m.low = fit_pipeline(low_stats, labels, m.meta.low_components, options.max_dim,
                       options.projection, gmm);
  return m;
}

double top_log_density(const SemModel& m, std::span<const double> top) {
  return round_to_float(pipeline_log_density(m.top, top));
}

double low_only_score(const SemModel& m, std::span<const double> low_stats) {
  return round_to_float(pipeline_log_density(m.low, low_stats));
}

double sem_score(const SemModel& m, std::span<const double> top,
                 std::span<const double> low_stats) {
  return top_log_density(m, top) - low_only_score(m, low_stats);
}

// ---------------------------------------------------------------------------
// Logit baselines

double msp_score(std::span<const float> logits) {
  require(logits.size() >= 2, ErrorCode::kShapeMismatch, "msp: need at least 2 classes");
  const auto p = softmax_temp(logits, 1.0);
  return *std::max_element(p.begin(), p.end());
}

double ebo_score(std::span<const float> logits, double temperature) {
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "ebo: nonpositive temperature");
  std::vector<double> scaled(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / temperature;
  return temperature * logsumexp(scaled);
}

double odin_score(const NetParams& net, std::span<const float> image, double temperature,
                  double epsilon) {
  require(epsilon >= 0.0, ErrorCode::kInvalidArgument, "odin: negative epsilon");
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "odin: nonpositive temperature");
  if (epsilon == 0.0) {
    const auto t = forward_one(net, image, false);
    const auto p = softmax_temp(std::span<const float>(t.logits), temperature);
    return *std::max_element(p.begin(), p.end());
  }
  const auto trace = forward_one(net, image, true);
  auto p = softmax_temp(std::span<const float>(trace.logits), temperature);
  const auto top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  std::vector<float> d_logits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    d_logits[i] = static_cast<float>((p[i] - (i == top ? 1.0 : 0.0)) / temperature);
  }
  Gradients scratch = Gradients::zeros_like(net.config);
  std::vector<float> d_input;
  backward(net, trace, std::span<const float>(d_logits), std::span<const float>(), scratch,
           &d_input);
  std::vector<float> perturbed(image.begin(), image.end());
  for (std::size_t i = 0; i < perturbed.size(); ++i) {
    const float g = d_input[i];
    const float sign = g > 0.0f ? 1.0f : (g < 0.0f ? -1.0f : 0.0f);
    perturbed[i] = static_cast<float>(perturbed[i] - epsilon * sign);
  }
  const auto t2 = forward_one(net, std::span<const float>(perturbed), false);
  p = softmax_temp(std::span<const float>(t2.logits), temperature);
  return *std::max_element(p.begin(), p.end());
}

double tune_odin_epsilon(const NetParams& net, const Tensor& id_images, const Tensor& ood_images,
                         double temperature, std::span<const double> grid) {
  require(!grid.empty(), ErrorCode::kInvalidArgument, "odin: empty epsilon grid");
  require(id_images.rank() == 4 && ood_images.rank() == 4 && id_images.dim(0) > 0 &&
              ood_images.dim(0) > 0,
          ErrorCode::kInvalidArgument, "odin: validation sets must be non-empty N×C×H×W");
  double best_eps = grid.front();
  double best_auc = -1.0;
  for (double eps : grid) {
    std::vector<double> id(id_images.dim(0)), ood(ood_images.dim(0));
    for (std::size_t i = 0; i < id.size(); ++i)
      id[i] = odin_score(net, id_images.item(i), temperature, eps);
    for (std::size_t i = 0; i < ood.size(); ++i)
      ood[i] = odin_score(net, ood_images.item(i), temperature, eps);
    const double auc = auroc(id, ood);
    if (auc > best_auc || (auc == best_auc && eps < best_eps)) {
      best_auc = auc;
      best_eps = eps;
    }
  }
  return best_eps;
}

// ---------------------------------------------------------------------------
// Mahalanobis

MdsModel fit_mds(const Matrix& features, std::span<const int> labels, double ridge) {
  require(labels.size() == features.rows, ErrorCode::kShapeMismatch,
          "fit_mds: labels and features disagree in length");
  const std::set<int> classes(labels.begin(), labels.end());
  require(!classes.empty(), ErrorCode::kInvalidArgument, "fit_mds: empty training set");
  MdsModel m;
  m.classes.assign(classes.begin(), classes.end());
  const std::size_t d = features.cols;
  const std::size_t k = m.classes.size();
  m.class_means = Matrix(k, d);
  std::vector<std::size_t> counts(k, 0);
  auto slot = [&](int y) {
    return static_cast<std::size_t>(std::lower_bound(m.classes.begin(), m.classes.end(), y) -
                                    m.classes.begin());
  };
  for (std::size_t i = 0; i < features.rows; ++i) {
    const std::size_t c = slot(labels[i]);
    ++counts[c];
    for (std::size_t j = 0; j < d; ++j) m.class_means(c, j) += features(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    require(counts[c] >= 2, ErrorCode::kInvalidArgument,
            "fit_mds: class " + std::to_string(m.classes[c]) + " has fewer than 2 samples");
    for (std::size_t j = 0; j < d; ++j) m.class_means(c, j) /= static_cast<double>(counts[c]);
  }
  SymMatrix cov = within_class_scatter(features, labels);
  for (std::size_t j = 0; j < d; ++j) cov.add(j, j, ridge);

  const EigenDecomposition eig = sym_eigen(cov);
  const double lo = eig.values.empty() ? 0.0 : eig.values.back();
  require(std::isfinite(lo) && lo >= 0.5 * ridge && lo > 0.0, ErrorCode::kNumeric,
          "fit_mds: singular covariance after regularization");
  m.covariance = Matrix(d, d);
  m.precision = Matrix(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      m.covariance(a, b) = cov(a, b);
      double s = 0.0;
      for (std::size_t e = 0; e < d; ++e) {
        s += eig.vectors(a, e) * eig.vectors(b, e) / eig.values[e];
      }
      m.precision(a, b) = s;
    }
  }
  // Exact symmetry for the quadratic form.
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      const double s = 0.5 * (m.precision(a, b) + m.precision(b, a));
      m.precision(a, b) = s;
      m.precision(b, a) = s;
    }
  return m;
}

double mds_score(const MdsModel& m, std::span<const double> feature) {
  const std::size_t d = m.class_means.cols;
  require(feature.size() == d, ErrorCode::kShapeMismatch,
          "mds_score: feature has dimension " + std::to_string(feature.size()) +
              ", expected " + std::to_string(d));
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> diff(d), tmp(d);
  for (std::size_t c = 0; c < m.class_means.rows; ++c) {
    for (std::size_t j = 0; j < d; ++j) diff[j] = feature[j] - m.class_means(c, j);
    double q = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      const double* row = m.precision.values.data() + a * d;
      for (std::size_t b = 0; b < d; ++b) s += row[b] * diff[b];
      q += diff[a] * s;
    }
    best = std::min(best, q);
  }
  return -best;
}

// ---------------------------------------------------------------------------
// Kinds and extraction

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kSem: return "sem";
    case ScoreKind::kMsp: return "msp";
    case ScoreKind::kOdin: return "odin";
    case ScoreKind::kEbo: return "ebo";
    case ScoreKind::kMds: return "mds";
    case ScoreKind::kLowOnly: return "low_only";
  }
  return "unknown";
}

std::optional<ScoreKind> parse_score_kind(std::string_view name) {
  for (ScoreKind k : kAllScoreKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Features extract_features(const NetParams& net, const Tensor& images) {
  require(images.rank() == 4, ErrorCode::kShapeMismatch,
          "extract_features: images must be N×C×H×W, got " + shape_to_string(images.shape()));
  const std::size_t n = images.dim(0);
  const NetConfig& cfg = net.config;
  Features f;
  f.logits = Matrix(n, cfg.classes);
  f.penult = Matrix(n, cfg.penult_dim());
  f.low_stats = Matrix(n, 2 * cfg.convs.front().out_channels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = forward_one(net, images.item(i), false);
    std::copy(t.logits.begin(), t.logits.end(), f.logits.row(i).begin());
    std::copy(t.penult.begin(), t.penult.end(), f.penult.row(i).begin());
    const FeatureStats s = feature_stats(t.first_maps);
    std::copy(s.values.begin(), s.values.end(), f.low_stats.row(i).begin());
  }
  return f;
}

}  // namespace semood
