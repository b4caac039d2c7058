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

#include "semood/finetune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semood {

Tensor make_negatives(const Tensor& batch, Rng& rng, double alpha,
                      std::optional<double> forced_lambda) {
  require(batch.rank() >= 1 && batch.dim(0) >= 2, ErrorCode::kInvalidArgument,
          "make_negatives: batch size must be at least 2");
  require(forced_lambda || alpha > 0.0, ErrorCode::kInvalidArgument,
          "make_negatives: mixup alpha must be positive");
  const std::size_t n = batch.dim(0);
  const std::size_t item = batch.item_size();
  Tensor out(batch.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t partner = (i + 1 + rng.below(n - 1)) % n;
    const double lambda = forced_lambda ? *forced_lambda : rng.beta(alpha, alpha);
    const float la = static_cast<float>(lambda);
    const float lb = static_cast<float>(1.0 - lambda);
    auto a = batch.item(i);
    auto b = batch.item(partner);
    auto o = out.item(i);
    for (std::size_t k = 0; k < item; ++k) o[k] = la * a[k] + lb * b[k];
  }
  return out;
}

SourceLoss source_loss(const DensityPipeline& low, std::span<const FeatureStats> id_stats,
                       std::span<const FeatureStats> neg_stats, SourceLossForm form) {
  require(!id_stats.empty() && !neg_stats.empty(), ErrorCode::kInvalidArgument,
          "source_loss: empty batch");
  const std::size_t dim = low.input_dim();
  auto log_densities = [&](std::span<const FeatureStats> batch) {
    std::vector<double> out;
    for (const FeatureStats& s : batch) {
      require(s.values.size() == dim, ErrorCode::kShapeMismatch,
              "source_loss: statistics have dimension " + std::to_string(s.values.size()) +
                  ", expected " + std::to_string(dim));
      const double v = pipeline_log_density(low, s.values);
      require(std::isfinite(v), ErrorCode::kNumeric, "source_loss: non-finite density");
      out.push_back(v);
    }
    return out;
  };
  const std::vector<double> lid = log_densities(id_stats);
  const std::vector<double> lneg = log_densities(neg_stats);
  const double inv_id = 1.0 / static_cast<double>(lid.size());
  const double inv_neg = 1.0 / static_cast<double>(lneg.size());

  SourceLoss out;
  for (double v : lid) out.mean_id_log_density += v * inv_id;
  for (double v : lneg) out.mean_neg_log_density += v * inv_neg;

  // Per-sample weight on ∇ log p: d loss / d log p_i.
  std::vector<double> w_id(lid.size()), w_neg(lneg.size());
  if (form == SourceLossForm::kLogDensity) {
    out.loss = out.mean_neg_log_density - out.mean_id_log_density;
    std::fill(w_id.begin(), w_id.end(), -inv_id);
    std::fill(w_neg.begin(), w_neg.end(), inv_neg);
  } else {
    double shift = -std::numeric_limits<double>::infinity();
    for (double v : lid) shift = std::max(shift, v);
    for (double v : lneg) shift = std::max(shift, v);
    double mean_id = 0.0, mean_neg = 0.0;
    for (std::size_t i = 0; i < lid.size(); ++i) {
      const double p = std::exp(lid[i] - shift);
      mean_id += p * inv_id;
      w_id[i] = -p * inv_id;
    }
    for (std::size_t i = 0; i < lneg.size(); ++i) {
      const double p = std::exp(lneg[i] - shift);
      mean_neg += p * inv_neg;
      w_neg[i] = p * inv_neg;
    }
    out.loss = mean_neg - mean_id;
  }

  auto grads = [&](std::span<const FeatureStats> batch, const std::vector<double>& w) {
    std::vector<std::vector<double>> g;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::vector<double> gi = pipeline_log_density_grad(low, batch[i].values);
      for (double& x : gi) x *= w[i];
      g.push_back(std::move(gi));
    }
    return g;
  };
  out.id_grads = grads(id_stats, w_id);
  out.neg_grads = grads(neg_stats, w_neg);
  return out;
}

SourceLoss source_loss(const GmmModel& low_gmm, std::span<const FeatureStats> id_stats,
                       std::span<const FeatureStats> neg_stats, SourceLossForm form) {
  DensityPipeline p;
  p.gmm = low_gmm;
  return source_loss(p, id_stats, neg_stats, form);
}

namespace {

Matrix low_stats_of(const NetParams& params, const Tensor& images) {
  return extract_features(params, images).low_stats;
}

}  // namespace

FinetuneResult finetune(const NetParams& params, const LabeledImages& source,
                        const FinetuneConfig& config) {
  require(config.epochs >= 1, ErrorCode::kInvalidArgument, "finetune: epochs must be >= 1");
  require(config.src_weight >= 0.0, ErrorCode::kInvalidArgument,
          "finetune: source weight must be >= 0");

  TrainConfig train;
  train.epochs = config.epochs;
  train.batch_size = config.batch_size;
  train.lr0 = config.lr;
  train.momentum = config.momentum;
  train.weight_decay = config.weight_decay;
  train.seed = config.seed;
  train.schedule = config.schedule;
  train.classes = params.config.classes;

  FinetuneResult result;
  if (config.src_weight == 0.0) {
    TrainResult r = run_sgd(source, train, params, nullptr);
    for (double loss : r.epoch_loss) result.report.epochs.push_back({loss, 0.0, 0.0, 0.0});
    result.params = std::move(r.params);
    return result;
  }

  const Rng root(config.seed);
  Rng neg_rng = root.derive(kNegativeStream);
  const Rng gmm_root = root.derive(kLowGmmStream);
  DensityPipeline low;
  FinetuneEpoch acc;
  std::size_t batches = 0;

  BatchObjective objective;
  objective.epoch_begin = [&](std::size_t epoch, const NetParams& current) {
    GmmOptions gmm = config.gmm;
    gmm.seed = gmm_root.derive(epoch).next_u64();
    const Matrix stats = low_stats_of(current, source.images);
    low = fit_pipeline(stats, source.labels, config.low_components, 50,
                       ProjectionKind::kWithinClass, gmm);
    acc = {};
    batches = 0;
  };
  objective.batch_term = [&](const NetParams& current, std::span<const std::size_t> batch,
                             const std::vector<ForwardTrace>& traces,
                             std::vector<std::vector<float>>& d_first_maps,
                             Gradients& grads) -> double {
    if (batch.size() < 2) return 0.0;
    const Tensor images = gather_images(source.images, batch);
    const Tensor negatives = make_negatives(images, neg_rng, config.mixup_alpha,
                                            config.forced_lambda);
    std::vector<ForwardTrace> neg_traces;
    std::vector<FeatureStats> id_stats, neg_stats;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      id_stats.push_back(feature_stats(traces[i].first_maps));
      neg_traces.push_back(forward_one(current, negatives.item(i), true));
      neg_stats.push_back(feature_stats(neg_traces.back().first_maps));
    }
    const SourceLoss src = source_loss(low, id_stats, neg_stats, config.form);

    double w = config.src_weight;
    if (config.src_grad_clip > 0.0) {
      double sq = 0.0;
      for (const auto& g : src.id_grads) for (double x : g) sq += x * x;
      for (const auto& g : src.neg_grads) for (double x : g) sq += x * x;
      const double norm = w * std::sqrt(sq);
      if (norm > config.src_grad_clip) w *= config.src_grad_clip / norm;
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::vector<double> g = src.id_grads[i];
      for (double& x : g) x *= w;
      d_first_maps[i] = feature_stats_backward(traces[i].first_maps, id_stats[i], g);

      std::vector<double> gn = src.neg_grads[i];
      for (double& x : gn) x *= w;
      const std::vector<float> d_neg =
          feature_stats_backward(neg_traces[i].first_maps, neg_stats[i], gn);
      backward(current, neg_traces[i], std::span<const float>(),
               std::span<const float>(d_neg), grads);
    }
    acc.src_loss += src.loss;
    acc.id_log_density += src.mean_id_log_density;
    acc.neg_log_density += src.mean_neg_log_density;
    ++batches;
    return config.src_weight * src.loss;
  };
  objective.epoch_end = [&](std::size_t) {
    const double inv = batches ? 1.0 / static_cast<double>(batches) : 0.0;
    result.report.epochs.push_back(
        {0.0, acc.src_loss * inv, acc.id_log_density * inv, acc.neg_log_density * inv});
  };

  TrainResult r = run_sgd(source, train, params, &objective);
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    result.report.epochs[e].cls_loss = r.epoch_loss[e];
  }
  result.params = std::move(r.params);
  return result;
}

SemModel refit_after_finetune(const NetParams& params, const LabeledImages& source,
                              const SemOptions& options) {
  const Features f = extract_features(params, source.images);
  SemOptions opt = options;
  opt.net_version = params.version;
  return fit_sem(f.penult, f.low_stats, source.labels, opt);
}

SourceGap measure_source_gap(const NetParams& params, const LabeledImages& source,
                             std::uint64_t seed, double mixup_alpha,
                             std::size_t low_components) {
  const Matrix stats = low_stats_of(params, source.images);
  GmmOptions gmm;
  gmm.seed = Rng(seed).derive(kLowGmmStream).next_u64();
  const DensityPipeline low = fit_pipeline(stats, source.labels, low_components, 50,
                                           ProjectionKind::kWithinClass, gmm);
  Rng rng = Rng(seed).derive(kNegativeStream);
  const Tensor negatives = make_negatives(source.images, rng, mixup_alpha);
  const Matrix neg_stats = low_stats_of(params, negatives);
  SourceGap gap;
  for (std::size_t i = 0; i < stats.rows; ++i) {
    gap.id_mean += pipeline_log_density(low, stats.row(i));
    gap.neg_mean += pipeline_log_density(low, neg_stats.row(i));
  }
  gap.id_mean /= static_cast<double>(stats.rows);
  gap.neg_mean /= static_cast<double>(stats.rows);
  return gap;
}

}  // namespace semood
