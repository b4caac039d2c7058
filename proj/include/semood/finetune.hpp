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

#ifndef SEMOOD_FINETUNE_HPP
#define SEMOOD_FINETUNE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semood/density.hpp"
#include "semood/micronet.hpp"
#include "semood/rng.hpp"
#include "semood/scores.hpp"

namespace semood {

// Source-awareness fine-tuning: the classifier is trained on
//   L = L_cls + w·L_src,   L_src = mean log p(x_n') − mean log p(x_n)
// where x_n are first-layer statistics of source images, x_n' those of
// mixup negatives, and p is a low-level mixture refitted at every epoch start
// and held constant during the epoch.

enum class SourceLossForm {
  kLogDensity,  // mean log p(neg) − mean log p(id)
  kRawDensity,  // mean p(neg) − mean p(id), densities divided by the batch max
};

struct FinetuneConfig {
  std::size_t epochs = 10;
  double lr = 0.005;
  double src_weight = 1.0;
  double mixup_alpha = 1.0;
  SourceLossForm form = SourceLossForm::kLogDensity;
  std::uint64_t seed = 0;
  std::size_t batch_size = 128;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  LrSchedule schedule = LrSchedule::kCosine;
  std::size_t low_components = 3;
  GmmOptions gmm;
  std::optional<double> forced_lambda;  // fixes the mixup coefficient
  // Caps the per-batch L2 norm of w·∇L_src with respect to the statistics
  // (0 disables). Dimensions at the variance floor otherwise dominate.
  double src_grad_clip = 0.0;
};

struct FinetuneEpoch {
  double cls_loss = 0.0;
  double src_loss = 0.0;
  double id_log_density = 0.0;   // mean log p(x_n) over the epoch's source batches
  double neg_log_density = 0.0;  // mean log p(x_n') over the epoch's negatives
};

struct FinetuneReport {
  std::vector<FinetuneEpoch> epochs;
};

struct FinetuneResult {
  NetParams params;
  FinetuneReport report;
};

/// Pairs every sample with a random distinct partner and mixes the two with
/// λ ~ Beta(α, α) drawn per pair.
Tensor make_negatives(const Tensor& batch, Rng& rng, double alpha,
                      std::optional<double> forced_lambda = std::nullopt);

struct SourceLoss {
  double loss = 0.0;
  std::vector<std::vector<double>> id_grads;   // d loss / d id stats
  std::vector<std::vector<double>> neg_grads;  // d loss / d negative stats
  double mean_id_log_density = 0.0;
  double mean_neg_log_density = 0.0;
};

SourceLoss source_loss(const DensityPipeline& low, std::span<const FeatureStats> id_stats,
                       std::span<const FeatureStats> neg_stats, SourceLossForm form);

SourceLoss source_loss(const GmmModel& low_gmm, std::span<const FeatureStats> id_stats,
                       std::span<const FeatureStats> neg_stats, SourceLossForm form);

/// Stream ids under the fine-tuning seed (the shuffle stream is shared with
/// plain training so that w = 0 reproduces it exactly).
inline constexpr std::uint64_t kNegativeStream = 2;
inline constexpr std::uint64_t kLowGmmStream = 3;

FinetuneResult finetune(const NetParams& params, const LabeledImages& source,
                        const FinetuneConfig& config);

/// Extracts features of the unaugmented source set with `params` and fits a
/// fresh SEM model stamped with the net version.
SemModel refit_after_finetune(const NetParams& params, const LabeledImages& source,
                              const SemOptions& options = {});

/// Mean log p(x_n) of source images and of their mixup negatives, under a
/// low-level mixture fitted on the same source images.
struct SourceGap {
  double id_mean = 0.0;
  double neg_mean = 0.0;
  double gap() const noexcept { return id_mean - neg_mean; }
};

SourceGap measure_source_gap(const NetParams& params, const LabeledImages& source,
                             std::uint64_t seed, double mixup_alpha = 1.0,
                             std::size_t low_components = 3);

}  // namespace semood

#endif  // SEMOOD_FINETUNE_HPP
