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

#ifndef SEMOOD_EVAL_HPP
#define SEMOOD_EVAL_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semood {

// In-distribution samples are the positive class for every metric, and a
// sample is predicted positive iff its score >= threshold.

/// False positive rate at the largest threshold whose true positive rate is
/// at least `level`.
double fpr_at_tpr(std::span<const double> id_scores, std::span<const double> ood_scores,
                  double level = 0.95);

/// Mann-Whitney form: mean over (id, ood) pairs of 1 if id > ood, ½ if tied.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Step-wise area under precision-recall: Σ_t (R_t − R_{t−1})·P_t over the
/// distinct scores t in descending order.
double aupr(std::span<const double> id_scores, std::span<const double> ood_scores);

enum class Role { kTrainId, kCsid, kNearOod, kFarOod };
std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

enum class IdPolicy {
  kFullSpectrum,  // positives = train_id ∪ every csid set
  kClassic,       // positives = train_id only
};
std::string_view to_string(IdPolicy policy);
std::optional<IdPolicy> parse_id_policy(std::string_view name);

struct ScoreSet {
  std::string dataset;
  Role role = Role::kTrainId;
  std::string kind;
  std::vector<double> scores;
};

enum class RowType {
  kDataset,    // one OOD set against the positives
  kGroupMean,  // arithmetic mean of the near-OOD or far-OOD rows
  kCsid,       // informational: train_id (positive) against one csid set
};

struct MetricRow {
  std::string dataset;
  Role role = Role::kNearOod;
  std::string kind;
  RowType type = RowType::kDataset;
  double fpr95 = 0.0;
  double auroc = 0.0;
  double aupr = 0.0;
};

struct EvalReport {
  IdPolicy policy = IdPolicy::kFullSpectrum;
  std::vector<MetricRow> rows;

  /// Row lookup by dataset name (group means use "mean_near_ood" /
  /// "mean_far_ood") and kind.
  const MetricRow* find(std::string_view dataset, std::string_view kind) const;
};

inline constexpr std::string_view kNearMeanName = "mean_near_ood";
inline constexpr std::string_view kFarMeanName = "mean_far_ood";

/// Score sets are grouped by kind; every kind needs exactly one train_id set.
/// Rows come out per kind in first-appearance order: dataset rows, then group
/// means, then csid contrast rows.
EvalReport evaluate_benchmark(std::span<const ScoreSet> sets,
                              IdPolicy policy = IdPolicy::kFullSpectrum);

}  // namespace semood

#endif  // SEMOOD_EVAL_HPP
