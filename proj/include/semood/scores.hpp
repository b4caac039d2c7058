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

#ifndef SEMOOD_SCORES_HPP
#define SEMOOD_SCORES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semood/density.hpp"
#include "semood/micronet.hpp"
#include "semood/tensor.hpp"

// Every score in this header follows one orientation: higher means more
// in-distribution.

namespace semood {

/// [μ_1..μ_C, σ_1..σ_C]: per-channel spatial mean and population standard
/// deviation of a C×H×W map.
struct FeatureStats {
  std::vector<double> values;
  std::size_t channels() const noexcept { return values.size() / 2; }
};

template <class Real>
FeatureStats feature_stats(const BasicTensor<Real>& maps);

/// Chain rule through feature_stats: maps d(loss)/d(stats) to d(loss)/d(maps).
/// Channels with σ = 0 contribute nothing through their σ entry.
template <class Real>
std::vector<Real> feature_stats_backward(const BasicTensor<Real>& maps, const FeatureStats& stats,
                                         std::span<const double> d_stats);

struct SemMetadata {
  std::uint64_t net_version = 0;
  std::size_t top_components = 0;
  std::size_t low_components = 0;
  std::uint64_t seed = 0;
  ProjectionKind projection = ProjectionKind::kWithinClass;
  bool operator==(const SemMetadata&) const = default;
};

/// Density of the top-layer features, p(x), and of the first-layer feature
/// statistics, p(x_n), fitted on the same source snapshot.
struct SemModel {
  DensityPipeline top;
  DensityPipeline low;
  SemMetadata meta;
  bool operator==(const SemModel&) const = default;
};

struct SemOptions {
  std::size_t low_components = 3;
  std::size_t top_components = 0;  // 0: number of distinct labels
  std::size_t max_dim = 50;        // reduce a pipeline's input only above this
  ProjectionKind projection = ProjectionKind::kWithinClass;
  GmmOptions gmm;
  std::uint64_t net_version = 0;
};

SemModel fit_sem(const Matrix& top_features, const Matrix& low_stats,
                 std::span<const int> labels, const SemOptions& options = {});

/// log p(x) through the top pipeline, rounded to float precision. Rounding both
/// log densities to float makes the ratio below exact in double, so
/// sem_score + low_only_score == top_log_density bit for bit.
double top_log_density(const SemModel& m, std::span<const double> top);

/// log p(x_n) through the low pipeline, rounded to float precision.
double low_only_score(const SemModel& m, std::span<const double> low_stats);

/// log p(x) − log p(x_n).
double sem_score(const SemModel& m, std::span<const double> top,
                 std::span<const double> low_stats);

/// Maximum softmax probability.
double msp_score(std::span<const float> logits);

/// T·logsumexp(logits / T) (negative energy).
double ebo_score(std::span<const float> logits, double temperature = 1.0);

/// Temperature-scaled max softmax after an input step of size eps against the
/// gradient of the cross-entropy towards the predicted class.
double odin_score(const NetParams& net, std::span<const float> image, double temperature,
                  double epsilon);

struct OdinSettings {
  double temperature = 1000.0;
  double epsilon = 0.0;
  std::vector<double> grid{0.0, 0.0004, 0.0014, 0.0024};
  bool operator==(const OdinSettings&) const = default;
};

/// Picks the grid epsilon with the highest AUROC of ID validation images
/// against OOD validation images (ties: smallest epsilon).
double tune_odin_epsilon(const NetParams& net, const Tensor& id_images,
                         const Tensor& ood_images, double temperature,
                         std::span<const double> grid);

/// Class means and shared covariance of penultimate features.
struct MdsModel {
  std::vector<int> classes;
  Matrix class_means;  // K × d
  Matrix covariance;   // d × d, ridge included
  Matrix precision;    // inverse of covariance
  bool operator==(const MdsModel&) const = default;
};

MdsModel fit_mds(const Matrix& features, std::span<const int> labels, double ridge = 1e-6);

/// −min_k (x − μ_k)ᵀ Σ⁻¹ (x − μ_k).
double mds_score(const MdsModel& m, std::span<const double> feature);

enum class ScoreKind { kSem, kMsp, kOdin, kEbo, kMds, kLowOnly };

std::string_view to_string(ScoreKind kind);
std::optional<ScoreKind> parse_score_kind(std::string_view name);
inline constexpr ScoreKind kAllScoreKinds[] = {ScoreKind::kSem, ScoreKind::kMsp,
                                               ScoreKind::kOdin, ScoreKind::kEbo,
                                               ScoreKind::kMds, ScoreKind::kLowOnly};

/// The three per-sample feature views the scores consume.
struct Features {
  Matrix logits;     // N × classes
  Matrix penult;     // N × penult dim
  Matrix low_stats;  // N × 2·C1
};

Features extract_features(const NetParams& net, const Tensor& images);

}  // namespace semood

#endif  // SEMOOD_SCORES_HPP
