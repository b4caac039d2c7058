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

#ifndef SEMOOD_PIPELINE_HPP
#define SEMOOD_PIPELINE_HPP

#include <optional>
#include <span>
#include <vector>

#include "semood/micronet.hpp"
#include "semood/scores.hpp"

namespace semood {

/// Everything needed to score images with any ScoreKind.
struct ScoringBundle {
  std::optional<NetParams> net;
  std::optional<SemModel> sem;
  std::optional<MdsModel> mds;
  OdinSettings odin;
  double ebo_temperature = 1.0;
};

/// Scores precomputed features. ODIN needs images and is rejected here.
std::vector<double> score_features(const ScoringBundle& bundle, ScoreKind kind,
                                   const Features& features);

/// Scores images; the net is required.
std::vector<double> score_images(const ScoringBundle& bundle, ScoreKind kind,
                                 const Tensor& images);

/// Fits SEM and MDS on the source set with `net` and tunes the ODIN epsilon on
/// the given validation images.
ScoringBundle fit_bundle(const NetParams& net, const LabeledImages& source,
                         const SemOptions& sem_options, const Tensor* odin_id_val,
                         const Tensor* odin_ood_val, OdinSettings odin = {});

/// Fits SEM and MDS from precomputed source features (no network).
ScoringBundle fit_bundle_features(const Features& source, std::span<const int> labels,
                                  const SemOptions& sem_options);

/// Fraction of argmax predictions equal to the labels.
double accuracy(const NetParams& net, const LabeledImages& data);

}  // namespace semood

#endif  // SEMOOD_PIPELINE_HPP
