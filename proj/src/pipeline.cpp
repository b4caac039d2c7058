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

#include "semood/pipeline.hpp"

#include <string>

namespace semood {

namespace {

template <class T>
const T& need(const std::optional<T>& v, ScoreKind kind, const char* what) {
  require(v.has_value(), ErrorCode::kMissingComponent,
          std::string("score '") + std::string(to_string(kind)) + "' needs a " + what);
  return *v;
}

void need_view(const Matrix& m, std::size_t n, ScoreKind kind, const char* what) {
  require(m.rows == n && m.cols > 0, ErrorCode::kState,
          std::string("score '") + std::string(to_string(kind)) + "' needs " + what +
              " for all " + std::to_string(n) + " samples");
}

std::vector<float> row_as_float(const Matrix& m, std::size_t r) {
  auto row = m.row(r);
  return std::vector<float>(row.begin(), row.end());
}

}  // namespace

std::vector<double> score_features(const ScoringBundle& bundle, ScoreKind kind,
                                   const Features& f) {
  const std::size_t n = f.logits.rows ? f.logits.rows : std::max(f.penult.rows, f.low_stats.rows);
  std::vector<double> out(n);
  switch (kind) {
    case ScoreKind::kSem: {
      const SemModel& m = need(bundle.sem, kind, "SEM model");
      need_view(f.penult, n, kind, "penultimate features");
      need_view(f.low_stats, n, kind, "first-layer statistics");
      for (std::size_t i = 0; i < n; ++i) out[i] = sem_score(m, f.penult.row(i), f.low_stats.row(i));
      break;
    }
    case ScoreKind::kLowOnly: {
      const SemModel& m = need(bundle.sem, kind, "SEM model");
      need_view(f.low_stats, n, kind, "first-layer statistics");
      for (std::size_t i = 0; i < n; ++i) out[i] = low_only_score(m, f.low_stats.row(i));
      break;
    }
    case ScoreKind::kMds: {
      const MdsModel& m = need(bundle.mds, kind, "MDS model");
      need_view(f.penult, n, kind, "penultimate features");
      for (std::size_t i = 0; i < n; ++i) out[i] = mds_score(m, f.penult.row(i));
      break;
    }
    case ScoreKind::kMsp:
      need_view(f.logits, n, kind, "logits");
      for (std::size_t i = 0; i < n; ++i) out[i] = msp_score(row_as_float(f.logits, i));
      break;
    case ScoreKind::kEbo:
      need_view(f.logits, n, kind, "logits");
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = ebo_score(row_as_float(f.logits, i), bundle.ebo_temperature);
      }
      break;
    case ScoreKind::kOdin:
      fail(ErrorCode::kInvalidArgument, "odin needs images, not precomputed features");
  }
  return out;
}

std::vector<double> score_images(const ScoringBundle& bundle, ScoreKind kind,
                                 const Tensor& images) {
  const NetParams& net = need(bundle.net, kind, "network");
  if (kind == ScoreKind::kOdin) {
    require(images.rank() == 4, ErrorCode::kShapeMismatch, "odin: images must be N×C×H×W");
    std::vector<double> out(images.dim(0));
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = odin_score(net, images.item(i), bundle.odin.temperature, bundle.odin.epsilon);
    }
    return out;
  }
  return score_features(bundle, kind, extract_features(net, images));
}

ScoringBundle fit_bundle(const NetParams& net, const LabeledImages& source,
                         const SemOptions& sem_options, const Tensor* odin_id_val,
                         const Tensor* odin_ood_val, OdinSettings odin) {
  ScoringBundle b;
  b.net = net;
  const Features f = extract_features(net, source.images);
  SemOptions opt = sem_options;
  opt.net_version = net.version;
  b.sem = fit_sem(f.penult, f.low_stats, source.labels, opt);
  b.mds = fit_mds(f.penult, source.labels);
  if (odin_id_val && odin_ood_val) {
    odin.epsilon = tune_odin_epsilon(net, *odin_id_val, *odin_ood_val, odin.temperature, odin.grid);
  }
  b.odin = odin;
  return b;
}

ScoringBundle fit_bundle_features(const Features& source, std::span<const int> labels,
                                  const SemOptions& sem_options) {
  require(source.penult.rows == labels.size() && source.low_stats.rows == labels.size(),
          ErrorCode::kShapeMismatch, "fit: feature rows do not match the labels");
  ScoringBundle b;
  b.sem = fit_sem(source.penult, source.low_stats, labels, sem_options);
  b.mds = fit_mds(source.penult, labels);
  return b;
}

double accuracy(const NetParams& net, const LabeledImages& data) {
  require(data.size() > 0, ErrorCode::kInvalidArgument, "accuracy: empty dataset");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto t = forward_one(net, data.images.item(i), false);
    std::size_t best = 0;
    for (std::size_t k = 1; k < t.logits.size(); ++k) {
      if (t.logits[k] > t.logits[best]) best = k;
    }
    hit += static_cast<int>(best) == data.labels[i];
  }
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

}  // namespace semood
