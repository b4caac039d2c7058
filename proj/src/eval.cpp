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

#include "semood/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "semood/error.hpp"

namespace semood {

namespace {

void check_inputs(std::span<const double> id, std::span<const double> ood, const char* what) {
  require(!id.empty() && !ood.empty(), ErrorCode::kInvalidArgument,
          std::string(what) + ": empty input");
  for (double s : id) require(std::isfinite(s), ErrorCode::kNumeric, std::string(what) + ": non-finite score");
  for (double s : ood) require(std::isfinite(s), ErrorCode::kNumeric, std::string(what) + ": non-finite score");
}

}  // namespace

double fpr_at_tpr(std::span<const double> id_scores, std::span<const double> ood_scores,
                  double level) {
  check_inputs(id_scores, ood_scores, "fpr_at_tpr");
  require(level > 0.0 && level <= 1.0, ErrorCode::kInvalidArgument,
          "fpr_at_tpr: level must be in (0, 1]");
  std::vector<double> id(id_scores.begin(), id_scores.end());
  std::sort(id.begin(), id.end(), std::greater<>());
  const std::size_t n = id.size();
  const double dn = static_cast<double>(n);
  // Smallest count k whose TPR k/n reaches the level.
  std::size_t k = static_cast<std::size_t>(std::ceil(level * dn));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / dn >= level) --k;
  while (k < n && static_cast<double>(k) / dn < level) ++k;
  const double threshold = id[k - 1];
  const auto fp = std::count_if(ood_scores.begin(), ood_scores.end(),
                                [&](double s) { return s >= threshold; });
  return static_cast<double>(fp) / static_cast<double>(ood_scores.size());
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_inputs(id_scores, ood_scores, "auroc");
  std::vector<double> ood(ood_scores.begin(), ood_scores.end());
  std::sort(ood.begin(), ood.end());
  std::uint64_t twice_u = 0;
  for (double s : id_scores) {
    const auto lo = std::lower_bound(ood.begin(), ood.end(), s);
    const auto hi = std::upper_bound(lo, ood.end(), s);
    twice_u += 2 * static_cast<std::uint64_t>(lo - ood.begin()) +
               static_cast<std::uint64_t>(hi - lo);
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(id_scores.size()) * static_cast<double>(ood.size()));
}

double aupr(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_inputs(id_scores, ood_scores, "aupr");
  std::vector<std::pair<double, bool>> all;
  all.reserve(id_scores.size() + ood_scores.size());
  for (double s : id_scores) all.emplace_back(s, true);
  for (double s : ood_scores) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const double n_id = static_cast<double>(id_scores.size());
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    const double t = all[i].first;
    for (; i < all.size() && all[i].first == t; ++i) (all[i].second ? tp : fp) += 1;
    const double recall = static_cast<double>(tp) / n_id;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kTrainId: return "train_id";
    case Role::kCsid: return "csid";
    case Role::kNearOod: return "near_ood";
    case Role::kFarOod: return "far_ood";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  for (Role r : {Role::kTrainId, Role::kCsid, Role::kNearOod, Role::kFarOod}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(IdPolicy policy) {
  return policy == IdPolicy::kClassic ? "classic" : "full_spectrum";
}

std::optional<IdPolicy> parse_id_policy(std::string_view name) {
  if (name == "classic") return IdPolicy::kClassic;
  if (name == "full_spectrum") return IdPolicy::kFullSpectrum;
  return std::nullopt;
}

const MetricRow* EvalReport::find(std::string_view dataset, std::string_view kind) const {
  for (const MetricRow& r : rows) {
    if (r.dataset == dataset && r.kind == kind) return &r;
  }
  return nullptr;
}

EvalReport evaluate_benchmark(std::span<const ScoreSet> sets, IdPolicy policy) {
  EvalReport report;
  report.policy = policy;
  std::vector<std::string> kinds;
  for (const ScoreSet& s : sets) {
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) kinds.push_back(s.kind);
  }
  require(!kinds.empty(), ErrorCode::kInvalidArgument, "evaluate_benchmark: no score sets");

  for (const std::string& kind : kinds) {
    const ScoreSet* train = nullptr;
    std::vector<const ScoreSet*> csid, ood;
    for (const ScoreSet& s : sets) {
      if (s.kind != kind) continue;
      switch (s.role) {
        case Role::kTrainId:
          require(train == nullptr, ErrorCode::kInvalidArgument,
                  "evaluate_benchmark: more than one train_id set for kind " + kind);
          train = &s;
          break;
        case Role::kCsid: csid.push_back(&s); break;
        default: ood.push_back(&s); break;
      }
    }
    require(train != nullptr, ErrorCode::kInvalidArgument,
            "evaluate_benchmark: zero train_id sets for kind " + kind);

    std::vector<double> positives = train->scores;
    if (policy == IdPolicy::kFullSpectrum) {
      for (const ScoreSet* c : csid) positives.insert(positives.end(), c->scores.begin(), c->scores.end());
    }

    auto metrics = [](std::span<const double> pos, std::span<const double> neg, MetricRow row) {
      row.fpr95 = fpr_at_tpr(pos, neg, 0.95);
      row.auroc = auroc(pos, neg);
      row.aupr = aupr(pos, neg);
      return row;
    };

    std::vector<MetricRow> dataset_rows;
    for (const ScoreSet* s : ood) {
      dataset_rows.push_back(
          metrics(positives, s->scores, MetricRow{s->dataset, s->role, kind, RowType::kDataset}));
    }
    report.rows.insert(report.rows.end(), dataset_rows.begin(), dataset_rows.end());

    for (Role group : {Role::kNearOod, Role::kFarOod}) {
      MetricRow mean{std::string(group == Role::kNearOod ? kNearMeanName : kFarMeanName), group,
                     kind, RowType::kGroupMean};
      std::size_t count = 0;
      for (const MetricRow& r : dataset_rows) {
        if (r.role != group) continue;
        mean.fpr95 += r.fpr95;
        mean.auroc += r.auroc;
        mean.aupr += r.aupr;
        ++count;
      }
      if (count == 0) continue;
      mean.fpr95 /= static_cast<double>(count);
      mean.auroc /= static_cast<double>(count);
      mean.aupr /= static_cast<double>(count);
      report.rows.push_back(mean);
    }

    for (const ScoreSet* c : csid) {
      report.rows.push_back(
          metrics(train->scores, c->scores, MetricRow{c->dataset, c->role, kind, RowType::kCsid}));
    }
  }
  return report;
}

}  // namespace semood
