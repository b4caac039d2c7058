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

#include "semood/workflow.hpp"

#include <cmath>

#include <json.hpp>

namespace semood {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

LabeledImages labeled(const LoadedSplit& s) {
  require(s.images.rank() == 4, ErrorCode::kInvalidArgument,
          "dataset " + s.spec.name + " has no images");
  require(s.labels.size() == s.size(), ErrorCode::kInvalidArgument,
          "dataset " + s.spec.name + " has no labels");
  return {s.images, s.labels};
}

const NetParams& need_net(const ModelFile& m) {
  require(m.bundle.net.has_value(), ErrorCode::kMissingComponent,
          "model has no 'net' component");
  return *m.bundle.net;
}

/// Accuracy on every labelled evaluation split with role train_id.
ordered_json test_accuracy(const Benchmark& bench, const NetParams& net) {
  ordered_json acc = ordered_json::object();
  for (const LoadedSplit& s : bench.splits) {
    if (s.spec.role != Role::kTrainId || s.spec.use != SplitUse::kTest) continue;
    if (s.images.rank() != 4 || s.labels.size() != s.size() || s.size() == 0) continue;
    acc[s.spec.name] = accuracy(net, {s.images, s.labels});
  }
  return acc;
}

/// Scores of one split and kind. The CSV keeps full double precision (float32
/// saturates softmax maxima near 1 into ties), so it is preferred when present
/// and must agree with the tensor after rounding.
std::vector<double> load_score_file(const fs::path& dir, const std::string& stem) {
  const fs::path tnsr = dir / (stem + ".tnsr");
  const fs::path csv = dir / (stem + ".csv");
  if (!fs::exists(csv)) return read_scores(tnsr);
  std::vector<double> exact = read_scores_csv(csv);
  if (fs::exists(tnsr)) {
    const std::vector<double> rounded = read_scores(tnsr);
    require(rounded.size() == exact.size(), ErrorCode::kFormat,
            "scores: " + csv.string() + " and " + tnsr.string() + " differ in length");
    for (std::size_t i = 0; i < exact.size(); ++i) {
      require(static_cast<double>(static_cast<float>(exact[i])) == rounded[i], ErrorCode::kFormat,
              "scores: " + csv.string() + " disagrees with " + tnsr.string() + " at row " +
                  std::to_string(i));
    }
  }
  for (double v : exact) {
    require(std::isfinite(v), ErrorCode::kFormat, "scores: non-finite value in " + csv.string());
  }
  return exact;
}

}  // namespace

StageResult run_train(const Benchmark& bench) {
  const LabeledImages data = labeled(bench.train_split());
  const TrainConfig tc = bench.config.train_config();
  TrainResult r = train_classifier(data, tc);
  StageResult out;
  out.model.provenance.train_seed = tc.seed;
  ordered_json summary;
  summary["stage"] = "train";
  summary["epoch_loss"] = r.epoch_loss;
  summary["accuracy"] = test_accuracy(bench, r.params);
  out.model.bundle.net = std::move(r.params);
  out.model.bundle.odin = bench.config.odin;
  out.model.bundle.ebo_temperature = bench.config.ebo_temperature;
  out.summary_json = summary.dump(2);
  return out;
}

StageResult run_finetune(const Benchmark& bench, const ModelFile& model) {
  const NetParams& net = need_net(model);
  const LabeledImages data = labeled(bench.train_split());
  const FinetuneConfig fc = bench.config.finetune_config();
  const SourceGap before = measure_source_gap(net, data, fc.seed, fc.mixup_alpha,
                                              fc.low_components);
  FinetuneResult r = finetune(net, data, fc);
  const SourceGap after = measure_source_gap(r.params, data, fc.seed, fc.mixup_alpha,
                                             fc.low_components);
  StageResult out;
  out.model.provenance = model.provenance;
  out.model.provenance.finetune_seed = fc.seed;
  out.model.provenance.finetuned = true;
  ordered_json epochs = ordered_json::array();
  for (const FinetuneEpoch& e : r.report.epochs) {
    epochs.push_back({{"cls_loss", e.cls_loss},
                      {"src_loss", e.src_loss},
                      {"id_log_density", e.id_log_density},
                      {"neg_log_density", e.neg_log_density}});
  }
  ordered_json summary;
  summary["stage"] = "finetune";
  summary["epochs"] = epochs;
  summary["source_gap_before"] = before.gap();
  summary["source_gap_after"] = after.gap();
  summary["accuracy"] = test_accuracy(bench, r.params);
  out.model.bundle.net = std::move(r.params);
  out.model.bundle.odin = bench.config.odin;
  out.model.bundle.ebo_temperature = bench.config.ebo_temperature;
  out.summary_json = summary.dump(2);
  return out;
}

StageResult run_fit(const Benchmark& bench, const ModelFile& model) {
  const LoadedSplit& train = bench.train_split();
  const SemOptions sem = bench.config.sem_options();
  StageResult out;
  out.model.provenance = model.provenance;
  out.model.provenance.fit_seed = bench.config.seed;
  ordered_json summary;
  summary["stage"] = "fit";

  const bool from_features = train.features && train.features->penult.rows > 0 &&
                             train.features->low_stats.rows > 0;
  if (from_features) {
    require(train.labels.size() == train.size(), ErrorCode::kInvalidArgument,
            "fit: the training split has no labels");
    out.model.bundle = fit_bundle_features(*train.features, train.labels, sem);
    out.model.bundle.net = model.bundle.net;
    out.model.bundle.odin = bench.config.odin;
    out.model.bundle.odin.epsilon = bench.config.odin.grid.front();
    summary["source"] = "features";
  } else {
    const NetParams& net = need_net(model);
    const LoadedSplit* id_val = bench.val_split(Role::kTrainId);
    const LoadedSplit* ood_val = bench.val_split(Role::kNearOod);
    OdinSettings odin = bench.config.odin;
    odin.epsilon = odin.grid.front();
    out.model.bundle = fit_bundle(net, labeled(train), sem, id_val ? &id_val->images : nullptr,
                                  ood_val ? &ood_val->images : nullptr, odin);
    summary["source"] = "images";
    summary["odin_tuned"] = id_val && ood_val;
  }
  out.model.bundle.ebo_temperature = bench.config.ebo_temperature;
  summary["odin_epsilon"] = out.model.bundle.odin.epsilon;
  summary["top_components"] = out.model.bundle.sem->meta.top_components;
  summary["low_components"] = out.model.bundle.sem->meta.low_components;
  out.summary_json = summary.dump(2);
  return out;
}

std::vector<double> run_score(const Benchmark&, const ModelFile& model, const LoadedSplit& split,
                              ScoreKind kind) {
  if (split.features && kind != ScoreKind::kOdin) {
    return score_features(model.bundle, kind, *split.features);
  }
  require(split.images.rank() == 4, ErrorCode::kInvalidArgument,
          "dataset " + split.spec.name + " has no images to score with '" +
              std::string(to_string(kind)) + "'");
  return score_images(model.bundle, kind, split.images);
}

std::vector<double> run_top_log_density(const Benchmark&, const ModelFile& model,
                                        const LoadedSplit& split) {
  require(model.bundle.sem.has_value(), ErrorCode::kMissingComponent,
          "model has no 'sem' component");
  Matrix penult;
  if (split.features && split.features->penult.rows > 0) {
    penult = split.features->penult;
  } else {
    require(split.images.rank() == 4, ErrorCode::kInvalidArgument,
            "dataset " + split.spec.name + " has no images");
    penult = extract_features(need_net(model), split.images).penult;
  }
  std::vector<double> out(penult.rows);
  for (std::size_t i = 0; i < penult.rows; ++i) {
    out[i] = top_log_density(*model.bundle.sem, penult.row(i));
  }
  return out;
}

std::vector<const DatasetSpec*> evaluation_splits(const BenchConfig& config) {
  std::vector<const DatasetSpec*> out;
  for (const DatasetSpec& d : config.datasets) {
    if (d.use == SplitUse::kTest) out.push_back(&d);
  }
  return out;
}

std::string write_score_files(const Benchmark& bench, const ModelFile& model, ScoreKind kind,
                              const fs::path& dir) {
  ordered_json written = ordered_json::array();
  for (const DatasetSpec* d : evaluation_splits(bench.config)) {
    const LoadedSplit& split = bench.split(d->name);
    const std::vector<double> scores = run_score(bench, model, split, kind);
    const std::string stem = score_file_stem(d->name, to_string(kind));
    write_scores(dir / (stem + ".tnsr"), dir / (stem + ".csv"), d->name, to_string(kind), scores);
    written.push_back(stem);
  }
  return written.dump();
}

EvalReport evaluate_score_files(const BenchConfig& config, const fs::path& dir) {
  std::vector<ScoreSet> sets;
  for (ScoreKind kind : config.kinds) {
    for (const DatasetSpec* d : evaluation_splits(config)) {
      const std::string stem = score_file_stem(d->name, to_string(kind));
      sets.push_back({d->name, d->role, std::string(to_string(kind)), load_score_file(dir, stem)});
    }
  }
  return evaluate_benchmark(sets, config.id_policy);
}

void write_report(const EvalReport& report, const fs::path& dir) {
  write_file(dir / "report.csv", report_to_csv(report));
  write_file(dir / "report.json", report_to_json(report));
}

}  // namespace semood
