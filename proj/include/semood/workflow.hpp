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

#ifndef SEMOOD_WORKFLOW_HPP
#define SEMOOD_WORKFLOW_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "semood/config.hpp"
#include "semood/io.hpp"

namespace semood {

// The end-to-end stages behind the command line. Each returns the produced
// model plus a small JSON summary for display; the summaries are not part of
// any output file.

struct StageResult {
  ModelFile model;
  std::string summary_json;
};

/// Trains the classifier on the training split from the configured seed.
StageResult run_train(const Benchmark& bench);

/// Source-awareness fine-tuning of the model's net. The result holds only the
/// net: density models fitted to the old weights would be stale.
StageResult run_finetune(const Benchmark& bench, const ModelFile& model);

/// Fits SEM and MDS on the training split and tunes the ODIN step on the
/// validation splits (train_id and near_ood, use "val") when both exist.
/// A training split with precomputed features is fitted from those instead.
StageResult run_fit(const Benchmark& bench, const ModelFile& model);

/// Scores one split. Precomputed features take precedence over images for
/// every kind except ODIN.
std::vector<double> run_score(const Benchmark& bench, const ModelFile& model,
                              const LoadedSplit& split, ScoreKind kind);

/// log p(x) through the SEM top pipeline for every sample of a split.
std::vector<double> run_top_log_density(const Benchmark& bench, const ModelFile& model,
                                        const LoadedSplit& split);

/// Splits the evaluation consumes: every split with use "test".
std::vector<const DatasetSpec*> evaluation_splits(const BenchConfig& config);

/// Writes <dir>/<split>.<kind>.tnsr and .csv for every evaluation split.
/// Returns the list of written stems as JSON.
std::string write_score_files(const Benchmark& bench, const ModelFile& model, ScoreKind kind,
                              const std::filesystem::path& dir);

/// Builds the report from score files only. Each <split>.<kind> pair is read
/// from the CSV when present (full precision, checked against the tensor) and
/// from the TNSR otherwise.
EvalReport evaluate_score_files(const BenchConfig& config, const std::filesystem::path& dir);

/// Writes report.csv and report.json into `dir`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace semood

#endif  // SEMOOD_WORKFLOW_HPP
