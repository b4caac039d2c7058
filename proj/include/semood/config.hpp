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

#ifndef SEMOOD_CONFIG_HPP
#define SEMOOD_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semood/eval.hpp"
#include "semood/finetune.hpp"
#include "semood/pipeline.hpp"
#include "semood/synth.hpp"

namespace semood {

// Benchmark configuration (JSON). Every object is validated strictly: unknown
// keys, wrong types and out-of-range values are rejected before anything runs.
//
// {
//   "seed": 0, "id_policy": "full_spectrum", "kinds": ["sem", ...],
//   "image_size": 16, "classes": 4,
//   "datasets": [{"name", "role", "use", "source", "count", "shift", "labels",
//                 "features"}],
//   "train": {...}, "finetune": {...}, "sem": {...}, "odin": {...}, "ebo": {...}
// }
//
// Dataset sources:
//   "synth:<generator>"  procedural split (generators: id_glyphs, near_glyphs_a,
//                        near_glyphs_b, texture, noise_field)
//   "idx:<path>"         IDX u8 images; "labels" may name an IDX label file
//   "tnsr:<path>"        float32 TNSR images N×1×H×W in [0, 1]
// "features" optionally names precomputed TNSR matrices ("logits", "penult",
// "low_stats") that replace the network for every score kind except ODIN.
// Relative paths resolve against the directory of the file that names them.

struct FeatureFiles {
  std::string logits;
  std::string penult;
  std::string low_stats;
  bool empty() const noexcept { return logits.empty() && penult.empty() && low_stats.empty(); }
  bool operator==(const FeatureFiles&) const = default;
};

struct DatasetSpec {
  std::string name;
  Role role = Role::kTrainId;
  SplitUse use = SplitUse::kTest;
  std::string source;  // "synth:..", "idx:..", "tnsr:.."
  std::size_t count = 0;
  CovariateShift shift;
  std::string labels;  // "idx:<path>" or "tnsr:<path>" for non-synthetic sources
  FeatureFiles features;
  bool operator==(const DatasetSpec&) const = default;
};

struct BenchConfig {
  std::uint64_t seed = 0;
  IdPolicy id_policy = IdPolicy::kFullSpectrum;
  std::vector<ScoreKind> kinds{std::begin(kAllScoreKinds), std::end(kAllScoreKinds)};
  std::size_t image_size = 16;
  std::size_t classes = 4;
  std::vector<DatasetSpec> datasets;
  TrainConfig train;
  FinetuneConfig finetune;
  SemOptions sem;
  OdinSettings odin;
  double ebo_temperature = 1.0;

  /// The built-in synthetic benchmark with the tuned desk-scale defaults.
  static BenchConfig synthetic_default();

  /// Configurations derived for each stage; all take their seed from `seed`.
  SynthBenchConfig synth_config() const;
  TrainConfig train_config() const;
  FinetuneConfig finetune_config() const;
  SemOptions sem_options() const;
  NetConfig net_config() const;

  const DatasetSpec* find(std::string_view name) const;
};

/// Parses and validates a configuration document.
BenchConfig parse_bench_config(std::string_view json_text);

/// Serializes every field, defaults included, as stable indented JSON.
std::string bench_config_to_json(const BenchConfig& config);

/// Applies a JSON object of overrides (same schema, any subset of top-level
/// keys) and re-validates. Nested objects merge key by key; arrays replace.
BenchConfig apply_overrides(const BenchConfig& config, std::string_view overrides_json);

// Dataset directory: "dataset.json" plus one file per split. The manifest
// embeds the resolved configuration so later commands reuse its settings.
inline constexpr const char* kManifestName = "dataset.json";

struct LoadedSplit {
  DatasetSpec spec;
  Tensor images;            // N×1×S×S; may be empty when only features are given
  std::vector<int> labels;  // empty for unlabelled splits
  std::optional<Features> features;
  std::size_t size() const noexcept;
};

struct Benchmark {
  BenchConfig config;
  std::vector<LoadedSplit> splits;

  const LoadedSplit& split(std::string_view name) const;
  /// The unique split with role train_id and use train.
  const LoadedSplit& train_split() const;
  /// First validation split of the given role, if any.
  const LoadedSplit* val_split(Role role) const;
};

/// Loads either a dataset directory or a configuration file, in which case
/// synthetic splits are generated in memory and file sources are read.
/// `overrides_json` (may be empty) is applied to the configuration first.
Benchmark load_benchmark(const std::filesystem::path& path, std::string_view overrides_json = {});

/// Loads only the configuration of a dataset directory or config file.
BenchConfig load_bench_config(const std::filesystem::path& path,
                              std::string_view overrides_json = {});

/// Writes a dataset directory: images as IDX (synthetic and IDX sources) or
/// TNSR, labels as IDX, features as TNSR, and the manifest.
void write_benchmark(const Benchmark& bench, const std::filesystem::path& dir);

}  // namespace semood

#endif  // SEMOOD_CONFIG_HPP
