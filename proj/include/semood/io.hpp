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

#ifndef SEMOOD_IO_HPP
#define SEMOOD_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semood/eval.hpp"
#include "semood/pipeline.hpp"
#include "semood/tensor.hpp"

namespace semood {

// TNSR layout, all integers little-endian:
//   "TNSR" | u16 version (1) | u8 dtype | u8 ndim | u32 dims[ndim] | payload
// dtype 0 is float32. Model containers additionally use dtype 1 (float64)
// blocks internally; standalone tensor files are float32 only.
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 0;
inline constexpr std::uint8_t kDtypeFloat64 = 1;

std::string encode_tensor(const Tensor& t);
/// Decodes one float32 tensor starting at `offset`, advancing it.
Tensor decode_tensor(std::string_view bytes, std::size_t& offset);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

// IDX (big-endian): 0x00000803 u8 images N×H×W, 0x00000801 u8 labels N.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Images come back as N×1×H×W floats in [0, 1] (byte / 255).
Tensor decode_idx_images(std::string_view bytes);
std::vector<int> decode_idx_labels(std::string_view bytes);
Tensor read_idx_images(const std::filesystem::path& path);
std::vector<int> read_idx_labels(const std::filesystem::path& path);

/// Pixels are rounded to the nearest multiple of 1/255; values outside [0, 1]
/// are rejected.
std::string encode_idx_images(const Tensor& images);
std::string encode_idx_labels(std::span<const int> labels);
void write_idx_images(const std::filesystem::path& path, const Tensor& images);
void write_idx_labels(const std::filesystem::path& path, std::span<const int> labels);

// Model container:
//   "SEMM" | u16 version (1) | u32 header length | JSON header | TNSR blocks
// The header lists the components present, the seed provenance and the byte
// range of every block.
inline constexpr std::uint16_t kModelVersion = 1;

struct ModelProvenance {
  std::uint64_t train_seed = 0;
  std::uint64_t fit_seed = 0;
  std::uint64_t finetune_seed = 0;
  bool finetuned = false;
  bool operator==(const ModelProvenance&) const = default;
};

struct ModelFile {
  ScoringBundle bundle;
  ModelProvenance provenance;
};

std::string encode_model(const ModelFile& m);
ModelFile decode_model(std::string_view bytes);
void save_model(const std::filesystem::path& path, const ModelFile& m);
ModelFile load_model(const std::filesystem::path& path);

/// Loads and insists on a component; a missing one raises kMissingComponent.
NetParams load_net(const std::filesystem::path& path);
SemModel load_sem(const std::filesystem::path& path);
MdsModel load_mds(const std::filesystem::path& path);

/// Names of the components stored in a model file header ("net", "sem", ...).
std::vector<std::string> model_components(const ModelFile& m);

// Score files: one float32 TNSR vector plus a CSV with full double precision.
void write_scores(const std::filesystem::path& tnsr_path, const std::filesystem::path& csv_path,
                  std::string_view dataset, std::string_view kind,
                  std::span<const double> scores);
std::vector<double> read_scores(const std::filesystem::path& tnsr_path);
std::vector<double> read_scores_csv(const std::filesystem::path& csv_path);

/// File stem used for a dataset/kind score pair.
std::string score_file_stem(std::string_view dataset, std::string_view kind);

/// CSV columns: dataset,role,kind,fpr95,auroc,aupr.
std::string report_to_csv(const EvalReport& r);
std::string report_to_json(const EvalReport& r);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace semood

#endif  // SEMOOD_IO_HPP
