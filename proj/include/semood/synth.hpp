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

#ifndef SEMOOD_SYNTH_HPP
#define SEMOOD_SYNTH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semood/eval.hpp"
#include "semood/tensor.hpp"

namespace semood {

/// Procedural stand-in for a digits-style full-spectrum benchmark: white
/// anti-aliased stroke glyphs on black, 1×S×S, quantised to 8 bits.

/// Appearance shift applied after rendering:
///   p' = clamp(background + contrast·p + noise_sigma·N(0, 1), 0, 1)
struct CovariateShift {
  double noise_sigma = 0.0;
  double contrast = 1.0;
  double background = 0.0;
  bool is_identity() const noexcept {
    return noise_sigma == 0.0 && contrast == 1.0 && background == 0.0;
  }
  bool operator==(const CovariateShift&) const = default;
};

enum class Generator {
  kIdGlyphs,      // the C training classes
  kNearGlyphsA,   // disjoint stroke shapes, training rendering style
  kNearGlyphsB,
  kTexture,       // sums of random gratings
  kNoiseField,    // box-filtered random fields
};
std::string_view to_string(Generator g);
std::optional<Generator> parse_generator(std::string_view name);

/// How a split is used: fitting, evaluation, or hyper-parameter validation.
enum class SplitUse { kTrain, kTest, kVal };
std::string_view to_string(SplitUse u);
std::optional<SplitUse> parse_split_use(std::string_view name);

struct SynthSplit {
  std::string name;
  Role role = Role::kTrainId;
  SplitUse use = SplitUse::kTest;
  Generator generator = Generator::kIdGlyphs;
  std::size_t count = 0;
  CovariateShift shift;
};

struct SynthBenchConfig {
  std::uint64_t seed = 0;
  std::size_t image_size = 16;
  std::size_t classes = 4;
  std::vector<SynthSplit> splits = default_splits();

  /// train / test_id / id_val, two csid, two near-OOD plus a near validation
  /// split, two far-OOD.
  static std::vector<SynthSplit> default_splits();
};

inline constexpr std::size_t kMaxSynthClasses = 10;

struct Dataset {
  std::string name;
  Role role = Role::kTrainId;
  SplitUse use = SplitUse::kTest;
  Tensor images;            // N×1×S×S in [0, 1]
  std::vector<int> labels;  // empty for unlabelled (OOD) splits
};

/// Deterministic in the seed. Each split draws from its own stream keyed by
/// the split name, so adding or reordering splits leaves the others intact.
std::vector<Dataset> synth_benchmark(const SynthBenchConfig& config);

/// One split; exposed so tests can compare generator paths directly.
Dataset synth_split(const SynthBenchConfig& config, const SynthSplit& split);

/// Render path keyed by an explicit stream seed rather than the split name.
Dataset synth_split_with_stream(const SynthBenchConfig& config, const SynthSplit& split,
                                std::uint64_t stream_seed);

std::uint64_t split_stream_seed(std::uint64_t seed, std::string_view split_name);

}  // namespace semood

#endif  // SEMOOD_SYNTH_HPP
