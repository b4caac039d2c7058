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

#ifndef SEMOOD_MICRONET_HPP
#define SEMOOD_MICRONET_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "semood/tensor.hpp"

namespace semood {

struct ConvSpec {
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  bool operator==(const ConvSpec&) const = default;
};

struct MapShape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t size() const noexcept { return channels * height * width; }
};

/// Architecture of the classifier. Every conv is followed by ReLU and a
/// non-overlapping max pool; every hidden fully-connected layer by ReLU.
struct NetConfig {
  std::size_t in_channels = 1;
  std::size_t height = 16;
  std::size_t width = 16;
  std::vector<ConvSpec> convs{{6, 5}, {16, 5}};
  std::size_t pool = 2;
  std::vector<std::size_t> hidden{120, 84};
  std::size_t classes = 10;

  /// conv(→6,5×5) → conv(→16,5×5) → FC 120 → FC 84 → FC classes.
  static NetConfig lenet5(std::size_t channels, std::size_t height, std::size_t width,
                          std::size_t classes);

  void validate() const;

  MapShape input_shape() const noexcept { return {in_channels, height, width}; }
  MapShape conv_output(std::size_t i) const;  // after ReLU, before pooling
  MapShape pool_output(std::size_t i) const;
  std::size_t flat_features() const;
  std::size_t penult_dim() const;
  std::size_t fc_count() const noexcept { return hidden.size() + 1; }
  std::size_t layer_count() const noexcept { return convs.size() + fc_count(); }
  std::vector<Shape> weight_shapes() const;
  std::vector<Shape> bias_shapes() const;

  bool operator==(const NetConfig&) const = default;
};

/// Weights are [out, in, k, k] for convs and [out, in] for FC layers; layers
/// are ordered convs first, then FCs. `version` is a content fingerprint
/// stamped by the training routines.
template <class Real>
struct BasicNetParams {
  NetConfig config;
  std::vector<BasicTensor<Real>> weights;
  std::vector<BasicTensor<Real>> biases;
  std::uint64_t version = 0;

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
  }

  bool operator==(const BasicNetParams&) const = default;
};

using NetParams = BasicNetParams<float>;
using NetParams64 = BasicNetParams<double>;

/// He-uniform weights (bound sqrt(6 / fan_in)) and zero biases.
NetParams init_params(const NetConfig& config, std::uint64_t seed);

template <class To, class From>
BasicNetParams<To> convert_params(const BasicNetParams<From>& from) {
  BasicNetParams<To> to;
  to.config = from.config;
  to.version = from.version;
  auto cast = [](const BasicTensor<From>& t) {
    std::vector<To> v(t.storage().begin(), t.storage().end());
    return BasicTensor<To>(t.shape(), std::move(v));
  };
  for (const auto& w : from.weights) to.weights.push_back(cast(w));
  for (const auto& b : from.biases) to.biases.push_back(cast(b));
  return to;
}

/// FNV-1a over the parameter bytes.
std::uint64_t fingerprint(const NetParams& params);

template <class Real>
struct BasicForwardTrace {
  std::vector<Real> logits;
  std::vector<Real> penult;
  BasicTensor<Real> first_maps;  // C1×H1×W1, post-ReLU

  // Backprop cache, populated only when requested.
  bool has_cache = false;
  std::vector<std::vector<Real>> conv_input;
  std::vector<std::vector<Real>> conv_act;
  std::vector<std::vector<std::uint32_t>> pool_argmax;
  std::vector<std::vector<Real>> fc_input;
  std::vector<std::vector<Real>> fc_act;  // hidden layers only
};

using ForwardTrace = BasicForwardTrace<float>;

/// Runs one image (C×H×W, flattened). The first-layer tap and penultimate
/// features are always populated.
template <class Real>
BasicForwardTrace<Real> forward_one(const BasicNetParams<Real>& params,
                                    std::span<const Real> image, bool keep_cache);

/// `batch` must be N×C×H×W matching the config.
template <class Real>
std::vector<BasicForwardTrace<Real>> forward(const BasicNetParams<Real>& params,
                                             const BasicTensor<Real>& batch,
                                             bool keep_cache = false);

/// Parameter gradients, accumulated in double regardless of storage type.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const NetConfig& config);
  void add(const Gradients& other);
  void scale(double factor);
  double max_abs() const;
};

/// Accumulates into `grads` the gradient of a loss whose derivatives with
/// respect to the logits and the first-layer maps are `d_logits` and
/// `d_first_maps` (empty span = no contribution). If `d_input` is non-null it
/// receives the gradient with respect to the image.
template <class Real>
void backward(const BasicNetParams<Real>& params, const BasicForwardTrace<Real>& trace,
              std::span<const Real> d_logits, std::span<const Real> d_first_maps,
              Gradients& grads, std::vector<Real>* d_input = nullptr);

template <class Real>
Gradients backward(const BasicNetParams<Real>& params, const BasicForwardTrace<Real>& trace,
                   std::span<const Real> d_logits, std::span<const Real> d_first_maps) {
  Gradients g = Gradients::zeros_like(params.config);
  backward(params, trace, d_logits, d_first_maps, g);
  return g;
}

/// Cross-entropy -log softmax(logits)[label] and its logit gradient.
double cross_entropy(std::span<const float> logits, int label);
double cross_entropy(std::span<const double> logits, int label);
template <class Real>
std::vector<Real> cross_entropy_grad(std::span<const Real> logits, int label);

/// Momentum SGD with coupled weight decay:
///   v ← momentum·v + g + weight_decay·θ
///   θ ← θ − lr·v
/// Velocity lives in `SgdState` and is kept in double.
struct SgdState {
  Gradients velocity;
};

void sgd_step(NetParams& params, const Gradients& grads, double lr, double momentum,
              double weight_decay, SgdState& state);

/// lr0·½(1 + cos(π·epoch/total)).
double cosine_lr(std::size_t epoch, std::size_t total, double lr0);

/// lambda·a + (1 − lambda)·b elementwise.
Tensor mixup(const Tensor& batch_a, const Tensor& batch_b, double lambda);

struct LabeledImages {
  Tensor images;  // N×C×H×W
  std::vector<int> labels;
  std::size_t size() const noexcept { return labels.size(); }
};

enum class LrSchedule { kCosine, kConstant };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  double lr0 = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  LrSchedule schedule = LrSchedule::kCosine;
  std::size_t classes = 0;  // 0: max label + 1
};

struct TrainResult {
  NetParams params;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

/// Trains a LeNet-5 style net initialised from the seed.
TrainResult train_classifier(const LabeledImages& data, const TrainConfig& config);

/// Continues training from `init` with fresh optimizer state.
TrainResult train_classifier(const LabeledImages& data, const TrainConfig& config,
                             NetParams init);

/// Extra per-batch objective plugged into the SGD loop. Given the forward
/// traces of the batch (with caches) it may accumulate parameter gradients
/// directly, fill `d_first_maps[i]` for batch sample i (left empty when unused)
/// and returns the scalar it added to the loss.
struct BatchObjective {
  std::function<void(std::size_t epoch, const NetParams& params)> epoch_begin;
  std::function<double(const NetParams& params, std::span<const std::size_t> batch,
                       const std::vector<ForwardTrace>& traces,
                       std::vector<std::vector<float>>& d_first_maps, Gradients& grads)>
      batch_term;
  std::function<void(std::size_t epoch)> epoch_end;
};

/// Stream ids under the training seed.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kShuffleStream = 1;

/// The mini-batch SGD loop shared by training and fine-tuning.
TrainResult run_sgd(const LabeledImages& data, const TrainConfig& config, NetParams params,
                    const BatchObjective* objective);

/// Copies the selected images into an |indices|×C×H×W tensor.
Tensor gather_images(const Tensor& images, std::span<const std::size_t> indices);

}  // namespace semood

#endif  // SEMOOD_MICRONET_HPP
