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

#include "semood/micronet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "semood/numerics.hpp"
#include "semood/rng.hpp"

namespace semood {

// ---------------------------------------------------------------------------
// Config

NetConfig NetConfig::lenet5(std::size_t channels, std::size_t height, std::size_t width,
                            std::size_t classes) {
  NetConfig c;
  c.in_channels = channels;
  c.height = height;
  c.width = width;
  c.classes = classes;
  return c;
}

MapShape NetConfig::conv_output(std::size_t i) const {
  MapShape s = input_shape();
  for (std::size_t l = 0; l <= i; ++l) {
    const std::size_t k = convs.at(l).kernel;
    if (l > 0) {
      s.height /= pool;
      s.width /= pool;
    }
    require(s.height >= k && s.width >= k, ErrorCode::kInvalidArgument,
            "conv layer " + std::to_string(l) + ": kernel " + std::to_string(k) +
                " larger than input " + std::to_string(s.height) + "x" +
                std::to_string(s.width));
    s = {convs[l].out_channels, s.height - k + 1, s.width - k + 1};
  }
  return s;
}

MapShape NetConfig::pool_output(std::size_t i) const {
  MapShape s = conv_output(i);
  return {s.channels, s.height / pool, s.width / pool};
}

std::size_t NetConfig::flat_features() const {
  return convs.empty() ? input_shape().size() : pool_output(convs.size() - 1).size();
}

std::size_t NetConfig::penult_dim() const {
  return hidden.empty() ? flat_features() : hidden.back();
}

void NetConfig::validate() const {
  require(in_channels > 0 && height > 0 && width > 0, ErrorCode::kInvalidArgument,
          "net config: empty input shape");
  require(!convs.empty(), ErrorCode::kInvalidArgument,
          "net config: at least one conv layer is required for the feature tap");
  require(pool >= 1, ErrorCode::kInvalidArgument, "net config: pool must be >= 1");
  require(classes >= 2, ErrorCode::kInvalidArgument, "net config: need >= 2 classes");
  for (const auto& c : convs) {
    require(c.out_channels > 0 && c.kernel > 0, ErrorCode::kInvalidArgument,
            "net config: empty conv spec");
  }
  for (std::size_t h : hidden) {
    require(h > 0, ErrorCode::kInvalidArgument, "net config: empty hidden layer");
  }
  require(flat_features() > 0, ErrorCode::kInvalidArgument,
          "net config: pooling leaves no spatial extent");
}

std::vector<Shape> NetConfig::weight_shapes() const {
  std::vector<Shape> shapes;
  std::size_t in = in_channels;
  for (const auto& c : convs) {
    shapes.push_back({c.out_channels, in, c.kernel, c.kernel});
    in = c.out_channels;
  }
  std::size_t width_in = flat_features();
  for (std::size_t h : hidden) {
    shapes.push_back({h, width_in});
    width_in = h;
  }
  shapes.push_back({classes, width_in});
  return shapes;
}

std::vector<Shape> NetConfig::bias_shapes() const {
  std::vector<Shape> shapes;
  for (const auto& c : convs) shapes.push_back({c.out_channels});
  for (std::size_t h : hidden) shapes.push_back({h});
  shapes.push_back({classes});
  return shapes;
}

NetParams init_params(const NetConfig& config, std::uint64_t seed) {
  config.validate();
  NetParams p;
  p.config = config;
  Rng rng(seed);
  for (const Shape& shape : config.weight_shapes()) {
    const std::size_t fan_in = shape_size(shape) / shape[0];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Tensor w(shape);
    for (float& x : w.storage()) x = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
    p.weights.push_back(std::move(w));
  }
  for (const Shape& shape : config.bias_shapes()) p.biases.emplace_back(shape);
  p.version = fingerprint(p);
  return p;
}

std::uint64_t fingerprint(const NetParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](const Tensor& t) {
    for (float x : t.storage()) {
      std::uint32_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      for (int b = 0; b < 4; ++b) {
        h ^= (bits >> (8 * b)) & 0xFFu;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const auto& w : params.weights) eat(w);
  for (const auto& b : params.biases) eat(b);
  return h;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

template <class Real>
void conv_forward(std::span<const Real> in, MapShape is, const BasicTensor<Real>& w,
                  const BasicTensor<Real>& b, std::size_t k, std::vector<Real>& out,
                  MapShape os) {
  std::vector<double> acc(os.height * os.width);
  out.resize(os.size());
  for (std::size_t o = 0; o < os.channels; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(b[o]));
    for (std::size_t c = 0; c < is.channels; ++c) {
      const Real* plane = in.data() + c * is.height * is.width;
      const Real* kern = w.data().data() + ((o * is.channels + c) * k) * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const double wv = kern[ky * k + kx];
          for (std::size_t y = 0; y < os.height; ++y) {
            const Real* src = plane + (y + ky) * is.width + kx;
            double* dst = acc.data() + y * os.width;
            for (std::size_t x = 0; x < os.width; ++x) dst[x] += wv * src[x];
          }
        }
      }
    }
    Real* dst = out.data() + o * os.height * os.width;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      dst[i] = static_cast<Real>(acc[i] > 0.0 ? acc[i] : 0.0);
    }
  }
}

template <class Real>
void pool_forward(const std::vector<Real>& in, MapShape is, std::size_t p,
                  std::vector<Real>& out, std::vector<std::uint32_t>& argmax) {
  const std::size_t oh = is.height / p;
  const std::size_t ow = is.width / p;
  out.resize(is.channels * oh * ow);
  argmax.resize(out.size());
  for (std::size_t c = 0; c < is.channels; ++c) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (c * is.height + y * p) * is.width + x * p;
        for (std::size_t dy = 0; dy < p; ++dy) {
          for (std::size_t dx = 0; dx < p; ++dx) {
            const std::size_t idx = (c * is.height + y * p + dy) * is.width + x * p + dx;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (c * oh + y) * ow + x;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <class Real>
void fc_forward(const std::vector<Real>& in, const BasicTensor<Real>& w,
                const BasicTensor<Real>& b, bool relu, std::vector<Real>& out) {
  const std::size_t n_out = w.dim(0);
  const std::size_t n_in = w.dim(1);
  out.resize(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    const Real* row = w.data().data() + j * n_in;
    double acc = b[j];
    for (std::size_t i = 0; i < n_in; ++i) acc += static_cast<double>(row[i]) * in[i];
    if (relu && acc < 0.0) acc = 0.0;
    out[j] = static_cast<Real>(acc);
  }
}

}  // namespace

template <class Real>
BasicForwardTrace<Real> forward_one(const BasicNetParams<Real>& params,
                                    std::span<const Real> image, bool keep_cache) {
  const NetConfig& cfg = params.config;
  require(image.size() == cfg.input_shape().size(), ErrorCode::kShapeMismatch,
          "forward: image has " + std::to_string(image.size()) + " values, expected " +
              std::to_string(cfg.input_shape().size()));
  BasicForwardTrace<Real> t;
  t.has_cache = keep_cache;

  std::vector<Real> cur(image.begin(), image.end());
  MapShape shape = cfg.input_shape();
  std::vector<Real> act;
  std::vector<Real> pooled;
  std::vector<std::uint32_t> argmax;
  for (std::size_t l = 0; l < cfg.convs.size(); ++l) {
    const MapShape os = cfg.conv_output(l);
    conv_forward<Real>(cur, shape, params.weights[l], params.biases[l], cfg.convs[l].kernel,
                       act, os);
    if (l == 0) t.first_maps = BasicTensor<Real>({os.channels, os.height, os.width}, act);
    pool_forward(act, os, cfg.pool, pooled, argmax);
    if (keep_cache) {
      t.conv_input.push_back(std::move(cur));
      t.conv_act.push_back(act);
      t.pool_argmax.push_back(argmax);
    }
    cur = pooled;
    shape = {os.channels, os.height / cfg.pool, os.width / cfg.pool};
  }

  const std::size_t n_conv = cfg.convs.size();
  if (cfg.hidden.empty()) t.penult = cur;
  std::vector<Real> next;
  for (std::size_t j = 0; j < cfg.fc_count(); ++j) {
    const bool hidden = j + 1 < cfg.fc_count();
    fc_forward(cur, params.weights[n_conv + j], params.biases[n_conv + j], hidden, next);
    if (keep_cache) {
      t.fc_input.push_back(cur);
      if (hidden) t.fc_act.push_back(next);
    }
    if (j + 1 == cfg.hidden.size()) t.penult = next;
    cur.swap(next);
  }
  t.logits = std::move(cur);
  return t;
}

template <class Real>
std::vector<BasicForwardTrace<Real>> forward(const BasicNetParams<Real>& params,
                                             const BasicTensor<Real>& batch, bool keep_cache) {
  const NetConfig& cfg = params.config;
  require(batch.rank() == 4, ErrorCode::kShapeMismatch,
          "forward: batch must be N×C×H×W, got " + shape_to_string(batch.shape()));
  const char* names[] = {"N", "channels", "height", "width"};
  const std::size_t expect[] = {batch.dim(0), cfg.in_channels, cfg.height, cfg.width};
  for (std::size_t a = 1; a < 4; ++a) {
    require(batch.dim(a) == expect[a], ErrorCode::kShapeMismatch,
            std::string("forward: batch dimension ") + names[a] + " is " +
                std::to_string(batch.dim(a)) + ", expected " + std::to_string(expect[a]));
  }
  std::vector<BasicForwardTrace<Real>> traces;
  traces.reserve(batch.dim(0));
  for (std::size_t n = 0; n < batch.dim(0); ++n) {
    traces.push_back(forward_one(params, batch.item(n), keep_cache));
  }
  return traces;
}

// ---------------------------------------------------------------------------
// Backward

Gradients Gradients::zeros_like(const NetConfig& config) {
  Gradients g;
  for (const Shape& s : config.weight_shapes()) g.weights.emplace_back(shape_size(s), 0.0);
  for (const Shape& s : config.bias_shapes()) g.biases.emplace_back(shape_size(s), 0.0);
  return g;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
  }
}

void Gradients::scale(double factor) {
  for (auto& w : weights)
    for (double& x : w) x *= factor;
  for (auto& b : biases)
    for (double& x : b) x *= factor;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& w : weights)
    for (double x : w) m = std::max(m, std::abs(x));
  for (const auto& b : biases)
    for (double x : b) m = std::max(m, std::abs(x));
  return m;
}

template <class Real>
void backward(const BasicNetParams<Real>& params, const BasicForwardTrace<Real>& trace,
              std::span<const Real> d_logits, std::span<const Real> d_first_maps,
              Gradients& grads, std::vector<Real>* d_input) {
  const NetConfig& cfg = params.config;
  require(trace.has_cache, ErrorCode::kState,
          "backward: trace was produced without cached intermediates");
  require(d_logits.empty() || d_logits.size() == cfg.classes, ErrorCode::kShapeMismatch,
          "backward: d_logits has wrong length");
  require(d_first_maps.empty() || d_first_maps.size() == cfg.conv_output(0).size(),
          ErrorCode::kShapeMismatch, "backward: d_first_maps has wrong length");

  const std::size_t n_conv = cfg.convs.size();
  std::vector<double> delta(d_logits.begin(), d_logits.end());
  if (d_logits.empty()) delta.assign(cfg.classes, 0.0);

  // Fully-connected stack, last to first.
  for (std::size_t jj = cfg.fc_count(); jj-- > 0;) {
    const std::size_t layer = n_conv + jj;
    const BasicTensor<Real>& w = params.weights[layer];
    const std::vector<Real>& in = trace.fc_input[jj];
    const std::size_t n_out = w.dim(0);
    const std::size_t n_in = w.dim(1);
    std::vector<double>& gw = grads.weights[layer];
    std::vector<double>& gb = grads.biases[layer];
    std::vector<double> d_in(n_in, 0.0);
    for (std::size_t j = 0; j < n_out; ++j) {
      const double d = delta[j];
      if (d == 0.0) continue;
      gb[j] += d;
      const Real* row = w.data().data() + j * n_in;
      double* grow = gw.data() + j * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        grow[i] += d * static_cast<double>(in[i]);
        d_in[i] += d * static_cast<double>(row[i]);
      }
    }
    if (jj > 0) {
      const std::vector<Real>& act = trace.fc_act[jj - 1];
      for (std::size_t i = 0; i < n_in; ++i) {
        if (!(act[i] > 0)) d_in[i] = 0.0;
      }
    }
    delta = std::move(d_in);
  }

  // Conv stack: delta is the gradient w.r.t. the last pooled output.
  for (std::size_t l = n_conv; l-- > 0;) {
    const MapShape os = cfg.conv_output(l);
    const MapShape is = l == 0 ? cfg.input_shape() : cfg.pool_output(l - 1);
    std::vector<double> d_act(os.size(), 0.0);
    const auto& argmax = trace.pool_argmax[l];
    for (std::size_t i = 0; i < argmax.size(); ++i) d_act[argmax[i]] += delta[i];
    if (l == 0 && !d_first_maps.empty()) {
      for (std::size_t i = 0; i < d_act.size(); ++i) d_act[i] += d_first_maps[i];
    }
    const std::vector<Real>& act = trace.conv_act[l];
    for (std::size_t i = 0; i < d_act.size(); ++i) {
      if (!(act[i] > 0)) d_act[i] = 0.0;
    }

    const std::size_t k = cfg.convs[l].kernel;
    const BasicTensor<Real>& w = params.weights[l];
    const std::vector<Real>& in = trace.conv_input[l];
    std::vector<double>& gw = grads.weights[l];
    std::vector<double>& gb = grads.biases[l];
    const bool need_input_grad = l > 0 || d_input != nullptr;
    std::vector<double> d_in(need_input_grad ? is.size() : 0, 0.0);
    const std::size_t plane_out = os.height * os.width;
    for (std::size_t o = 0; o < os.channels; ++o) {
      const double* dp = d_act.data() + o * plane_out;
      double bsum = 0.0;
      for (std::size_t i = 0; i < plane_out; ++i) bsum += dp[i];
      gb[o] += bsum;
      for (std::size_t c = 0; c < is.channels; ++c) {
        const Real* plane = in.data() + c * is.height * is.width;
        const std::size_t kbase = ((o * is.channels + c) * k) * k;
        for (std::size_t ky = 0; ky < k; ++ky) {
          for (std::size_t kx = 0; kx < k; ++kx) {
            double acc = 0.0;
            const double wv = w[kbase + ky * k + kx];
            for (std::size_t y = 0; y < os.height; ++y) {
              const Real* src = plane + (y + ky) * is.width + kx;
              const double* dr = dp + y * os.width;
              for (std::size_t x = 0; x < os.width; ++x) acc += dr[x] * src[x];
              if (need_input_grad) {
                double* dst = d_in.data() + c * is.height * is.width + (y + ky) * is.width + kx;
                for (std::size_t x = 0; x < os.width; ++x) dst[x] += wv * dr[x];
              }
            }
            gw[kbase + ky * k + kx] += acc;
          }
        }
      }
    }
    if (l == 0) {
      if (d_input) d_input->assign(d_in.begin(), d_in.end());
    } else {
      delta = std::move(d_in);
    }
  }
}

// ---------------------------------------------------------------------------
// Losses and optimisation

namespace {
template <class Real>
double cross_entropy_impl(std::span<const Real> logits, int label) {
  require(label >= 0 && static_cast<std::size_t>(label) < logits.size(),
          ErrorCode::kInvalidArgument, "cross_entropy: label out of range");
  return logsumexp(logits) - static_cast<double>(logits[static_cast<std::size_t>(label)]);
}
}  // namespace

double cross_entropy(std::span<const float> logits, int label) {
  return cross_entropy_impl(logits, label);
}
double cross_entropy(std::span<const double> logits, int label) {
  return cross_entropy_impl(logits, label);
}

template <class Real>
std::vector<Real> cross_entropy_grad(std::span<const Real> logits, int label) {
  std::vector<double> p = softmax_temp(logits, 1.0);
  p.at(static_cast<std::size_t>(label)) -= 1.0;
  return std::vector<Real>(p.begin(), p.end());
}

void sgd_step(NetParams& params, const Gradients& grads, double lr, double momentum,
              double weight_decay, SgdState& state) {
  if (state.velocity.weights.empty()) state.velocity = Gradients::zeros_like(params.config);
  auto update = [&](Tensor& theta, const std::vector<double>& g, std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double p = theta[i];
      v[i] = momentum * v[i] + g[i] + weight_decay * p;
      theta[i] = static_cast<float>(p - lr * v[i]);
    }
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], grads.weights[l], state.velocity.weights[l]);
    update(params.biases[l], grads.biases[l], state.velocity.biases[l]);
  }
}

double cosine_lr(std::size_t epoch, std::size_t total, double lr0) {
  require(total > 0, ErrorCode::kInvalidArgument, "cosine_lr: total must be positive");
  require(epoch <= total, ErrorCode::kInvalidArgument, "cosine_lr: epoch beyond total");
  return lr0 * 0.5 *
         (1.0 + std::cos(M_PI * static_cast<double>(epoch) / static_cast<double>(total)));
}

Tensor mixup(const Tensor& batch_a, const Tensor& batch_b, double lambda) {
  require(batch_a.shape() == batch_b.shape(), ErrorCode::kShapeMismatch,
          "mixup: shapes " + shape_to_string(batch_a.shape()) + " and " +
              shape_to_string(batch_b.shape()) + " differ");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::kInvalidArgument,
          "mixup: lambda outside [0, 1]");
  Tensor out(batch_a.shape());
  const float la = static_cast<float>(lambda);
  const float lb = static_cast<float>(1.0 - lambda);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = la * batch_a[i] + lb * batch_b[i];
  return out;
}

Tensor gather_images(const Tensor& images, std::span<const std::size_t> indices) {
  Shape shape = images.shape();
  shape[0] = indices.size();
  Tensor out(shape);
  const std::size_t n = images.item_size();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = images.item(indices[i]);
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training loop

TrainResult run_sgd(const LabeledImages& data, const TrainConfig& config, NetParams params,
                    const BatchObjective* objective) {
  require(data.size() > 0, ErrorCode::kInvalidArgument, "train: empty dataset");
  require(data.images.rank() == 4 && data.images.dim(0) == data.size(),
          ErrorCode::kShapeMismatch, "train: images must be N×C×H×W with N labels");
  require(config.batch_size > 0, ErrorCode::kInvalidArgument, "train: batch size must be > 0");
  for (int y : data.labels) {
    require(y >= 0 && static_cast<std::size_t>(y) < params.config.classes,
            ErrorCode::kInvalidArgument, "train: label " + std::to_string(y) + " out of range");
  }

  TrainResult result;
  Rng shuffle_rng = Rng(config.seed).derive(kShuffleStream);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  SgdState state;
  const std::size_t sample = data.images.item_size();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (objective && objective->epoch_begin) objective->epoch_begin(epoch, params);
    const double lr = config.schedule == LrSchedule::kCosine
                          ? cosine_lr(epoch, config.epochs, config.lr0)
                          : config.lr0;
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      const double inv = 1.0 / static_cast<double>(batch.size());

      std::vector<ForwardTrace> traces;
      traces.reserve(batch.size());
      for (std::size_t idx : batch) {
        traces.push_back(forward_one(params, data.images.item(idx).subspan(0, sample), true));
      }

      Gradients grads = Gradients::zeros_like(params.config);
      std::vector<std::vector<float>> d_maps(batch.size());
      double extra = 0.0;
      if (objective && objective->batch_term) {
        extra = objective->batch_term(params, batch, traces, d_maps, grads);
      }
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const int y = data.labels[batch[i]];
        const std::span<const float> logits(traces[i].logits);
        batch_loss += cross_entropy(logits, y);
        std::vector<float> d = cross_entropy_grad(logits, y);
        for (float& x : d) x = static_cast<float>(x * inv);
        backward(params, traces[i], std::span<const float>(d),
                 std::span<const float>(d_maps[i]), grads);
      }
      batch_loss *= inv;
      require(std::isfinite(batch_loss + extra), ErrorCode::kNumeric,
              "train: non-finite loss at epoch " + std::to_string(epoch));
      loss_sum += batch_loss * static_cast<double>(batch.size());
      sgd_step(params, grads, lr, config.momentum, config.weight_decay, state);
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
    if (objective && objective->epoch_end) objective->epoch_end(epoch);
  }
  params.version = fingerprint(params);
  result.params = std::move(params);
  return result;
}

namespace {
std::size_t infer_classes(const LabeledImages& data, const TrainConfig& config) {
  if (config.classes > 0) return config.classes;
  require(!data.labels.empty(), ErrorCode::kInvalidArgument, "train: empty dataset");
  const int hi = *std::max_element(data.labels.begin(), data.labels.end());
  return static_cast<std::size_t>(std::max(hi + 1, 2));
}
}  // namespace

TrainResult train_classifier(const LabeledImages& data, const TrainConfig& config) {
  require(data.size() > 0, ErrorCode::kInvalidArgument, "train: empty dataset");
  require(data.images.rank() == 4, ErrorCode::kShapeMismatch, "train: images must be N×C×H×W");
  const NetConfig net = NetConfig::lenet5(data.images.dim(1), data.images.dim(2),
                                          data.images.dim(3), infer_classes(data, config));
  NetParams init = init_params(net, Rng(config.seed).derive(kInitStream).next_u64());
  return run_sgd(data, config, std::move(init), nullptr);
}

TrainResult train_classifier(const LabeledImages& data, const TrainConfig& config,
                             NetParams init) {
  return run_sgd(data, config, std::move(init), nullptr);
}

// ---------------------------------------------------------------------------
// Explicit instantiations

template BasicForwardTrace<float> forward_one(const BasicNetParams<float>&,
                                              std::span<const float>, bool);
template BasicForwardTrace<double> forward_one(const BasicNetParams<double>&,
                                               std::span<const double>, bool);
template std::vector<BasicForwardTrace<float>> forward(const BasicNetParams<float>&,
                                                       const BasicTensor<float>&, bool);
template std::vector<BasicForwardTrace<double>> forward(const BasicNetParams<double>&,
                                                        const BasicTensor<double>&, bool);
template void backward(const BasicNetParams<float>&, const BasicForwardTrace<float>&,
                       std::span<const float>, std::span<const float>, Gradients&,
                       std::vector<float>*);
template void backward(const BasicNetParams<double>&, const BasicForwardTrace<double>&,
                       std::span<const double>, std::span<const double>, Gradients&,
                       std::vector<double>*);
template std::vector<float> cross_entropy_grad(std::span<const float>, int);
template std::vector<double> cross_entropy_grad(std::span<const double>, int);

}  // namespace semood
