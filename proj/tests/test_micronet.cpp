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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "semood/micronet.hpp"
#include "semood/numerics.hpp"
#include "support.hpp"

using namespace semood;
using semood::testing::normal_vector;
using semood::testing::rel_error;

namespace {

/// 154 parameters: conv 2@3x3, conv 3@3x3, FC 6, FC 5, 3 classes on 10x10.
NetConfig tiny_config() {
  NetConfig c;
  c.in_channels = 1;
  c.height = 10;
  c.width = 10;
  c.convs = {{2, 3}, {3, 3}};
  c.pool = 2;
  c.hidden = {6, 5};
  c.classes = 3;
  return c;
}

Tensor random_images(std::mt19937_64& gen, std::size_t n, const NetConfig& c) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor t({n, c.in_channels, c.height, c.width});
  for (float& x : t.storage()) x = u(gen);
  return t;
}

/// Two-class images: class 0 lights the left half, class 1 the right half.
LabeledImages separable_set(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> noise(0.0f, 0.3f);
  LabeledImages d{Tensor({n, 1, 16, 16}), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    d.labels[i] = label;
    auto img = d.images.item(i);
    for (std::size_t y = 0; y < 16; ++y) {
      for (std::size_t x = 0; x < 16; ++x) {
        const bool lit = (x < 8) == (label == 0);
        img[y * 16 + x] = noise(gen) + (lit ? 0.7f : 0.0f);
      }
    }
  }
  return d;
}

/// L = Σ c·logits + Σ d·first_maps.
double probe_loss(const NetParams64& p, std::span<const double> image, std::span<const double> c,
                  std::span<const double> d) {
  const auto t = forward_one(p, image, false);
  double l = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) l += c[i] * t.logits[i];
  for (std::size_t i = 0; i < d.size(); ++i) l += d[i] * t.first_maps[i];
  return l;
}

}  // namespace

TEST_CASE("default config is the LeNet-5 layout with an 84-dim penultimate layer") {
  const NetConfig c = NetConfig::lenet5(1, 16, 16, 4);
  CHECK(c.convs == std::vector<ConvSpec>{{6, 5}, {16, 5}});
  CHECK(c.hidden == std::vector<std::size_t>{120, 84});
  CHECK(c.penult_dim() == 84);
  CHECK(c.conv_output(0).channels == 6);
  CHECK(c.conv_output(0).height == 12);
}

TEST_CASE("zero network gives zero logits and a uniform softmax") {
  NetParams p = init_params(NetConfig::lenet5(1, 16, 16, 4), 1);
  for (auto& w : p.weights) std::fill(w.storage().begin(), w.storage().end(), 0.0f);
  for (auto& b : p.biases) std::fill(b.storage().begin(), b.storage().end(), 0.0f);
  std::mt19937_64 gen(1);
  const auto traces = forward(p, random_images(gen, 3, p.config));
  for (const auto& t : traces) {
    for (float l : t.logits) CHECK(l == 0.0f);
    for (double q : softmax_temp(std::span<const float>(t.logits), 1.0)) CHECK(q == 0.25);
  }
}

TEST_CASE("forward is deterministic and exposes nonnegative first maps") {
  const NetParams p = init_params(NetConfig::lenet5(1, 16, 16, 4), 5);
  std::mt19937_64 gen(2);
  const Tensor x = random_images(gen, 4, p.config);
  const auto a = forward(p, x);
  const auto b = forward(init_params(NetConfig::lenet5(1, 16, 16, 4), 5), x);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].logits == b[i].logits);
    CHECK(a[i].penult.size() == 84);
    CHECK(a[i].first_maps.shape() == Shape{6, 12, 12});
    for (float v : a[i].first_maps.storage()) CHECK(v >= 0.0f);
  }
}

TEST_CASE("forward is equivariant to batch permutation") {
  const NetParams p = init_params(NetConfig::lenet5(1, 16, 16, 3), 8);
  std::mt19937_64 gen(4);
  const Tensor x = random_images(gen, 5, p.config);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  const auto a = forward(p, x);
  const auto b = forward(p, gather_images(x, perm));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(b[i].logits == a[perm[i]].logits);
    CHECK(b[i].penult == a[perm[i]].penult);
    CHECK(b[i].first_maps == a[perm[i]].first_maps);
  }
}

TEST_CASE("forward names the mismatching dimension") {
  const NetParams p = init_params(NetConfig::lenet5(1, 16, 16, 3), 8);
  CHECK_THROWS_WITH_AS(forward(p, Tensor({2, 1, 16, 15})), doctest::Contains("width"), Error);
  CHECK_THROWS_WITH_AS(forward(p, Tensor({2, 2, 16, 16})), doctest::Contains("channel"), Error);
}

TEST_CASE("zero upstream gradients give zero parameter gradients") {
  const NetParams p = init_params(tiny_config(), 3);
  std::mt19937_64 gen(5);
  const Tensor x = random_images(gen, 1, p.config);
  const auto t = forward_one(p, x.item(0), true);
  const std::vector<float> dl(3, 0.0f);
  const std::vector<float> dm(t.first_maps.size(), 0.0f);
  CHECK(backward(p, t, std::span<const float>(dl), std::span<const float>(dm)).max_abs() == 0.0);
}

TEST_CASE("backward requires the forward cache") {
  const NetParams p = init_params(tiny_config(), 3);
  std::mt19937_64 gen(5);
  const Tensor x = random_images(gen, 1, p.config);
  const auto t = forward_one(p, x.item(0), false);
  const std::vector<float> dl(3, 1.0f);
  CHECK_THROWS_AS(backward(p, t, std::span<const float>(dl), std::span<const float>()), Error);
}

TEST_CASE("backprop matches central finite differences on every parameter") {
  const NetConfig cfg = tiny_config();
  REQUIRE(init_params(cfg, 0).parameter_count() <= 500);
  std::mt19937_64 gen(17);
  const double h = 1e-3;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    NetParams64 p = convert_params<double>(init_params(cfg, seed + 11));
    const std::vector<double> image = normal_vector(gen, 100, 0.5, 0.5);
    const std::vector<double> c = normal_vector(gen, cfg.classes);
    const auto trace = forward_one(p, std::span<const double>(image), true);
    const std::vector<double> d = normal_vector(gen, trace.first_maps.size());
    Gradients g = Gradients::zeros_like(cfg);
    std::vector<double> d_input;
    backward(p, trace, std::span<const double>(c), std::span<const double>(d), g, &d_input);

    double worst = 0.0;
    auto check_entry = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = probe_loss(p, image, c, d);
      param = keep - h;
      const double down = probe_loss(p, image, c, d);
      param = keep;
      worst = std::max(worst, rel_error(analytic, (up - down) / (2 * h), 1e-6));
    };
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      for (std::size_t k = 0; k < p.weights[l].size(); ++k) check_entry(p.weights[l][k], g.weights[l][k]);
      for (std::size_t k = 0; k < p.biases[l].size(); ++k) check_entry(p.biases[l][k], g.biases[l][k]);
    }
    std::vector<double> img = image;
    for (std::size_t k = 0; k < img.size(); ++k) {
      const double keep = img[k];
      img[k] = keep + h;
      const double up = probe_loss(p, img, c, d);
      img[k] = keep - h;
      const double down = probe_loss(p, img, c, d);
      img[k] = keep;
      worst = std::max(worst, rel_error(d_input[k], (up - down) / (2 * h), 1e-6));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("cross-entropy gradient vanishes at a saturated correct class") {
  const std::vector<double> logits{200.0, 0.0, -5.0};
  CHECK(cross_entropy(std::span<const double>(logits), 0) == doctest::Approx(0.0));
  for (double g : cross_entropy_grad(std::span<const double>(logits), 0)) {
    CHECK(std::abs(g) < 1e-12);
  }
  const std::vector<double> flat{0.0, 0.0};
  CHECK(cross_entropy(std::span<const double>(flat), 1) == doctest::Approx(std::log(2.0)));
}

namespace {

NetParams filled(float value) {
  NetParams p = init_params(tiny_config(), 0);
  for (auto& w : p.weights) std::fill(w.storage().begin(), w.storage().end(), value);
  for (auto& b : p.biases) std::fill(b.storage().begin(), b.storage().end(), value);
  return p;
}

Gradients filled_grads(double value) {
  Gradients g = Gradients::zeros_like(tiny_config());
  for (auto& w : g.weights) std::fill(w.begin(), w.end(), value);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), value);
  return g;
}

}  // namespace

TEST_CASE("sgd_step with zero learning rate leaves parameters unchanged") {
  NetParams p = filled(1.0f);
  const NetParams before = p;
  SgdState s;
  sgd_step(p, filled_grads(0.5), 0.0, 0.9, 5e-4, s);
  CHECK(p.weights == before.weights);
  CHECK(p.biases == before.biases);
}

TEST_CASE("sgd_step plain step") {
  NetParams p = filled(1.0f);
  SgdState s;
  sgd_step(p, filled_grads(0.5), 0.1, 0.0, 0.0, s);
  for (const auto& w : p.weights) {
    for (float v : w.storage()) CHECK(v == doctest::Approx(0.95));
  }
}

TEST_CASE("sgd_step momentum accumulates 1.9x on the second identical step") {
  NetParams p = filled(1.0f);
  SgdState s;
  sgd_step(p, filled_grads(0.5), 0.1, 0.9, 0.0, s);
  const float after_first = p.weights[0][0];
  sgd_step(p, filled_grads(0.5), 0.1, 0.9, 0.0, s);
  const double first = 1.0 - after_first;
  const double second = after_first - p.weights[0][0];
  CHECK(first == doctest::Approx(0.05));
  CHECK(second / first == doctest::Approx(1.9).epsilon(1e-5));
}

TEST_CASE("sgd_step applies weight decay inside the velocity") {
  NetParams p = filled(2.0f);
  SgdState s;
  sgd_step(p, filled_grads(0.0), 0.5, 0.0, 0.1, s);
  CHECK(p.weights[0][0] == doctest::Approx(2.0 - 0.5 * 0.1 * 2.0));
}

TEST_CASE("cosine_lr") {
  CHECK(cosine_lr(0, 10, 0.1) == doctest::Approx(0.1));
  CHECK(cosine_lr(10, 10, 0.1) == doctest::Approx(0.0));
  CHECK(cosine_lr(5, 10, 0.1) == doctest::Approx(0.05));
  for (std::size_t e = 1; e <= 37; ++e) CHECK(cosine_lr(e, 37, 1.0) <= cosine_lr(e - 1, 37, 1.0));
  CHECK_THROWS_AS(cosine_lr(0, 0, 0.1), Error);
  CHECK_THROWS_AS(cosine_lr(11, 10, 0.1), Error);
}

TEST_CASE("mixup examples and symmetry") {
  std::mt19937_64 gen(6);
  const Tensor a = random_images(gen, 3, tiny_config());
  const Tensor b = random_images(gen, 3, tiny_config());
  CHECK(mixup(a, b, 1.0) == a);
  CHECK(mixup(Tensor({2, 2}, {0, 0, 0, 0}), Tensor({2, 2}, {2, 2, 2, 2}), 0.5) ==
        Tensor({2, 2}, {1, 1, 1, 1}));
  CHECK(mixup(Tensor({1}, {10}), Tensor({1}, {0}), 0.3)[0] == doctest::Approx(3.0));
  for (double lambda : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    CHECK(mixup(a, b, lambda) == mixup(b, a, 1.0 - lambda));
  }
  CHECK_THROWS_AS(mixup(a, Tensor({2, 1, 10, 10}), 0.5), Error);
  CHECK_THROWS_AS(mixup(a, b, 1.5), Error);
}

TEST_CASE("training reaches full accuracy on a separable two-class set") {
  const LabeledImages train = separable_set(200, 1);
  TrainConfig tc;
  tc.epochs = 20;
  tc.seed = 3;
  const TrainResult r = train_classifier(train, tc);
  REQUIRE(r.epoch_loss.size() == 20);
  for (double l : r.epoch_loss) CHECK(std::isfinite(l));
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  std::size_t correct = 0;
  const auto traces = forward(r.params, train.images);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& l = traces[i].logits;
    correct += (std::max_element(l.begin(), l.end()) - l.begin()) == train.labels[i];
  }
  CHECK(static_cast<double>(correct) / 200.0 >= 0.99);
}

TEST_CASE("zero learning rate keeps the initialization") {
  const LabeledImages train = separable_set(40, 2);
  TrainConfig tc;
  tc.epochs = 1;
  tc.lr0 = 0.0;
  tc.batch_size = 16;
  const NetParams init = init_params(NetConfig::lenet5(1, 16, 16, 2), 99);
  const TrainResult r = train_classifier(train, tc, init);
  CHECK(r.params.weights == init.weights);
  CHECK(r.params.biases == init.biases);
}

TEST_CASE("training is deterministic for a seed") {
  const LabeledImages train = separable_set(60, 3);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 16;
  tc.seed = 21;
  const TrainResult a = train_classifier(train, tc);
  const TrainResult b = train_classifier(train, tc);
  CHECK(a.params == b.params);
  CHECK(a.epoch_loss == b.epoch_loss);
  tc.seed = 22;
  CHECK(!(train_classifier(train, tc).params == a.params));
}

TEST_CASE("training rejects an empty dataset") {
  CHECK_THROWS_AS(train_classifier(LabeledImages{Tensor({0, 1, 16, 16}), {}}, TrainConfig{}),
                  Error);
}
