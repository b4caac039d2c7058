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

#include <cmath>
#include <random>
#include <vector>

#include "semood/finetune.hpp"
#include "semood/io.hpp"
#include "semood/synth.hpp"
#include "support.hpp"

using namespace semood;
using semood::testing::normal_vector;
using semood::testing::rel_error;

namespace {

Tensor distinct_batch(std::size_t n, std::size_t item) {
  Tensor t({n, item});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < item; ++k) t.item(i)[k] = static_cast<float>(i * 8 + k * k);
  }
  return t;
}

GmmModel random_gmm(std::mt19937_64& gen, std::size_t components, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.2, 1.0), s(0.5, 2.0);
  std::vector<double> w(components);
  double total = 0.0;
  for (double& x : w) total += (x = u(gen));
  for (double& x : w) x /= total;
  Matrix m(components, dim), v(components, dim);
  m.values = normal_vector(gen, components * dim);
  for (double& x : v.values) x = s(gen);
  return GmmModel(w, m, v);
}

std::vector<FeatureStats> random_stats(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  std::vector<FeatureStats> out(n);
  for (auto& s : out) s.values = normal_vector(gen, dim, 0.0, 1.5);
  return out;
}

/// The trained source model every fine-tuning test starts from.
struct Source {
  LabeledImages data;
  NetParams net;
  Source() {
    SynthBenchConfig cfg;
    cfg.seed = 2;
    const Dataset d = synth_split(cfg, {"train", Role::kTrainId, SplitUse::kTrain,
                                        Generator::kIdGlyphs, 600, {}});
    data = {d.images, d.labels};
    TrainConfig tc;
    tc.epochs = 6;
    tc.lr0 = 0.05;
    tc.seed = 2;
    net = train_classifier(data, tc).params;
  }
};

const Source& source() {
  static const Source s;
  return s;
}

}  // namespace

TEST_CASE("forced midpoint negatives are pair midpoints with a distinct partner") {
  const Tensor batch = distinct_batch(6, 4);
  Rng rng(1);
  const Tensor neg = make_negatives(batch, rng, 1.0, 0.5);
  REQUIRE(neg.shape() == batch.shape());
  for (std::size_t i = 0; i < 6; ++i) {
    std::size_t matches = 0;
    for (std::size_t j = 0; j < 6; ++j) {
      if (j == i) continue;
      bool all = true;
      for (std::size_t k = 0; k < 4; ++k) {
        all = all && neg.item(i)[k] == 0.5f * batch.item(i)[k] + 0.5f * batch.item(j)[k];
      }
      matches += all;
    }
    CHECK(matches == 1);
  }
}

TEST_CASE("forced unit lambda returns the batch") {
  const Tensor batch = distinct_batch(5, 3);
  Rng rng(2);
  CHECK(make_negatives(batch, rng, 1.0, 1.0) == batch);
}

TEST_CASE("negatives are deterministic for a seed and need two samples") {
  const Tensor batch = distinct_batch(8, 5);
  Rng a(3), b(3);
  CHECK(make_negatives(batch, a, 1.0) == make_negatives(batch, b, 1.0));
  Rng c(3);
  CHECK_THROWS_AS(make_negatives(distinct_batch(1, 5), c, 1.0), Error);
}

TEST_CASE("source loss cancels on identical batches") {
  std::mt19937_64 gen(4);
  const GmmModel g = random_gmm(gen, 3, 4);
  const auto stats = random_stats(gen, 6, 4);
  for (SourceLossForm form : {SourceLossForm::kLogDensity, SourceLossForm::kRawDensity}) {
    const SourceLoss l = source_loss(g, stats, stats, form);
    CHECK(l.loss == 0.0);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      for (std::size_t j = 0; j < 4; ++j) CHECK(l.id_grads[i][j] + l.neg_grads[i][j] == 0.0);
    }
  }
}

TEST_CASE("source loss of a unit Gaussian at distance 3") {
  Matrix m(1, 1), v(1, 1);
  v(0, 0) = 1.0;
  const GmmModel g({1.0}, m, v);
  const std::vector<FeatureStats> id{{{0.0}}}, neg{{{3.0}}};
  const SourceLoss l = source_loss(g, id, neg, SourceLossForm::kLogDensity);
  CHECK(l.loss == doctest::Approx(-4.5).epsilon(1e-12));
  CHECK(l.neg_grads[0][0] == doctest::Approx(-3.0));
  CHECK(l.id_grads[0][0] == 0.0);
}

TEST_CASE("source loss gradients match finite differences") {
  std::mt19937_64 gen(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const GmmModel g = random_gmm(gen, 3, 4);
    std::vector<FeatureStats> id = random_stats(gen, 3, 4), neg = random_stats(gen, 4, 4);
    for (SourceLossForm form : {SourceLossForm::kLogDensity, SourceLossForm::kRawDensity}) {
      const SourceLoss l = source_loss(g, id, neg, form);
      // The raw form divides by exp(batch max) held fixed, a constant factor.
      double shift = -INFINITY;
      for (const auto& s : id) shift = std::max(shift, gmm_log_density(g, s.values));
      for (const auto& s : neg) shift = std::max(shift, gmm_log_density(g, s.values));
      auto objective = [&] {
        double a = 0.0, b = 0.0;
        for (const auto& s : id) {
          const double lp = gmm_log_density(g, s.values);
          a += form == SourceLossForm::kLogDensity ? lp : std::exp(lp - shift);
        }
        for (const auto& s : neg) {
          const double lp = gmm_log_density(g, s.values);
          b += form == SourceLossForm::kLogDensity ? lp : std::exp(lp - shift);
        }
        return b / static_cast<double>(neg.size()) - a / static_cast<double>(id.size());
      };
      CHECK(objective() == doctest::Approx(l.loss).epsilon(1e-12));
      double worst = 0.0;
      auto sweep = [&](std::vector<FeatureStats>& batch, const std::vector<std::vector<double>>& grads) {
        for (std::size_t i = 0; i < batch.size(); ++i) {
          for (std::size_t j = 0; j < 4; ++j) {
            double& x = batch[i].values[j];
            const double keep = x;
            x = keep + h;
            const double up = objective();
            x = keep - h;
            const double down = objective();
            x = keep;
            worst = std::max(worst, rel_error(grads[i][j], (up - down) / (2 * h), 1e-7));
          }
        }
      };
      sweep(id, l.id_grads);
      sweep(neg, l.neg_grads);
      CHECK(worst < 1e-4);
    }
  }
}

TEST_CASE("source loss rejects mismatched statistics") {
  std::mt19937_64 gen(6);
  const GmmModel g = random_gmm(gen, 2, 3);
  CHECK_THROWS_AS(source_loss(g, random_stats(gen, 2, 4), random_stats(gen, 2, 3),
                              SourceLossForm::kLogDensity),
                  Error);
}

TEST_CASE("zero source weight is plain fine-tuning of the classifier") {
  const Source& s = source();
  FinetuneConfig fc;
  fc.epochs = 2;
  fc.src_weight = 0.0;
  fc.seed = 9;
  const FinetuneResult r = finetune(s.net, s.data, fc);
  TrainConfig tc;
  tc.epochs = 2;
  tc.lr0 = 0.005;
  tc.seed = 9;
  const TrainResult plain = train_classifier(s.data, tc, s.net);
  CHECK(r.params == plain.params);
  CHECK(encode_model({{r.params, {}, {}, {}, 1.0}, {}}) ==
        encode_model({{plain.params, {}, {}, {}, 1.0}, {}}));
}

TEST_CASE("fine-tuning needs at least one epoch") {
  FinetuneConfig fc;
  fc.epochs = 0;
  CHECK_THROWS_AS(finetune(source().net, source().data, fc), Error);
}

TEST_CASE("fine-tuning pulls ID statistics together and pushes negatives away") {
  const Source& s = source();
  FinetuneConfig fc;
  fc.seed = 2;
  fc.src_grad_clip = 0.01;
  const FinetuneResult r = finetune(s.net, s.data, fc);
  REQUIRE(r.report.epochs.size() == 10);
  for (const FinetuneEpoch& e : r.report.epochs) {
    CHECK(std::isfinite(e.cls_loss));
    CHECK(std::isfinite(e.src_loss));
  }
  const FinetuneEpoch& first = r.report.epochs.front();
  const FinetuneEpoch& last = r.report.epochs.back();
  MESSAGE("id log p(x_n) " << first.id_log_density << " -> " << last.id_log_density
                           << ", negatives " << first.neg_log_density << " -> "
                           << last.neg_log_density);
  CHECK(last.id_log_density > first.id_log_density);
  CHECK(last.neg_log_density < first.neg_log_density);
  const SourceGap before = measure_source_gap(s.net, s.data, 2);
  const SourceGap after = measure_source_gap(r.params, s.data, 2);
  CHECK(after.gap() > before.gap());
}

TEST_CASE("refit after fine-tuning uses only the source set and records the net") {
  const Source& s = source();
  SemOptions opt;
  opt.gmm.seed = 4;
  const SemModel a = refit_after_finetune(s.net, s.data, opt);
  const SemModel b = refit_after_finetune(s.net, s.data, opt);
  CHECK(a.meta.net_version == s.net.version);
  CHECK(a.meta.net_version == fingerprint(s.net));
  ModelFile fa, fb;
  fa.bundle.sem = a;
  fb.bundle.sem = b;
  CHECK(encode_model(fa) == encode_model(fb));
  const Features f = extract_features(s.net, s.data.images);
  opt.net_version = s.net.version;
  CHECK(a == fit_sem(f.penult, f.low_stats, s.data.labels, opt));
}
