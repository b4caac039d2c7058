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
#include <string>

#include "semood/config.hpp"
#include "semood/io.hpp"
#include "support.hpp"

using namespace semood;
using semood::testing::scratch_dir;

namespace {

const char* kMinimal = R"({
  "seed": 3, "classes": 3, "image_size": 12,
  "datasets": [
    {"name": "train", "role": "train_id", "use": "train", "source": "synth:id_glyphs", "count": 30},
    {"name": "near", "role": "near_ood", "source": "synth:near_glyphs_a", "count": 10}
  ]
})";

void expect_rejected(const std::string& text, const std::string& fragment) {
  CAPTURE(text);
  CHECK_THROWS_WITH_AS(parse_bench_config(text), doctest::Contains(fragment.c_str()), Error);
}

std::string with_dataset(const std::string& entry) {
  return R"({"datasets": [
    {"name": "train", "role": "train_id", "use": "train", "source": "synth:id_glyphs", "count": 30},
    )" + entry + "]}";
}

}  // namespace

TEST_CASE("minimal configs fill in defaults and derive per-stage seeds") {
  const BenchConfig c = parse_bench_config(kMinimal);
  CHECK(c.seed == 3);
  CHECK(c.id_policy == IdPolicy::kFullSpectrum);
  CHECK(c.kinds.size() == 6);
  REQUIRE(c.datasets.size() == 2);
  CHECK(c.datasets[1].use == SplitUse::kTest);
  CHECK(c.train_config().seed == 3);
  CHECK(c.train_config().classes == 3);
  CHECK(c.finetune_config().seed == 3);
  CHECK(c.sem_options().gmm.seed == 3);
  CHECK(c.net_config() == NetConfig::lenet5(1, 12, 12, 3));
  CHECK(c.find("near") != nullptr);
  CHECK(c.find("absent") == nullptr);
}

TEST_CASE("unknown keys are rejected with their path") {
  expect_rejected(R"({"sede": 1, "datasets": []})", "sede: unknown key");
  expect_rejected(R"({"train": {"epoch": 1}, "datasets": []})", "train.epoch: unknown key");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "source": "synth:texture",
                                   "count": 5, "colour": 1})"),
                  "unknown key");
}

TEST_CASE("validation rules") {
  expect_rejected(R"({"classes": 1, "datasets": []})", "classes");
  expect_rejected(R"({"image_size": 4, "datasets": []})", "image_size");
  expect_rejected(R"({"kinds": [], "datasets": []})", "kinds");
  expect_rejected(R"({"kinds": ["sem", "sem"], "datasets": []})", "duplicate score kind");
  expect_rejected(R"({"kinds": ["vim"], "datasets": []})", "unknown score kind");
  expect_rejected(R"({"id_policy": "open", "datasets": []})", "id_policy");
  expect_rejected(R"({"seed": -1, "datasets": []})", "non-negative integer");
  expect_rejected("{}", "datasets");
  expect_rejected(R"({"datasets": [{"name": "a", "role": "near_ood", "source": "synth:texture",
                                    "count": 3}]})",
                  "exactly one train_id split");
  expect_rejected(with_dataset(R"({"name": "train", "role": "far_ood", "source": "synth:texture",
                                   "count": 5})"),
                  "duplicate name");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "use": "train",
                                   "source": "synth:texture", "count": 5})"),
                  "only train_id splits");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "source": "synth:fog",
                                   "count": 5})"),
                  "unknown generator");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "source": "synth:texture"})"),
                  "positive count");
  expect_rejected(with_dataset(R"({"name": "x y", "role": "far_ood", "source": "synth:texture",
                                   "count": 5})"),
                  "name");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "source": "ftp:x"})"),
                  "source");
  expect_rejected(with_dataset(R"({"name": "x", "role": "far_ood", "source": "idx:a.idx",
                                   "shift": {"contrast": 0.5}})"),
                  "shift");
  expect_rejected(R"({"train": {"momentum": 1.0}, "datasets": []})", "train.momentum");
  expect_rejected(R"({"train": {"schedule": "step"}, "datasets": []})", "cosine");
  expect_rejected(R"({"finetune": {"form": "squared"}, "datasets": []})", "finetune.form");
  expect_rejected(R"({"sem": {"projection": "lda"}, "datasets": []})", "sem.projection");
  expect_rejected(R"({"odin": {"grid": []}, "datasets": []})", "odin.grid");
  expect_rejected("{not json", "config");
}

TEST_CASE("overrides merge as a JSON patch and are revalidated") {
  const BenchConfig base = parse_bench_config(kMinimal);
  const BenchConfig c = apply_overrides(base, R"({"seed": 11, "train": {"epochs": 2}})");
  CHECK(c.seed == 11);
  CHECK(c.train.epochs == 2);
  CHECK(c.train.batch_size == base.train.batch_size);
  CHECK(c.datasets == base.datasets);
  CHECK_THROWS_AS(apply_overrides(base, R"({"classes": 1})"), Error);
  CHECK_THROWS_AS(apply_overrides(base, R"({"bogus": 1})"), Error);
  CHECK_THROWS_AS(apply_overrides(base, "[1]"), Error);
}

TEST_CASE("serialised configs parse back to the same configuration") {
  for (const BenchConfig& c : {parse_bench_config(kMinimal), BenchConfig::synthetic_default()}) {
    const std::string text = bench_config_to_json(c);
    CHECK(bench_config_to_json(parse_bench_config(text)) == text);
    CHECK(parse_bench_config(text).datasets == c.datasets);
  }
}

TEST_CASE("the shipped golden config matches the built-in default") {
  const BenchConfig file = load_bench_config(SEMOOD_SOURCE_DIR "/configs/synth_digits.json");
  CHECK(bench_config_to_json(file) == bench_config_to_json(BenchConfig::synthetic_default()));
}

TEST_CASE("synthetic benchmarks write and reload as file datasets") {
  const auto dir = scratch_dir("bench");
  write_file(dir / "cfg.json", kMinimal);
  const Benchmark b = load_benchmark(dir / "cfg.json");
  REQUIRE(b.splits.size() == 2);
  CHECK(b.train_split().spec.name == "train");
  CHECK(b.split("near").size() == 10);
  CHECK(b.val_split(Role::kNearOod) == nullptr);
  CHECK_THROWS_AS(b.split("absent"), Error);
  CHECK(b.train_split().labels.size() == 30);

  write_benchmark(b, dir / "out");
  const Benchmark back = load_benchmark(dir / "out");
  REQUIRE(back.splits.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.splits[i].spec == b.splits[i].spec);
    CHECK(back.splits[i].labels == b.splits[i].labels);
    // Pixels are stored as bytes; synthetic images are already on that grid.
    const auto& x = back.splits[i].images.storage();
    const auto& y = b.splits[i].images.storage();
    REQUIRE(x.size() == y.size());
    float worst = 0.0f;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
    CHECK(worst <= 0.5f / 255.0f);
  }
  const Benchmark patched = load_benchmark(dir / "out", R"({"seed": 8})");
  CHECK(patched.config.seed == 8);
}
