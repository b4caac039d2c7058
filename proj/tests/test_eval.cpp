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
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "semood/eval.hpp"
#include "semood/synth.hpp"
#include "support.hpp"

using namespace semood;
using semood::testing::oracle_aupr;
using semood::testing::oracle_auroc;
using semood::testing::oracle_fpr;

namespace {

using V = std::vector<double>;

/// Scores on a coarse grid so ties are frequent.
V tied_scores(std::mt19937_64& gen, std::size_t n, double shift) {
  std::normal_distribution<double> d(shift, 1.0);
  V v(n);
  for (double& x : v) x = std::round(d(gen) * 4.0) / 4.0;
  return v;
}

}  // namespace

TEST_CASE("fpr_at_tpr examples") {
  V id(20);
  std::iota(id.begin(), id.end(), 1.0);
  CHECK(fpr_at_tpr(id, V{0, 1.5, 3}) == doctest::Approx(1.0 / 3.0));
  CHECK(oracle_fpr(id, V{0, 1.5, 3}, 0.95) == doctest::Approx(1.0 / 3.0));
  CHECK(fpr_at_tpr(V{5, 6, 7}, V{1, 2, 3}) == 0.0);
  CHECK(fpr_at_tpr(V(10, 2.0), V(7, 2.0)) == 1.0);
  CHECK_THROWS_AS(fpr_at_tpr(V{}, V{1}), Error);
  CHECK_THROWS_AS(fpr_at_tpr(V{1}, V{}), Error);
}

TEST_CASE("fpr_at_tpr on identical large distributions sits near 1 - level") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> d(0.0, 1.0);
  V a(20000), b(20000);
  for (double& x : a) x = d(gen);
  for (double& x : b) x = d(gen);
  CHECK(fpr_at_tpr(a, b) == doctest::Approx(0.95).epsilon(0.02));
}

TEST_CASE("auroc examples") {
  CHECK(auroc(V{0.9, 0.8}, V{0.1, 0.2}) == 1.0);
  CHECK(auroc(V{0.8, 0.2}, V{0.6, 0.4}) == 0.5);
  CHECK(auroc(V(5, 0.3), V(8, 0.3)) == 0.5);
  CHECK_THROWS_AS(auroc(V{}, V{1}), Error);
}

TEST_CASE("aupr examples") {
  CHECK(aupr(V{0.9}, V{0.1}) == 1.0);
  CHECK(aupr(V{0.5}, V{0.5}) == 0.5);
  CHECK(aupr(V(3, 0.5), V(5, 0.5)) == doctest::Approx(3.0 / 8.0));
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  V id(50), ood(50);
  for (double& x : id) x = u(gen);
  for (double& x : ood) x = u(gen);
  CHECK(std::abs(aupr(id, ood) - oracle_aupr(id, ood)) <= 1e-9);
  CHECK_THROWS_AS(aupr(V{1}, V{}), Error);
}

TEST_CASE("metrics match brute-force oracles on random tied instances") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 300, m = 1 + gen() % 300;
    const V id = tied_scores(gen, n, 0.7), ood = tied_scores(gen, m, 0.0);
    CHECK(std::abs(auroc(id, ood) - oracle_auroc(id, ood)) <= 1e-9);
    CHECK(std::abs(aupr(id, ood) - oracle_aupr(id, ood)) <= 1e-9);
    for (double level : {0.5, 0.9, 0.95, 1.0}) {
      CHECK(std::abs(fpr_at_tpr(id, ood, level) - oracle_fpr(id, ood, level)) <= 1e-9);
    }
  }
}

TEST_CASE("metric symmetries") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const V id = tied_scores(gen, 40 + trial, 0.5), ood = tied_scores(gen, 30 + trial, 0.0);
    CHECK(auroc(id, ood) + auroc(ood, id) == doctest::Approx(1.0).epsilon(1e-12));
    V nid = id, nood = ood, sid = id, sood = ood;
    for (double& x : nid) x = -x;
    for (double& x : nood) x = -x;
    for (double& x : sid) x += 0.5;
    for (double& x : sood) x += 0.5;
    CHECK(auroc(nid, nood) == doctest::Approx(1.0 - auroc(id, ood)).epsilon(1e-12));
    CHECK(auroc(sid, sood) == auroc(id, ood));
    CHECK(aupr(sid, sood) == aupr(id, ood));
    CHECK(fpr_at_tpr(sid, sood) == fpr_at_tpr(id, ood));
    double prev = fpr_at_tpr(id, ood, 1.0);
    for (double level = 0.99; level > 0.0; level -= 0.01) {
      const double f = fpr_at_tpr(id, ood, level);
      CHECK(f <= prev);
      prev = f;
    }
  }
}

TEST_CASE("classic policy with one OOD set reduces to three metrics") {
  const std::vector<ScoreSet> sets{{"id", Role::kTrainId, "k", {0.9, 0.8, 0.7, 0.2}},
                                   {"csid", Role::kCsid, "k", {0.1, 0.15}},
                                   {"near", Role::kNearOod, "k", {0.3, 0.1}}};
  const EvalReport r = evaluate_benchmark(sets, IdPolicy::kClassic);
  const MetricRow* row = r.find("near", "k");
  REQUIRE(row != nullptr);
  CHECK(row->type == RowType::kDataset);
  CHECK(row->auroc == auroc(sets[0].scores, sets[2].scores));
  CHECK(row->aupr == aupr(sets[0].scores, sets[2].scores));
  CHECK(row->fpr95 == fpr_at_tpr(sets[0].scores, sets[2].scores));
  const MetricRow* mean = r.find(kNearMeanName, "k");
  REQUIRE(mean != nullptr);
  CHECK(mean->auroc == row->auroc);
  CHECK(r.find(kFarMeanName, "k") == nullptr);
  // The csid contrast row is train_id against csid.
  const MetricRow* contrast = r.find("csid", "k");
  REQUIRE(contrast != nullptr);
  CHECK(contrast->type == RowType::kCsid);
  CHECK(contrast->auroc == auroc(sets[0].scores, sets[1].scores));
}

TEST_CASE("full spectrum pools csid into the positives") {
  const std::vector<ScoreSet> sets{{"id", Role::kTrainId, "k", {0.9, 0.8, 0.7}},
                                   {"csid", Role::kCsid, "k", {0.1, 0.15}},
                                   {"far", Role::kFarOod, "k", {0.3, 0.12}}};
  const EvalReport r = evaluate_benchmark(sets);
  CHECK(r.policy == IdPolicy::kFullSpectrum);
  const V pos{0.9, 0.8, 0.7, 0.1, 0.15};
  CHECK(r.find("far", "k")->auroc == auroc(pos, sets[2].scores));
}

// AUROC and FPR95 depend only on the score distributions, so they agree with
// the classic policy; AUPR also depends on the positive/negative ratio, which
// doubles here, so it is checked against the oracle on the pooled positives.
TEST_CASE("csid identical to train_id leaves the rank metrics unchanged") {
  std::mt19937_64 gen(5);
  const V id = tied_scores(gen, 200, 1.0);
  const std::vector<ScoreSet> sets{{"id", Role::kTrainId, "k", id},
                                   {"csid", Role::kCsid, "k", id},
                                   {"near", Role::kNearOod, "k", tied_scores(gen, 150, 0.0)},
                                   {"far", Role::kFarOod, "k", tied_scores(gen, 150, -1.0)}};
  const EvalReport full = evaluate_benchmark(sets, IdPolicy::kFullSpectrum);
  const EvalReport classic = evaluate_benchmark(sets, IdPolicy::kClassic);
  for (const char* name : {"near", "far"}) {
    CHECK(full.find(name, "k")->auroc == doctest::Approx(classic.find(name, "k")->auroc).epsilon(1e-12));
    CHECK(full.find(name, "k")->fpr95 == classic.find(name, "k")->fpr95);
  }
  V pooled = id;
  pooled.insert(pooled.end(), id.begin(), id.end());
  CHECK(std::abs(full.find("near", "k")->aupr - oracle_aupr(pooled, sets[2].scores)) <= 1e-9);
}

TEST_CASE("group means recompute exactly from the rows") {
  std::mt19937_64 gen(6);
  std::vector<ScoreSet> sets{{"id", Role::kTrainId, "a", tied_scores(gen, 100, 1.0)},
                             {"id", Role::kTrainId, "b", tied_scores(gen, 100, 1.0)}};
  for (const char* kind : {"a", "b"}) {
    sets.push_back({"n1", Role::kNearOod, kind, tied_scores(gen, 80, 0.3)});
    sets.push_back({"n2", Role::kNearOod, kind, tied_scores(gen, 90, 0.1)});
    sets.push_back({"n3", Role::kNearOod, kind, tied_scores(gen, 70, 0.5)});
    sets.push_back({"f1", Role::kFarOod, kind, tied_scores(gen, 60, -2.0)});
  }
  const EvalReport r = evaluate_benchmark(sets);
  for (const char* kind : {"a", "b"}) {
    double auc = 0.0, pr = 0.0, fpr = 0.0;
    for (const char* n : {"n1", "n2", "n3"}) {
      auc += r.find(n, kind)->auroc;
      pr += r.find(n, kind)->aupr;
      fpr += r.find(n, kind)->fpr95;
    }
    const MetricRow* mean = r.find(kNearMeanName, kind);
    CHECK(mean->auroc == auc / 3.0);
    CHECK(mean->aupr == pr / 3.0);
    CHECK(mean->fpr95 == fpr / 3.0);
    CHECK(r.find(kFarMeanName, kind)->auroc == r.find("f1", kind)->auroc);
  }
  for (const MetricRow& row : r.rows) {
    CHECK_UNARY(row.fpr95 >= 0.0 && row.fpr95 <= 1.0);
    CHECK_UNARY(row.auroc >= 0.0 && row.auroc <= 1.0);
    CHECK_UNARY(row.aupr >= 0.0 && row.aupr <= 1.0);
  }
}

TEST_CASE("evaluate_benchmark needs exactly one train_id set per kind") {
  const std::vector<ScoreSet> none{{"near", Role::kNearOod, "k", {0.1}}};
  CHECK_THROWS_AS(evaluate_benchmark(none), Error);
  const std::vector<ScoreSet> two{{"a", Role::kTrainId, "k", {0.1}},
                                  {"b", Role::kTrainId, "k", {0.1}},
                                  {"near", Role::kNearOod, "k", {0.1}}};
  CHECK_THROWS_AS(evaluate_benchmark(two), Error);
}

TEST_CASE("synthetic benchmark is deterministic and well formed") {
  SynthBenchConfig cfg;
  cfg.seed = 3;
  for (auto& s : cfg.splits) s.count = s.count / 10;
  const auto a = synth_benchmark(cfg);
  const auto b = synth_benchmark(cfg);
  REQUIRE(a.size() == cfg.splits.size());
  std::set<Role> roles;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].images == b[i].images);
    CHECK(a[i].labels == b[i].labels);
    CHECK(a[i].images.shape() == Shape{cfg.splits[i].count, 1, 16, 16});
    for (float v : a[i].images.storage()) CHECK_UNARY(v >= 0.0f && v <= 1.0f);
    const bool labelled = cfg.splits[i].generator == Generator::kIdGlyphs;
    CHECK(a[i].labels.size() == (labelled ? cfg.splits[i].count : 0));
    for (int l : a[i].labels) CHECK_UNARY(l >= 0 && l < 4);
    roles.insert(a[i].role);
  }
  CHECK(roles.size() == 4);
  cfg.seed = 4;
  CHECK(!(synth_benchmark(cfg)[0].images == a[0].images));
}

TEST_CASE("csid with zero-strength knobs follows the test_id generator path") {
  SynthBenchConfig cfg;
  const SynthSplit test_id{"test_id", Role::kTrainId, SplitUse::kTest, Generator::kIdGlyphs, 50, {}};
  const SynthSplit csid{"csid_zero", Role::kCsid, SplitUse::kTest, Generator::kIdGlyphs, 50,
                        {0.0, 1.0, 0.0}};
  const std::uint64_t stream = split_stream_seed(cfg.seed, "test_id");
  const Dataset a = synth_split_with_stream(cfg, test_id, stream);
  const Dataset b = synth_split_with_stream(cfg, csid, stream);
  CHECK(a.images == b.images);
  CHECK(a.labels == b.labels);
  CHECK(synth_split(cfg, test_id).images == a.images);
}

TEST_CASE("covariate knobs change pixels but not labels") {
  SynthBenchConfig cfg;
  const SynthSplit clean{"x", Role::kTrainId, SplitUse::kTest, Generator::kIdGlyphs, 30, {}};
  SynthSplit shifted = clean;
  shifted.shift = {0.0, 0.5, 0.35};
  const std::uint64_t stream = split_stream_seed(cfg.seed, "x");
  const Dataset a = synth_split_with_stream(cfg, clean, stream);
  const Dataset b = synth_split_with_stream(cfg, shifted, stream);
  CHECK(a.labels == b.labels);
  CHECK(!(a.images == b.images));
}

TEST_CASE("synthetic benchmark rejects fewer than two classes") {
  SynthBenchConfig cfg;
  cfg.classes = 1;
  CHECK_THROWS_AS(synth_benchmark(cfg), Error);
  cfg.classes = kMaxSynthClasses + 1;
  CHECK_THROWS_AS(synth_benchmark(cfg), Error);
}

TEST_CASE("roles and policies parse") {
  for (Role r : {Role::kTrainId, Role::kCsid, Role::kNearOod, Role::kFarOod}) {
    CHECK(parse_role(to_string(r)) == r);
  }
  CHECK(parse_id_policy("classic") == IdPolicy::kClassic);
  CHECK(parse_id_policy("full_spectrum") == IdPolicy::kFullSpectrum);
  CHECK(!parse_id_policy("other").has_value());
}
