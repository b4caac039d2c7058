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

#include "semood/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "semood/io.hpp"

namespace semood {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "config: " + path + ": " + what);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) bad(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string sub(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

void get_u64(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(sub(path, key), "expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void get_size(const json& j, const std::string& path, const char* key, std::size_t& out,
              std::size_t min_value = 0) {
  std::uint64_t v = out;
  get_u64(j, path, key, v);
  if (v < min_value) bad(sub(path, key), "must be at least " + std::to_string(min_value));
  out = static_cast<std::size_t>(v);
}

void get_double(const json& j, const std::string& path, const char* key, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) bad(sub(path, key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) bad(sub(path, key), "must be finite");
}

void get_string(const json& j, const std::string& path, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string()) bad(sub(path, key), "expected a string");
  out = v.get<std::string>();
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) bad(path, "must be positive");
}
void non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) bad(path, "must be non-negative");
}

LrSchedule parse_schedule(const std::string& s, const std::string& path) {
  if (s == "cosine") return LrSchedule::kCosine;
  if (s == "constant") return LrSchedule::kConstant;
  bad(path, "expected \"cosine\" or \"constant\"");
}
const char* schedule_name(LrSchedule s) { return s == LrSchedule::kCosine ? "cosine" : "constant"; }

void parse_shift(const json& j, const std::string& path, CovariateShift& s) {
  check_keys(j, path, {"noise_sigma", "contrast", "background"});
  get_double(j, path, "noise_sigma", s.noise_sigma);
  get_double(j, path, "contrast", s.contrast);
  get_double(j, path, "background", s.background);
  non_negative(s.noise_sigma, sub(path, "noise_sigma"));
}

void parse_features(const json& j, const std::string& path, FeatureFiles& f) {
  check_keys(j, path, {"logits", "penult", "low_stats"});
  get_string(j, path, "logits", f.logits);
  get_string(j, path, "penult", f.penult);
  get_string(j, path, "low_stats", f.low_stats);
}

bool has_prefix(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

DatasetSpec parse_dataset(const json& j, const std::string& path) {
  check_keys(j, path, {"name", "role", "use", "source", "count", "shift", "labels", "features"});
  DatasetSpec d;
  if (!j.contains("name")) bad(path, "missing \"name\"");
  get_string(j, path, "name", d.name);
  if (d.name.empty() || !std::all_of(d.name.begin(), d.name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
      })) {
    bad(sub(path, "name"), "must be non-empty and use only letters, digits, '_' or '-'");
  }
  if (!j.contains("role")) bad(path, "missing \"role\"");
  std::string role;
  get_string(j, path, "role", role);
  const auto r = parse_role(role);
  if (!r) bad(sub(path, "role"), "expected train_id, csid, near_ood or far_ood");
  d.role = *r;
  std::string use = "test";
  get_string(j, path, "use", use);
  const auto u = parse_split_use(use);
  if (!u) bad(sub(path, "use"), "expected train, test or val");
  d.use = *u;
  if (d.use == SplitUse::kTrain && d.role != Role::kTrainId) {
    bad(sub(path, "use"), "only train_id splits can be used for training");
  }
  get_string(j, path, "source", d.source);
  get_size(j, path, "count", d.count);
  get_string(j, path, "labels", d.labels);
  if (j.contains("features")) parse_features(j.at("features"), sub(path, "features"), d.features);

  if (has_prefix(d.source, "synth:")) {
    if (!parse_generator(d.source.substr(6))) bad(sub(path, "source"), "unknown generator");
    if (d.count == 0) bad(sub(path, "count"), "synthetic splits need a positive count");
    if (!d.labels.empty()) bad(sub(path, "labels"), "synthetic splits carry their own labels");
    if (!d.features.empty()) bad(sub(path, "features"), "not allowed on synthetic splits");
    if (j.contains("shift")) parse_shift(j.at("shift"), sub(path, "shift"), d.shift);
  } else if (has_prefix(d.source, "idx:") || has_prefix(d.source, "tnsr:") || d.source.empty()) {
    if (j.contains("shift")) bad(sub(path, "shift"), "only synthetic splits take a shift");
    if (d.source.empty() && d.features.empty()) {
      bad(sub(path, "source"), "needs a source or precomputed features");
    }
    if (!d.labels.empty() && !has_prefix(d.labels, "idx:") && !has_prefix(d.labels, "tnsr:")) {
      bad(sub(path, "labels"), "expected \"idx:<path>\" or \"tnsr:<path>\"");
    }
  } else {
    bad(sub(path, "source"), "expected \"synth:<generator>\", \"idx:<path>\" or \"tnsr:<path>\"");
  }
  return d;
}

void parse_train(const json& j, TrainConfig& t) {
  const std::string p = "train";
  check_keys(j, p, {"epochs", "batch_size", "lr", "momentum", "weight_decay", "schedule"});
  get_size(j, p, "epochs", t.epochs, 1);
  get_size(j, p, "batch_size", t.batch_size, 1);
  get_double(j, p, "lr", t.lr0);
  get_double(j, p, "momentum", t.momentum);
  get_double(j, p, "weight_decay", t.weight_decay);
  std::string s = schedule_name(t.schedule);
  get_string(j, p, "schedule", s);
  t.schedule = parse_schedule(s, p + ".schedule");
  positive(t.lr0, p + ".lr");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0)) bad(p + ".momentum", "must lie in [0, 1)");
  non_negative(t.weight_decay, p + ".weight_decay");
}

void parse_gmm(const json& j, const std::string& p, GmmOptions& g) {
  check_keys(j, p, {"max_iter", "rel_tol", "variance_floor", "restarts", "init"});
  get_size(j, p, "max_iter", g.max_iter, 1);
  get_double(j, p, "rel_tol", g.rel_tol);
  get_double(j, p, "variance_floor", g.variance_floor);
  get_size(j, p, "restarts", g.restarts, 1);
  std::string init = g.init == GmmInit::kKmeansPlusPlus ? "kmeans++" : "random";
  get_string(j, p, "init", init);
  if (init == "kmeans++") {
    g.init = GmmInit::kKmeansPlusPlus;
  } else if (init == "random") {
    g.init = GmmInit::kRandomPoints;
  } else {
    bad(p + ".init", "expected \"kmeans++\" or \"random\"");
  }
  non_negative(g.rel_tol, p + ".rel_tol");
  positive(g.variance_floor, p + ".variance_floor");
}

void parse_finetune(const json& j, FinetuneConfig& f) {
  const std::string p = "finetune";
  check_keys(j, p, {"epochs", "batch_size", "lr", "momentum", "weight_decay", "schedule",
                    "src_weight", "mixup_alpha", "form", "low_components", "src_grad_clip",
                    "forced_lambda", "gmm"});
  get_size(j, p, "epochs", f.epochs, 1);
  get_size(j, p, "batch_size", f.batch_size, 2);
  get_double(j, p, "lr", f.lr);
  get_double(j, p, "momentum", f.momentum);
  get_double(j, p, "weight_decay", f.weight_decay);
  std::string s = schedule_name(f.schedule);
  get_string(j, p, "schedule", s);
  f.schedule = parse_schedule(s, p + ".schedule");
  get_double(j, p, "src_weight", f.src_weight);
  get_double(j, p, "mixup_alpha", f.mixup_alpha);
  std::string form = f.form == SourceLossForm::kLogDensity ? "log" : "raw";
  get_string(j, p, "form", form);
  if (form == "log") {
    f.form = SourceLossForm::kLogDensity;
  } else if (form == "raw") {
    f.form = SourceLossForm::kRawDensity;
  } else {
    bad(p + ".form", "expected \"log\" or \"raw\"");
  }
  get_size(j, p, "low_components", f.low_components, 1);
  get_double(j, p, "src_grad_clip", f.src_grad_clip);
  if (j.contains("forced_lambda")) {
    if (j.at("forced_lambda").is_null()) {
      f.forced_lambda.reset();
    } else {
      double l = 0.0;
      get_double(j, p, "forced_lambda", l);
      if (!(l >= 0.0 && l <= 1.0)) bad(p + ".forced_lambda", "must lie in [0, 1]");
      f.forced_lambda = l;
    }
  }
  if (j.contains("gmm")) parse_gmm(j.at("gmm"), p + ".gmm", f.gmm);
  positive(f.lr, p + ".lr");
  if (!(f.momentum >= 0.0 && f.momentum < 1.0)) bad(p + ".momentum", "must lie in [0, 1)");
  non_negative(f.weight_decay, p + ".weight_decay");
  non_negative(f.src_weight, p + ".src_weight");
  positive(f.mixup_alpha, p + ".mixup_alpha");
  non_negative(f.src_grad_clip, p + ".src_grad_clip");
}

void parse_sem(const json& j, SemOptions& s) {
  const std::string p = "sem";
  check_keys(j, p, {"low_components", "top_components", "max_dim", "projection", "gmm"});
  get_size(j, p, "low_components", s.low_components, 1);
  get_size(j, p, "top_components", s.top_components);
  get_size(j, p, "max_dim", s.max_dim, 1);
  std::string proj = s.projection == ProjectionKind::kPca ? "pca" : "within_class";
  get_string(j, p, "projection", proj);
  if (proj == "within_class") {
    s.projection = ProjectionKind::kWithinClass;
  } else if (proj == "pca") {
    s.projection = ProjectionKind::kPca;
  } else {
    bad(p + ".projection", "expected \"within_class\" or \"pca\"");
  }
  if (j.contains("gmm")) parse_gmm(j.at("gmm"), p + ".gmm", s.gmm);
}

void parse_odin(const json& j, OdinSettings& o) {
  const std::string p = "odin";
  check_keys(j, p, {"temperature", "grid"});
  get_double(j, p, "temperature", o.temperature);
  positive(o.temperature, p + ".temperature");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_array() || g.empty()) bad(p + ".grid", "expected a non-empty array of numbers");
    o.grid.clear();
    for (const json& v : g) {
      if (!v.is_number()) bad(p + ".grid", "expected a non-empty array of numbers");
      o.grid.push_back(v.get<double>());
      non_negative(o.grid.back(), p + ".grid");
    }
  }
}

void validate(const BenchConfig& c) {
  if (c.classes < 2) bad("classes", "must be at least 2");
  if (c.image_size < 8) bad("image_size", "must be at least 8");
  if (c.kinds.empty()) bad("kinds", "must name at least one score kind");
  if (c.datasets.empty()) bad("datasets", "must list at least one dataset");
  std::set<std::string> names;
  std::size_t train = 0;
  bool synthetic = false;
  for (const DatasetSpec& d : c.datasets) {
    if (!names.insert(d.name).second) bad("datasets", "duplicate name \"" + d.name + "\"");
    train += d.role == Role::kTrainId && d.use == SplitUse::kTrain;
    synthetic = synthetic || has_prefix(d.source, "synth:");
  }
  if (train != 1) bad("datasets", "exactly one train_id split must have use \"train\"");
  if (synthetic && c.classes > kMaxSynthClasses) {
    bad("classes", "synthetic splits support at most " + std::to_string(kMaxSynthClasses));
  }
}

BenchConfig parse_json(const json& j) {
  check_keys(j, "", {"seed", "id_policy", "kinds", "image_size", "classes", "datasets", "train",
                     "finetune", "sem", "odin", "ebo"});
  BenchConfig c;
  c.datasets.clear();
  get_u64(j, "", "seed", c.seed);
  if (j.contains("id_policy")) {
    std::string s;
    get_string(j, "", "id_policy", s);
    const auto p = parse_id_policy(s);
    if (!p) bad("id_policy", "expected \"full_spectrum\" or \"classic\"");
    c.id_policy = *p;
  }
  if (j.contains("kinds")) {
    const json& k = j.at("kinds");
    if (!k.is_array()) bad("kinds", "expected an array of score kinds");
    c.kinds.clear();
    for (const json& v : k) {
      const auto kind = v.is_string() ? parse_score_kind(v.get<std::string>()) : std::nullopt;
      if (!kind) bad("kinds", "unknown score kind " + v.dump());
      if (std::find(c.kinds.begin(), c.kinds.end(), *kind) != c.kinds.end()) {
        bad("kinds", "duplicate score kind " + v.dump());
      }
      c.kinds.push_back(*kind);
    }
  }
  get_size(j, "", "image_size", c.image_size);
  get_size(j, "", "classes", c.classes);
  if (!j.contains("datasets")) bad("datasets", "missing");
  const json& ds = j.at("datasets");
  if (!ds.is_array()) bad("datasets", "expected an array");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    c.datasets.push_back(parse_dataset(ds[i], "datasets[" + std::to_string(i) + "]"));
  }
  if (j.contains("train")) parse_train(j.at("train"), c.train);
  if (j.contains("finetune")) parse_finetune(j.at("finetune"), c.finetune);
  if (j.contains("sem")) parse_sem(j.at("sem"), c.sem);
  if (j.contains("odin")) parse_odin(j.at("odin"), c.odin);
  if (j.contains("ebo")) {
    check_keys(j.at("ebo"), "ebo", {"temperature"});
    get_double(j.at("ebo"), "ebo", "temperature", c.ebo_temperature);
    positive(c.ebo_temperature, "ebo.temperature");
  }
  validate(c);
  return c;
}

json parse_text(std::string_view text, const char* what) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::kInvalidArgument, std::string(what) + ": invalid JSON");
  return j;
}

ordered_json gmm_json(const GmmOptions& g) {
  return {{"max_iter", g.max_iter},
          {"rel_tol", g.rel_tol},
          {"variance_floor", g.variance_floor},
          {"restarts", g.restarts},
          {"init", g.init == GmmInit::kKmeansPlusPlus ? "kmeans++" : "random"}};
}

ordered_json to_json(const BenchConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["id_policy"] = std::string(to_string(c.id_policy));
  ordered_json kinds = ordered_json::array();
  for (ScoreKind k : c.kinds) kinds.push_back(std::string(to_string(k)));
  j["kinds"] = kinds;
  j["image_size"] = c.image_size;
  j["classes"] = c.classes;
  ordered_json ds = ordered_json::array();
  for (const DatasetSpec& d : c.datasets) {
    ordered_json e;
    e["name"] = d.name;
    e["role"] = std::string(to_string(d.role));
    e["use"] = std::string(to_string(d.use));
    e["source"] = d.source;
    e["count"] = d.count;
    if (has_prefix(d.source, "synth:")) {
      e["shift"] = {{"noise_sigma", d.shift.noise_sigma},
                    {"contrast", d.shift.contrast},
                    {"background", d.shift.background}};
    }
    if (!d.labels.empty()) e["labels"] = d.labels;
    if (!d.features.empty()) {
      ordered_json f = ordered_json::object();
      if (!d.features.logits.empty()) f["logits"] = d.features.logits;
      if (!d.features.penult.empty()) f["penult"] = d.features.penult;
      if (!d.features.low_stats.empty()) f["low_stats"] = d.features.low_stats;
      e["features"] = f;
    }
    ds.push_back(e);
  }
  j["datasets"] = ds;
  const TrainConfig& t = c.train;
  j["train"] = {{"epochs", t.epochs},       {"batch_size", t.batch_size},
                {"lr", t.lr0},              {"momentum", t.momentum},
                {"weight_decay", t.weight_decay}, {"schedule", schedule_name(t.schedule)}};
  const FinetuneConfig& f = c.finetune;
  ordered_json ft = {{"epochs", f.epochs},
                     {"batch_size", f.batch_size},
                     {"lr", f.lr},
                     {"momentum", f.momentum},
                     {"weight_decay", f.weight_decay},
                     {"schedule", schedule_name(f.schedule)},
                     {"src_weight", f.src_weight},
                     {"mixup_alpha", f.mixup_alpha},
                     {"form", f.form == SourceLossForm::kLogDensity ? "log" : "raw"},
                     {"low_components", f.low_components},
                     {"src_grad_clip", f.src_grad_clip}};
  ft["forced_lambda"] = f.forced_lambda ? ordered_json(*f.forced_lambda) : ordered_json(nullptr);
  ft["gmm"] = gmm_json(f.gmm);
  j["finetune"] = ft;
  const SemOptions& s = c.sem;
  j["sem"] = {{"low_components", s.low_components},
              {"top_components", s.top_components},
              {"max_dim", s.max_dim},
              {"projection", s.projection == ProjectionKind::kPca ? "pca" : "within_class"},
              {"gmm", gmm_json(s.gmm)}};
  j["odin"] = {{"temperature", c.odin.temperature}, {"grid", c.odin.grid}};
  j["ebo"] = {{"temperature", c.ebo_temperature}};
  return j;
}

fs::path resolve(const fs::path& base, std::string_view p) {
  fs::path path{std::string(p)};
  return path.is_absolute() ? path : base / path;
}

Matrix read_matrix(const fs::path& path, const std::string& what) {
  const Tensor t = read_tensor(path);
  require(t.rank() == 2, ErrorCode::kFormat,
          what + ": expected a 2-d tensor, got " + shape_to_string(t.shape()));
  return to_matrix(t);
}

std::vector<int> read_labels(const fs::path& base, std::string_view ref, const std::string& what) {
  if (has_prefix(ref, "idx:")) return read_idx_labels(resolve(base, ref.substr(4)));
  const Tensor t = read_tensor(resolve(base, ref.substr(5)));
  require(t.rank() == 1, ErrorCode::kFormat, what + ": label tensor must be 1-d");
  std::vector<int> out;
  for (float v : t.data()) {
    require(v >= 0.0f && v == std::floor(v) && v < 1e6f, ErrorCode::kFormat,
            what + ": labels must be non-negative integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Tensor take_first(const Tensor& t, std::size_t n) {
  if (n == 0 || n >= t.dim(0)) return t;
  Shape shape = t.shape();
  shape[0] = n;
  std::vector<float> data(t.data().begin(), t.data().begin() + n * t.item_size());
  return Tensor(shape, std::move(data));
}

Matrix take_rows(const Matrix& m, std::size_t n) {
  if (n == 0 || n >= m.rows) return m;
  Matrix out(n, m.cols);
  std::copy(m.values.begin(), m.values.begin() + n * m.cols, out.values.begin());
  return out;
}

LoadedSplit load_file_split(const BenchConfig& c, const DatasetSpec& d, const fs::path& base) {
  LoadedSplit s;
  s.spec = d;
  const std::string what = "dataset " + d.name;
  if (has_prefix(d.source, "idx:")) {
    s.images = read_idx_images(resolve(base, std::string_view(d.source).substr(4)));
  } else if (has_prefix(d.source, "tnsr:")) {
    s.images = read_tensor(resolve(base, std::string_view(d.source).substr(5)));
    require(s.images.rank() == 4, ErrorCode::kFormat,
            what + ": image tensor must be N×1×H×W, got " + shape_to_string(s.images.shape()));
    for (float v : s.images.data()) {
      require(v >= 0.0f && v <= 1.0f, ErrorCode::kFormat, what + ": pixels must lie in [0, 1]");
    }
  }
  if (!d.source.empty()) {
    require(s.images.dim(1) == 1 && s.images.dim(2) == c.image_size &&
                s.images.dim(3) == c.image_size,
            ErrorCode::kFormat,
            what + ": images are " + shape_to_string(s.images.shape()) + ", expected N×1×" +
                std::to_string(c.image_size) + "×" + std::to_string(c.image_size));
    s.images = take_first(s.images, d.count);
  }
  if (!d.labels.empty()) {
    s.labels = read_labels(base, d.labels, what);
    if (d.count && s.labels.size() > d.count) s.labels.resize(d.count);
    for (int l : s.labels) {
      require(l >= 0 && static_cast<std::size_t>(l) < c.classes, ErrorCode::kFormat,
              what + ": label " + std::to_string(l) + " is not below the class count " +
                  std::to_string(c.classes));
    }
  }
  if (!d.features.empty()) {
    Features f;
    if (!d.features.logits.empty()) {
      f.logits = take_rows(read_matrix(resolve(base, d.features.logits), what), d.count);
    }
    if (!d.features.penult.empty()) {
      f.penult = take_rows(read_matrix(resolve(base, d.features.penult), what), d.count);
    }
    if (!d.features.low_stats.empty()) {
      f.low_stats = take_rows(read_matrix(resolve(base, d.features.low_stats), what), d.count);
    }
    s.features = std::move(f);
  }
  const std::size_t n = s.size();
  if (!s.labels.empty()) {
    require(s.labels.size() == n, ErrorCode::kFormat,
            what + ": " + std::to_string(s.labels.size()) + " labels for " + std::to_string(n) +
                " samples");
  }
  if (s.features) {
    for (const Matrix* m : {&s.features->logits, &s.features->penult, &s.features->low_stats}) {
      require(m->rows == 0 || m->rows == n, ErrorCode::kFormat,
              what + ": feature rows do not match the sample count");
    }
  }
  return s;
}

struct Manifest {
  BenchConfig config;
  json splits;
};

Manifest read_manifest(const fs::path& dir, std::string_view overrides) {
  const json m = parse_text(read_file(dir / kManifestName), "dataset manifest");
  require(m.is_object() && m.value("format", "") == "semood-dataset" && m.contains("config") &&
              m.contains("splits") && m.at("splits").is_array(),
          ErrorCode::kFormat, "dataset manifest: not a semood dataset directory");
  Manifest out;
  out.config = parse_json(m.at("config"));
  if (!overrides.empty()) out.config = apply_overrides(out.config, overrides);
  out.splits = m.at("splits");
  return out;
}

}  // namespace

// ---- BenchConfig --------------------------------------------------------

BenchConfig BenchConfig::synthetic_default() {
  BenchConfig c;
  for (const SynthSplit& s : SynthBenchConfig::default_splits()) {
    DatasetSpec d;
    d.name = s.name;
    d.role = s.role;
    d.use = s.use;
    d.source = "synth:" + std::string(to_string(s.generator));
    d.count = s.count;
    d.shift = s.shift;
    c.datasets.push_back(d);
  }
  c.train.epochs = 10;
  c.train.lr0 = 0.05;
  c.finetune.src_grad_clip = 0.01;
  return c;
}

SynthBenchConfig BenchConfig::synth_config() const {
  SynthBenchConfig s;
  s.seed = seed;
  s.image_size = image_size;
  s.classes = classes;
  s.splits.clear();
  for (const DatasetSpec& d : datasets) {
    if (!has_prefix(d.source, "synth:")) continue;
    s.splits.push_back({d.name, d.role, d.use, *parse_generator(d.source.substr(6)), d.count,
                        d.shift});
  }
  return s;
}

TrainConfig BenchConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  t.classes = classes;
  return t;
}

FinetuneConfig BenchConfig::finetune_config() const {
  FinetuneConfig f = finetune;
  f.seed = seed;
  return f;
}

SemOptions BenchConfig::sem_options() const {
  SemOptions s = sem;
  s.gmm.seed = seed;
  return s;
}

NetConfig BenchConfig::net_config() const {
  return NetConfig::lenet5(1, image_size, image_size, classes);
}

const DatasetSpec* BenchConfig::find(std::string_view name) const {
  for (const DatasetSpec& d : datasets) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

BenchConfig parse_bench_config(std::string_view json_text) {
  return parse_json(parse_text(json_text, "config"));
}

std::string bench_config_to_json(const BenchConfig& config) {
  return to_json(config).dump(2) + "\n";
}

BenchConfig apply_overrides(const BenchConfig& config, std::string_view overrides_json) {
  const json patch = parse_text(overrides_json, "overrides");
  require(patch.is_object(), ErrorCode::kInvalidArgument, "overrides: expected a JSON object");
  json base = json::parse(to_json(config).dump());
  base.merge_patch(patch);
  return parse_json(base);
}

// ---- datasets -------------------------------------------------------------

std::size_t LoadedSplit::size() const noexcept {
  if (images.rank() == 4) return images.dim(0);
  if (features) {
    return std::max({features->logits.rows, features->penult.rows, features->low_stats.rows});
  }
  return 0;
}

const LoadedSplit& Benchmark::split(std::string_view name) const {
  for (const LoadedSplit& s : splits) {
    if (s.spec.name == name) return s;
  }
  fail(ErrorCode::kInvalidArgument, "no dataset named \"" + std::string(name) + "\"");
}

const LoadedSplit& Benchmark::train_split() const {
  for (const LoadedSplit& s : splits) {
    if (s.spec.role == Role::kTrainId && s.spec.use == SplitUse::kTrain) return s;
  }
  fail(ErrorCode::kInvalidArgument, "benchmark has no training split");
}

const LoadedSplit* Benchmark::val_split(Role role) const {
  for (const LoadedSplit& s : splits) {
    if (s.spec.role == role && s.spec.use == SplitUse::kVal && s.images.rank() == 4) return &s;
  }
  return nullptr;
}

BenchConfig load_bench_config(const fs::path& path, std::string_view overrides_json) {
  if (fs::is_directory(path)) return read_manifest(path, overrides_json).config;
  BenchConfig c = parse_bench_config(read_file(path));
  if (!overrides_json.empty()) c = apply_overrides(c, overrides_json);
  return c;
}

Benchmark load_benchmark(const fs::path& path, std::string_view overrides_json) {
  Benchmark b;
  if (fs::is_directory(path)) {
    Manifest m = read_manifest(path, overrides_json);
    b.config = std::move(m.config);
    for (const json& e : m.splits) {
      require(e.is_object() && e.contains("name"), ErrorCode::kFormat,
              "dataset manifest: malformed split entry");
      const std::string name = e.at("name").get<std::string>();
      const DatasetSpec* spec = b.config.find(name);
      require(spec != nullptr, ErrorCode::kFormat,
              "dataset manifest: split \"" + name + "\" is not in the configuration");
      DatasetSpec files;
      files.name = name;
      files.role = spec->role;
      files.use = spec->use;
      files.source = e.value("images", "");
      files.labels = e.value("labels", "");
      if (e.contains("features")) parse_features(e.at("features"), name, files.features);
      LoadedSplit s = load_file_split(b.config, files, path);
      s.spec = *spec;
      b.splits.push_back(std::move(s));
    }
    for (const DatasetSpec& d : b.config.datasets) {
      const bool present = std::any_of(b.splits.begin(), b.splits.end(),
                                       [&](const LoadedSplit& s) { return s.spec.name == d.name; });
      require(present, ErrorCode::kFormat,
              "dataset manifest: no files for configured split \"" + d.name + "\"");
    }
    return b;
  }

  b.config = load_bench_config(path, overrides_json);
  const fs::path base = path.parent_path();
  const SynthBenchConfig sc = b.config.synth_config();
  for (const DatasetSpec& d : b.config.datasets) {
    if (has_prefix(d.source, "synth:")) {
      const auto* split = &*std::find_if(sc.splits.begin(), sc.splits.end(),
                                         [&](const SynthSplit& s) { return s.name == d.name; });
      Dataset ds = synth_split(sc, *split);
      LoadedSplit s;
      s.spec = d;
      s.images = std::move(ds.images);
      s.labels = std::move(ds.labels);
      b.splits.push_back(std::move(s));
    } else {
      b.splits.push_back(load_file_split(b.config, d, base));
    }
  }
  return b;
}

void write_benchmark(const Benchmark& bench, const fs::path& dir) {
  fs::create_directories(dir);
  ordered_json splits = ordered_json::array();
  for (const LoadedSplit& s : bench.splits) {
    ordered_json e;
    e["name"] = s.spec.name;
    e["role"] = std::string(to_string(s.spec.role));
    e["use"] = std::string(to_string(s.spec.use));
    e["count"] = s.size();
    if (s.images.rank() == 4) {
      const bool quantised = !has_prefix(s.spec.source, "tnsr:");
      const std::string file = s.spec.name + (quantised ? "-images.idx" : "-images.tnsr");
      if (quantised) {
        write_idx_images(dir / file, s.images);
      } else {
        write_tensor(dir / file, s.images);
      }
      e["images"] = (quantised ? "idx:" : "tnsr:") + file;
    }
    if (!s.labels.empty()) {
      const std::string file = s.spec.name + "-labels.idx";
      write_idx_labels(dir / file, s.labels);
      e["labels"] = "idx:" + file;
    }
    if (s.features) {
      ordered_json f = ordered_json::object();
      auto put = [&](const char* key, const Matrix& m) {
        if (m.rows == 0) return;
        const std::string file = s.spec.name + "-" + key + ".tnsr";
        write_tensor(dir / file, to_tensor(m));
        f[key] = file;
      };
      put("logits", s.features->logits);
      put("penult", s.features->penult);
      put("low_stats", s.features->low_stats);
      e["features"] = f;
    }
    splits.push_back(e);
  }
  ordered_json m;
  m["format"] = "semood-dataset";
  m["version"] = 1;
  m["config"] = to_json(bench.config);
  m["splits"] = splits;
  write_file(dir / kManifestName, m.dump(2) + "\n");
}

}  // namespace semood
