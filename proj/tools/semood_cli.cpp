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

// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semood/semood.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

const std::vector<std::string> kKinds{"sem", "msp", "odin", "ebo", "mds", "low_only"};

/// Raised when a C call fails; carries the library message.
struct Failure {
  std::string message;
};

void check(semood_status s) {
  if (s != SEMOOD_OK) {
    throw Failure{std::string(semood_status_name(s)) + ": " + semood_last_error()};
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  semood_string_free(s);
  return out;
}

/// Owning handle; move-only.
struct Benchmark {
  semood_benchmark* h = nullptr;
  Benchmark() = default;
  Benchmark(Benchmark&& o) noexcept : h(std::exchange(o.h, nullptr)) {}
  Benchmark& operator=(Benchmark&& o) noexcept {
    std::swap(h, o.h);
    return *this;
  }
  ~Benchmark() { semood_benchmark_free(h); }
};

/// Owning handle; move-only.
struct Model {
  semood_model* h = nullptr;
  Model() = default;
  Model(Model&& o) noexcept : h(std::exchange(o.h, nullptr)) {}
  Model& operator=(Model&& o) noexcept {
    std::swap(h, o.h);
    return *this;
  }
  ~Model() { semood_model_free(h); }
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string set_json;

  /// Overrides passed to the library: --set merged with --seed.
  std::string overrides() const {
    nlohmann::json j = nlohmann::json::object();
    if (!set_json.empty()) {
      j = nlohmann::json::parse(set_json, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw CLI::ValidationError("--set", "expects a JSON object");
    }
    if (seed) j["seed"] = *seed;
    return j.empty() ? std::string() : j.dump();
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random stream (overrides the config)");
  cmd->add_option("--set", c.set_json,
                  "JSON object of configuration overrides, e.g. '{\"train\":{\"epochs\":3}}'");
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void print_config(const std::string& json) {
  std::printf("resolved config:\n%s", json.c_str());
  if (json.empty() || json.back() != '\n') std::printf("\n");
}

void print_summary(const std::string& json) {
  if (!json.empty()) std::printf("summary:\n%s\n", json.c_str());
}

Benchmark open_data(const std::string& path, const Common& common) {
  Benchmark b;
  const std::string ov = common.overrides();
  check(semood_benchmark_open(path.c_str(), or_null(ov), &b.h));
  char* cfg = nullptr;
  check(semood_benchmark_config(b.h, &cfg));
  print_config(take(cfg));
  return b;
}

Model load_model(const std::string& path) {
  Model m;
  check(semood_model_load(path.c_str(), &m.h));
  return m;
}

std::vector<std::string> expand_kinds(const std::vector<std::string>& requested,
                                      const semood_benchmark* bench) {
  std::vector<std::string> out;
  for (const std::string& k : requested) {
    if (k != "all") {
      out.push_back(k);
      continue;
    }
    char* cfg = nullptr;
    check(semood_benchmark_config(bench, &cfg));
    const nlohmann::json resolved = nlohmann::json::parse(take(cfg));
    for (const auto& v : resolved.at("kinds")) {
      out.push_back(v.get<std::string>());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semood: full-spectrum out-of-distribution detection toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(semood_version()));

  Common common;

  std::string config, out, data, model, scores_dir, id_policy;
  std::vector<std::string> kinds;

  CLI::App* synth = app.add_subcommand("synth", "Generate a benchmark dataset directory");
  synth->add_option("--config", config, "Benchmark config (JSON)")->required();
  synth->add_option("--out", out, "Output dataset directory")->required();
  add_common(synth, common);

  CLI::App* train = app.add_subcommand("train", "Train the classifier");
  train->add_option("--data", data, "Dataset directory or config file")->required();
  train->add_option("--out", out, "Output model file")->required();
  add_common(train, common);

  CLI::App* ft = app.add_subcommand("finetune", "Source-awareness fine-tuning of a trained net");
  ft->add_option("--model", model, "Input model file with a net")->required();
  ft->add_option("--data", data, "Dataset directory or config file")->required();
  ft->add_option("--out", out, "Output model file")->required();
  add_common(ft, common);

  CLI::App* fit = app.add_subcommand("fit", "Fit the SEM and MDS density models");
  fit->add_option("--model", model, "Input model file with a net");
  fit->add_option("--data", data, "Dataset directory or config file")->required();
  fit->add_option("--out", out, "Output model file")->required();
  add_common(fit, common);

  CLI::App* score = app.add_subcommand("score", "Score every test split");
  score->add_option("--model", model, "Fitted model file")->required();
  score->add_option("--data", data, "Dataset directory or config file")->required();
  score->add_option("--kind", kinds, "Score kind(s): sem, msp, odin, ebo, mds, low_only or all")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember([] {
        auto v = kKinds;
        v.push_back("all");
        return v;
      }()));
  score->add_option("--out", out, "Output directory for score files")->required();
  add_common(score, common);

  CLI::App* ev = app.add_subcommand("eval", "Build the report from score files");
  ev->add_option("--config", config, "Benchmark config or dataset directory")->required();
  ev->add_option("--scores", scores_dir, "Directory holding <split>.<kind>.tnsr files")
      ->required();
  ev->add_option("--out", out, "Output directory for report.csv and report.json")->required();
  ev->add_option("--id-policy", id_policy, "full_spectrum or classic (overrides the config)")
      ->check(CLI::IsMember({"full_spectrum", "classic"}));
  add_common(ev, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      char* resolved = nullptr;
      const std::string ov = common.overrides();
      check(semood_synth_write(config.c_str(), or_null(ov), out.c_str(), &resolved));
      print_config(take(resolved));
      std::printf("wrote %s\n", out.c_str());
    } else if (train->parsed()) {
      Benchmark b = open_data(data, common);
      Model m;
      char* summary = nullptr;
      check(semood_train(b.h, &m.h, &summary));
      print_summary(take(summary));
      check(semood_model_save(m.h, out.c_str()));
      std::printf("wrote %s\n", out.c_str());
    } else if (ft->parsed()) {
      Benchmark b = open_data(data, common);
      Model in = load_model(model);
      Model m;
      char* summary = nullptr;
      check(semood_finetune(b.h, in.h, &m.h, &summary));
      print_summary(take(summary));
      check(semood_model_save(m.h, out.c_str()));
      std::printf("wrote %s\n", out.c_str());
    } else if (fit->parsed()) {
      Benchmark b = open_data(data, common);
      Model in;
      if (!model.empty()) in = load_model(model);
      Model m;
      char* summary = nullptr;
      check(semood_fit(b.h, in.h, &m.h, &summary));
      print_summary(take(summary));
      check(semood_model_save(m.h, out.c_str()));
      std::printf("wrote %s\n", out.c_str());
    } else if (score->parsed()) {
      Benchmark b = open_data(data, common);
      Model m = load_model(model);
      for (const std::string& kind : expand_kinds(kinds, b.h)) {
        char* written = nullptr;
        check(semood_scores_write(b.h, m.h, kind.c_str(), out.c_str(), &written));
        std::printf("%s: %s\n", kind.c_str(), take(written).c_str());
      }
    } else if (ev->parsed()) {
      nlohmann::json ov = nlohmann::json::object();
      const std::string base = common.overrides();
      if (!base.empty()) ov = nlohmann::json::parse(base);
      if (!id_policy.empty()) ov["id_policy"] = id_policy;
      const std::string ov_text = ov.empty() ? std::string() : ov.dump();
      char* resolved = nullptr;
      check(semood_config_resolve(config.c_str(), or_null(ov_text), &resolved));
      print_config(take(resolved));
      char* report = nullptr;
      check(semood_evaluate(config.c_str(), or_null(ov_text), scores_dir.c_str(), out.c_str(),
                            &report));
      std::printf("report:\n%s", take(report).c_str());
      std::printf("wrote %s/report.csv and %s/report.json\n", out.c_str(), out.c_str());
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return kExitData;
  }
  return kExitOk;
}
