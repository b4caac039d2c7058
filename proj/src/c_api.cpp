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

#include "semood/semood.h"

#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <utility>

#include <json.hpp>

#include "semood/workflow.hpp"

struct semood_benchmark {
  semood::Benchmark bench;
};

struct semood_model {
  semood::ModelFile file;
};

namespace {

thread_local std::string g_last_error;

semood_status set_error(semood_status status, const char* what) {
  g_last_error = what;
  return status;
}

/// Runs `body`, translating exceptions into status codes.
template <class F>
semood_status guarded(F&& body) {
  try {
    body();
    return SEMOOD_OK;
  } catch (const semood::Error& e) {
    return set_error(static_cast<semood_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SEMOOD_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(SEMOOD_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(SEMOOD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SEMOOD_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  semood::require(p != nullptr, semood::ErrorCode::kInvalidArgument,
                  std::string(name) + " must not be NULL");
}

std::string_view opt_str(const char* s) { return s ? std::string_view(s) : std::string_view(); }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

void put_doubles(const std::vector<double>& v, double** out, size_t* count) {
  double* buf = static_cast<double*>(std::malloc(std::max<std::size_t>(1, v.size()) * sizeof(double)));
  if (!buf) throw std::bad_alloc();
  if (!v.empty()) std::memcpy(buf, v.data(), v.size() * sizeof(double));
  *out = buf;
  *count = v.size();
}

semood::ScoreKind kind_of(const char* kind) {
  need(kind, "kind");
  const auto k = semood::parse_score_kind(kind);
  semood::require(k.has_value(), semood::ErrorCode::kInvalidArgument,
                  std::string("unknown score kind '") + kind + "'");
  return *k;
}

}  // namespace

extern "C" {

const char* semood_version(void) { return "0.1.0"; }

const char* semood_status_name(semood_status status) {
  switch (status) {
    case SEMOOD_OK: return "ok";
    case SEMOOD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SEMOOD_ERR_SHAPE: return "shape mismatch";
    case SEMOOD_ERR_NUMERIC: return "numeric error";
    case SEMOOD_ERR_IO: return "i/o error";
    case SEMOOD_ERR_FORMAT: return "format error";
    case SEMOOD_ERR_STATE: return "invalid state";
    case SEMOOD_ERR_MISSING_COMPONENT: return "missing component";
    case SEMOOD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* semood_last_error(void) { return g_last_error.c_str(); }

void semood_string_free(char* s) { std::free(s); }
void semood_doubles_free(double* values) { std::free(values); }

semood_status semood_config_default(char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    put_string(out_json, semood::bench_config_to_json(semood::BenchConfig::synthetic_default()));
  });
}

semood_status semood_config_resolve(const char* path, const char* overrides_json,
                                    char** out_json) {
  return guarded([&] {
    need(path, "path");
    need(out_json, "out_json");
    put_string(out_json, semood::bench_config_to_json(
                             semood::load_bench_config(path, opt_str(overrides_json))));
  });
}

semood_status semood_benchmark_open(const char* path, const char* overrides_json,
                                    semood_benchmark** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto b = std::make_unique<semood_benchmark>();
    b->bench = semood::load_benchmark(path, opt_str(overrides_json));
    *out = b.release();
  });
}

void semood_benchmark_free(semood_benchmark* bench) { delete bench; }

semood_status semood_benchmark_config(const semood_benchmark* bench, char** out_json) {
  return guarded([&] {
    need(bench, "bench");
    need(out_json, "out_json");
    put_string(out_json, semood::bench_config_to_json(bench->bench.config));
  });
}

semood_status semood_benchmark_size(const semood_benchmark* bench, const char* split,
                                    size_t* out_count) {
  return guarded([&] {
    need(bench, "bench");
    need(split, "split");
    need(out_count, "out_count");
    *out_count = bench->bench.split(split).size();
  });
}

semood_status semood_benchmark_write(const semood_benchmark* bench, const char* dir) {
  return guarded([&] {
    need(bench, "bench");
    need(dir, "dir");
    semood::write_benchmark(bench->bench, dir);
  });
}

semood_status semood_synth_write(const char* config_path, const char* overrides_json,
                                 const char* out_dir, char** resolved_json) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out_dir, "out_dir");
    const semood::Benchmark b = semood::load_benchmark(config_path, opt_str(overrides_json));
    semood::write_benchmark(b, out_dir);
    put_string(resolved_json, semood::bench_config_to_json(b.config));
  });
}

semood_status semood_train(const semood_benchmark* bench, semood_model** out,
                           char** summary_json) {
  return guarded([&] {
    need(bench, "bench");
    need(out, "out");
    *out = nullptr;
    semood::StageResult r = semood::run_train(bench->bench);
    auto m = std::make_unique<semood_model>();
    m->file = std::move(r.model);
    put_string(summary_json, r.summary_json);
    *out = m.release();
  });
}

semood_status semood_finetune(const semood_benchmark* bench, const semood_model* in,
                              semood_model** out, char** summary_json) {
  return guarded([&] {
    need(bench, "bench");
    need(in, "in");
    need(out, "out");
    *out = nullptr;
    semood::StageResult r = semood::run_finetune(bench->bench, in->file);
    auto m = std::make_unique<semood_model>();
    m->file = std::move(r.model);
    put_string(summary_json, r.summary_json);
    *out = m.release();
  });
}

semood_status semood_fit(const semood_benchmark* bench, const semood_model* in,
                         semood_model** out, char** summary_json) {
  return guarded([&] {
    need(bench, "bench");
    need(out, "out");
    *out = nullptr;
    semood::ModelFile empty;
    semood::StageResult r = semood::run_fit(bench->bench, in ? in->file : empty);
    auto m = std::make_unique<semood_model>();
    m->file = std::move(r.model);
    put_string(summary_json, r.summary_json);
    *out = m.release();
  });
}

semood_status semood_model_load(const char* path, semood_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<semood_model>();
    m->file = semood::load_model(path);
    *out = m.release();
  });
}

semood_status semood_model_save(const semood_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    semood::save_model(path, model->file);
  });
}

void semood_model_free(semood_model* model) { delete model; }

semood_status semood_model_info(const semood_model* model, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(out_json, "out_json");
    const semood::ModelFile& f = model->file;
    nlohmann::ordered_json j;
    j["components"] = semood::model_components(f);
    j["train_seed"] = f.provenance.train_seed;
    j["fit_seed"] = f.provenance.fit_seed;
    j["finetune_seed"] = f.provenance.finetune_seed;
    j["finetuned"] = f.provenance.finetuned;
    j["odin_temperature"] = f.bundle.odin.temperature;
    j["odin_epsilon"] = f.bundle.odin.epsilon;
    j["ebo_temperature"] = f.bundle.ebo_temperature;
    put_string(out_json, j.dump(2));
  });
}

semood_status semood_score_split(const semood_benchmark* bench, const semood_model* model,
                                 const char* split, const char* kind, double** out_scores,
                                 size_t* out_count) {
  return guarded([&] {
    need(bench, "bench");
    need(model, "model");
    need(split, "split");
    need(out_scores, "out_scores");
    need(out_count, "out_count");
    const auto scores = semood::run_score(bench->bench, model->file, bench->bench.split(split),
                                          kind_of(kind));
    put_doubles(scores, out_scores, out_count);
  });
}

semood_status semood_top_log_density(const semood_benchmark* bench, const semood_model* model,
                                     const char* split, double** out_values,
                                     size_t* out_count) {
  return guarded([&] {
    need(bench, "bench");
    need(model, "model");
    need(split, "split");
    need(out_values, "out_values");
    need(out_count, "out_count");
    const auto v =
        semood::run_top_log_density(bench->bench, model->file, bench->bench.split(split));
    put_doubles(v, out_values, out_count);
  });
}

semood_status semood_scores_write(const semood_benchmark* bench, const semood_model* model,
                                  const char* kind, const char* out_dir, char** written_json) {
  return guarded([&] {
    need(bench, "bench");
    need(model, "model");
    need(out_dir, "out_dir");
    put_string(written_json,
               semood::write_score_files(bench->bench, model->file, kind_of(kind), out_dir));
  });
}

semood_status semood_evaluate(const char* config_path, const char* overrides_json,
                              const char* scores_dir, const char* out_dir, char** report_json) {
  return guarded([&] {
    need(config_path, "config_path");
    need(scores_dir, "scores_dir");
    const semood::BenchConfig config =
        semood::load_bench_config(config_path, opt_str(overrides_json));
    const semood::EvalReport report = semood::evaluate_score_files(config, scores_dir);
    if (out_dir) semood::write_report(report, out_dir);
    put_string(report_json, semood::report_to_json(report));
  });
}

semood_status semood_metrics(const double* id_scores, size_t n_id, const double* ood_scores,
                             size_t n_ood, double* out_fpr95, double* out_auroc,
                             double* out_aupr) {
  return guarded([&] {
    need(id_scores, "id_scores");
    need(ood_scores, "ood_scores");
    const std::span<const double> id(id_scores, n_id);
    const std::span<const double> ood(ood_scores, n_ood);
    if (out_fpr95) *out_fpr95 = semood::fpr_at_tpr(id, ood);
    if (out_auroc) *out_auroc = semood::auroc(id, ood);
    if (out_aupr) *out_aupr = semood::aupr(id, ood);
  });
}

}  // extern "C"
