/*
 * Copyright 2026 The semood Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the semood library.
 *
 * Conventions:
 *   - Every fallible call returns a semood_status. On failure the message is
 *     available from semood_last_error() on the same thread until the next
 *     failing call.
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_free function. Passing NULL to a free function is a no-op.
 *   - Strings and arrays returned through out-parameters are allocated by the
 *     library; release them with semood_string_free / semood_doubles_free.
 *   - overrides_json may be NULL or a JSON object with any subset of the
 *     configuration keys, e.g. {"seed": 3}. Nested objects merge key by key.
 *   - No call keeps global state besides the thread-local error message.
 */

#ifndef SEMOOD_SEMOOD_H
#define SEMOOD_SEMOOD_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(SEMOOD_BUILDING_LIBRARY)
#define SEMOOD_API __declspec(dllexport)
#else
#define SEMOOD_API __declspec(dllimport)
#endif
#else
#define SEMOOD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum semood_status {
  SEMOOD_OK = 0,
  SEMOOD_ERR_INVALID_ARGUMENT = 1,
  SEMOOD_ERR_SHAPE = 2,
  SEMOOD_ERR_NUMERIC = 3,
  SEMOOD_ERR_IO = 4,
  SEMOOD_ERR_FORMAT = 5,
  SEMOOD_ERR_STATE = 6,
  SEMOOD_ERR_MISSING_COMPONENT = 7,
  SEMOOD_ERR_INTERNAL = 100
} semood_status;

/* A loaded benchmark: resolved configuration plus all splits in memory. */
typedef struct semood_benchmark semood_benchmark;

/* A model file in memory: net and/or SEM and MDS models plus settings. */
typedef struct semood_model semood_model;

SEMOOD_API const char* semood_version(void);
SEMOOD_API const char* semood_status_name(semood_status status);
SEMOOD_API const char* semood_last_error(void);

SEMOOD_API void semood_string_free(char* s);
SEMOOD_API void semood_doubles_free(double* values);

/* Configuration ---------------------------------------------------------- */

/* Built-in synthetic benchmark configuration as JSON. */
SEMOOD_API semood_status semood_config_default(char** out_json);

/* Loads a config file or a dataset directory, applies overrides, validates and
 * returns the fully resolved configuration (defaults included). */
SEMOOD_API semood_status semood_config_resolve(const char* path, const char* overrides_json,
                                               char** out_json);

/* Benchmarks ------------------------------------------------------------- */

/* Opens a dataset directory, or a config file whose synthetic splits are
 * generated in memory. */
SEMOOD_API semood_status semood_benchmark_open(const char* path, const char* overrides_json,
                                               semood_benchmark** out);
SEMOOD_API void semood_benchmark_free(semood_benchmark* bench);
SEMOOD_API semood_status semood_benchmark_config(const semood_benchmark* bench,
                                                 char** out_json);
SEMOOD_API semood_status semood_benchmark_size(const semood_benchmark* bench,
                                               const char* split, size_t* out_count);

/* Materializes every split into a dataset directory. */
SEMOOD_API semood_status semood_benchmark_write(const semood_benchmark* bench,
                                                const char* dir);

/* Opens a config and writes its dataset directory in one call. */
SEMOOD_API semood_status semood_synth_write(const char* config_path, const char* overrides_json,
                                            const char* out_dir, char** resolved_json);

/* Stages ----------------------------------------------------------------- */
/* summary_json may be NULL; otherwise it receives a short JSON summary. */

SEMOOD_API semood_status semood_train(const semood_benchmark* bench, semood_model** out,
                                      char** summary_json);
SEMOOD_API semood_status semood_finetune(const semood_benchmark* bench, const semood_model* in,
                                         semood_model** out, char** summary_json);
SEMOOD_API semood_status semood_fit(const semood_benchmark* bench, const semood_model* in,
                                    semood_model** out, char** summary_json);

/* Models ----------------------------------------------------------------- */

SEMOOD_API semood_status semood_model_load(const char* path, semood_model** out);
SEMOOD_API semood_status semood_model_save(const semood_model* model, const char* path);
SEMOOD_API void semood_model_free(semood_model* model);

/* Components present and seed provenance as JSON. */
SEMOOD_API semood_status semood_model_info(const semood_model* model, char** out_json);

/* Scoring ---------------------------------------------------------------- */

/* kind: sem, msp, odin, ebo, mds or low_only. */
SEMOOD_API semood_status semood_score_split(const semood_benchmark* bench,
                                            const semood_model* model, const char* split,
                                            const char* kind, double** out_scores,
                                            size_t* out_count);

/* log p(x) of the SEM top pipeline; equals sem + low_only exactly. */
SEMOOD_API semood_status semood_top_log_density(const semood_benchmark* bench,
                                                const semood_model* model, const char* split,
                                                double** out_values, size_t* out_count);

/* Writes <dir>/<split>.<kind>.tnsr and .csv for every split with use "test". */
SEMOOD_API semood_status semood_scores_write(const semood_benchmark* bench,
                                             const semood_model* model, const char* kind,
                                             const char* out_dir, char** written_json);

/* Evaluation ------------------------------------------------------------- */

/* Reads the score files named by the configuration from scores_dir and writes
 * report.csv and report.json into out_dir (when not NULL). */
SEMOOD_API semood_status semood_evaluate(const char* config_path, const char* overrides_json,
                                         const char* scores_dir, const char* out_dir,
                                         char** report_json);

/* Metrics on raw score arrays, ID positive. */
SEMOOD_API semood_status semood_metrics(const double* id_scores, size_t n_id,
                                        const double* ood_scores, size_t n_ood,
                                        double* out_fpr95, double* out_auroc,
                                        double* out_aupr);

#ifdef __cplusplus
}
#endif

#endif /* SEMOOD_SEMOOD_H */
