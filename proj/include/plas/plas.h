// Copyright 2026 The PLAS Authors.
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

// C interface to the PLAS library. Objects are opaque handles owned by the
// caller and released with their *_free function. Every call returns a
// plas_status; on failure plas_last_error() describes it. Strings returned
// through char** are released with plas_string_free.

#ifndef PLAS_PLAS_H_
#define PLAS_PLAS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PLAS_API
#elif defined(PLAS_BUILDING_LIBRARY)
#define PLAS_API __attribute__((visibility("default")))
#else
#define PLAS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plas_status {
  PLAS_OK = 0,
  PLAS_ERR_INVALID_ARGUMENT = 1,
  PLAS_ERR_CONFIG = 2,
  PLAS_ERR_SHAPE = 3,
  PLAS_ERR_VALUE = 4,
  PLAS_ERR_NUMERIC = 5,
  PLAS_ERR_IO = 6,
  PLAS_ERR_RUNTIME = 7
} plas_status;

typedef struct plas_config plas_config;
typedef struct plas_dataset plas_dataset;
typedef struct plas_cvae plas_cvae;

typedef void (*plas_progress_fn)(const char* message, void* user);

PLAS_API const char* plas_version(void);
PLAS_API const char* plas_status_name(plas_status status);
// Non-zero for statuses caused by bad input rather than a failed computation.
PLAS_API int plas_status_is_validation(plas_status status);
// Message of the last failure on the calling thread.
PLAS_API const char* plas_last_error(void);
// Config field path of the last failure, or "".
PLAS_API const char* plas_last_error_field(void);
PLAS_API void plas_string_free(char* s);

// Configuration. `path` may be NULL for the defaults; each override reads
// "key.path=value".
PLAS_API plas_status plas_config_load(const char* path,
                                      const char* const* overrides,
                                      size_t n_overrides, plas_config** out);
PLAS_API plas_status plas_config_from_json(const char* json,
                                           plas_config** out);
PLAS_API plas_status plas_config_set(plas_config* config,
                                     const char* assignment);
PLAS_API plas_status plas_config_to_json(const plas_config* config,
                                         char** out);
PLAS_API plas_status plas_config_hash(const plas_config* config, char** out);
// Copies up to `capacity` seeds; `count` receives the total.
PLAS_API plas_status plas_config_seeds(const plas_config* config,
                                       uint64_t* seeds, size_t capacity,
                                       size_t* count);
PLAS_API void plas_config_free(plas_config* config);

// Datasets. Generator options come from `config` (NULL for defaults).
PLAS_API plas_status plas_dataset_generate(const char* env, const char* kind,
                                           size_t size, uint64_t seed,
                                           const plas_config* config,
                                           plas_dataset** out);
PLAS_API plas_status plas_dataset_load(const char* path, plas_dataset** out);
PLAS_API plas_status plas_dataset_save(const plas_dataset* dataset,
                                       const char* path);
PLAS_API plas_status plas_dataset_size(const plas_dataset* dataset,
                                       size_t* size);
// Metadata, dimensions and content hash as JSON.
PLAS_API plas_status plas_dataset_info(const plas_dataset* dataset,
                                       char** out);
PLAS_API void plas_dataset_free(plas_dataset* dataset);

// Behaviour CVAE. `log_path` (may be NULL) receives the JSONL ELBO curve.
PLAS_API plas_status plas_cvae_train(const plas_dataset* dataset,
                                     const plas_config* config, uint64_t seed,
                                     const char* log_path, plas_cvae** out);
PLAS_API plas_status plas_cvae_save(const plas_cvae* cvae, const char* path);
PLAS_API plas_status plas_cvae_load(const char* path, plas_cvae** out);
PLAS_API plas_status plas_cvae_hash(const plas_cvae* cvae, char** out);
PLAS_API void plas_cvae_free(plas_cvae* cvae);

// Pipelines. Reports and aggregates are returned as JSON or CSV text.
PLAS_API plas_status plas_run_experiment(const plas_config* config,
                                         uint64_t seed, int resume,
                                         plas_progress_fn progress, void* user,
                                         char** report_json);
PLAS_API plas_status plas_diagnose(const char* run_dir,
                                   plas_progress_fn progress, void* user,
                                   char** report_json);
// `values` may be NULL to use the axis defaults.
PLAS_API plas_status plas_run_sweep(const plas_config* config,
                                    const char* axis, const double* values,
                                    size_t n_values, plas_progress_fn progress,
                                    void* user, char** csv);
PLAS_API plas_status plas_aggregate_sweep(const char* sweep_dir, char** csv);
PLAS_API plas_status plas_normalize_score(double raw, double random_ref,
                                          double expert_ref, double* out);
PLAS_API plas_status plas_reference_scores(int episodes, uint64_t seed,
                                           char** json);

// MMD simulations. `scenario` is "matched_normal" or "bimodal_hole";
// `estimator` is "v" or "u" (NULL for "v"). Any output pointer may be NULL;
// the summary lists each kernel's argmin over the sweep.
PLAS_API plas_status plas_mmd_run(const char* scenario, uint64_t seed,
                                  int n_samples, int n_repeats,
                                  const char* estimator, char** csv,
                                  char** long_format, char** summary_json);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // PLAS_PLAS_H_
