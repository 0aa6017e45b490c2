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

#include "plas/plas.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "plas/config.h"
#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/errors.h"
#include "plas/experiment.h"
#include "plas/mmd.h"

struct plas_config {
  plas::ExperimentConfig config;
  plas::Json document;  // user document, overrides applied
};

struct plas_dataset {
  std::unique_ptr<plas::TransitionDataset> dataset;
};

struct plas_cvae {
  plas::BehaviorCvae cvae;
};

namespace {

struct NullArgument : plas::Error {
  using plas::Error::Error;
};

thread_local std::string g_error;
thread_local std::string g_field;

plas_status Fail(plas_status status, const std::string& message,
                 const std::string& field = "") {
  g_error = message;
  g_field = field;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
plas_status Guard(Fn&& fn) {
  g_error.clear();
  g_field.clear();
  try {
    fn();
    return PLAS_OK;
  } catch (const NullArgument& e) {
    return Fail(PLAS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const plas::ConfigError& e) {
    return Fail(PLAS_ERR_CONFIG, e.what(), e.field());
  } catch (const plas::ShapeError& e) {
    return Fail(PLAS_ERR_SHAPE, e.what());
  } catch (const plas::ValueError& e) {
    return Fail(PLAS_ERR_VALUE, e.what());
  } catch (const plas::NumericError& e) {
    return Fail(PLAS_ERR_NUMERIC, e.what());
  } catch (const plas::IoError& e) {
    return Fail(PLAS_ERR_IO, e.what());
  } catch (const plas::Json::exception& e) {
    return Fail(PLAS_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(PLAS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(PLAS_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return Fail(PLAS_ERR_RUNTIME, e.what());
  } catch (...) {
    return Fail(PLAS_ERR_RUNTIME, "unknown failure");
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Put(char** out, const std::string& s) {
  if (out != nullptr) *out = Dup(s);
}

template <typename T>
void Require(const T* p, const char* name) {
  if (p == nullptr) throw NullArgument(std::string(name) + " is NULL");
}

plas::ProgressFn Progress(plas_progress_fn fn, void* user) {
  if (fn == nullptr) return {};
  return [fn, user](const std::string& m) { fn(m.c_str(), user); };
}

}  // namespace

extern "C" {

const char* plas_version(void) { return "1.0.0"; }

const char* plas_status_name(plas_status status) {
  switch (status) {
    case PLAS_OK: return "ok";
    case PLAS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PLAS_ERR_CONFIG: return "config";
    case PLAS_ERR_SHAPE: return "shape";
    case PLAS_ERR_VALUE: return "value";
    case PLAS_ERR_NUMERIC: return "numeric";
    case PLAS_ERR_IO: return "io";
    case PLAS_ERR_RUNTIME: return "runtime";
  }
  return "unknown";
}

int plas_status_is_validation(plas_status status) {
  return status == PLAS_ERR_INVALID_ARGUMENT || status == PLAS_ERR_CONFIG ||
         status == PLAS_ERR_SHAPE || status == PLAS_ERR_VALUE;
}

const char* plas_last_error(void) { return g_error.c_str(); }
const char* plas_last_error_field(void) { return g_field.c_str(); }
void plas_string_free(char* s) { std::free(s); }


plas_status plas_config_load(const char* path, const char* const* overrides,
                             size_t n_overrides, plas_config** out) {
  return Guard([&] {
    Require(out, "out");
    if (n_overrides > 0) Require(overrides, "overrides");
    auto handle = std::make_unique<plas_config>();
    handle->document = plas::Json::object();
    if (path != nullptr && *path != '\0') {
      try {
        handle->document = plas::ReadJsonFile(path);
      } catch (const plas::IoError& e) {
        throw plas::ConfigError(path, e.what());
      }
    }
    for (size_t i = 0; i < n_overrides; ++i) {
      Require(overrides[i], "override");
      plas::ApplyOverride(handle->document, overrides[i]);
    }
    handle->config = plas::ConfigFromJson(handle->document);
    *out = handle.release();
  });
}

plas_status plas_config_from_json(const char* json, plas_config** out) {
  return Guard([&] {
    Require(json, "json");
    Require(out, "out");
    auto handle = std::make_unique<plas_config>();
    try {
      handle->document = plas::Json::parse(json);
    } catch (const plas::Json::exception& e) {
      throw plas::ConfigError("<root>", e.what());
    }
    handle->config = plas::ConfigFromJson(handle->document);
    *out = handle.release();
  });
}

plas_status plas_config_set(plas_config* config, const char* assignment) {
  return Guard([&] {
    Require(config, "config");
    Require(assignment, "assignment");
    plas::Json document = config->document;
    plas::ApplyOverride(document, assignment);
    config->config = plas::ConfigFromJson(document);
    config->document = std::move(document);
  });
}

plas_status plas_config_to_json(const plas_config* config, char** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    *out = Dup(plas::ConfigToJson(config->config).dump(2));
  });
}

plas_status plas_config_hash(const plas_config* config, char** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    *out = Dup(plas::ConfigHashHex(config->config));
  });
}

plas_status plas_config_seeds(const plas_config* config, uint64_t* seeds,
                              size_t capacity, size_t* count) {
  return Guard([&] {
    Require(config, "config");
    Require(count, "count");
    if (capacity > 0) Require(seeds, "seeds");
    const auto& s = config->config.seeds;
    *count = s.size();
    for (size_t i = 0; i < s.size() && i < capacity; ++i) seeds[i] = s[i];
  });
}

void plas_config_free(plas_config* config) { delete config; }

plas_status plas_dataset_generate(const char* env, const char* kind,
                                  size_t size, uint64_t seed,
                                  const plas_config* config,
                                  plas_dataset** out) {
  return Guard([&] {
    Require(env, "env");
    Require(kind, "kind");
    Require(out, "out");
    const auto environment = plas::MakeEnv(env);
    const plas::GeneratorOptions options =
        config != nullptr ? config->config.dataset.options
                          : plas::GeneratorOptions{};
    auto handle = std::make_unique<plas_dataset>();
    handle->dataset = std::make_unique<plas::TransitionDataset>(
        plas::GenerateDataset(*environment, plas::ParseGeneratorKind(kind),
                              size, seed, options));
    *out = handle.release();
  });
}

plas_status plas_dataset_load(const char* path, plas_dataset** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto handle = std::make_unique<plas_dataset>();
    handle->dataset =
        std::make_unique<plas::TransitionDataset>(plas::LoadDataset(path));
    *out = handle.release();
  });
}

plas_status plas_dataset_save(const plas_dataset* dataset, const char* path) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(path, "path");
    plas::SaveDataset(*dataset->dataset, path);
  });
}

plas_status plas_dataset_size(const plas_dataset* dataset, size_t* size) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(size, "size");
    *size = dataset->dataset->size();
  });
}

plas_status plas_dataset_info(const plas_dataset* dataset, char** out) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    const plas::TransitionDataset& d = *dataset->dataset;
    const plas::DatasetMetadata& m = d.metadata();
    plas::Json info = {
        {"env_name", m.env_name},
        {"generator_kind", plas::GeneratorKindName(m.generator_kind)},
        {"recipe", m.recipe},
        {"seed", m.seed},
        {"size", m.size},
        {"state_dim", d.state_dim()},
        {"action_dim", d.action_dim()},
        {"content_hash", plas::HashToHex(d.ContentHash())}};
    *out = Dup(info.dump(2));
  });
}

void plas_dataset_free(plas_dataset* dataset) { delete dataset; }

plas_status plas_cvae_train(const plas_dataset* dataset,
                            const plas_config* config, uint64_t seed,
                            const char* log_path, plas_cvae** out) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    const plas::CvaeConfig cvae_config =
        config != nullptr ? config->config.cvae : plas::CvaeConfig{};
    std::ofstream log;
    if (log_path != nullptr) {
      log.open(log_path, std::ios::trunc);
      if (!log) throw plas::IoError(std::string("cannot write ") + log_path);
    }
    const plas::ElboSink sink = [&](const plas::ElboLogEntry& e) {
      if (!log.is_open()) return;
      log << plas::Json{{"step", e.step},
                        {"reconstruction_loss", e.report.reconstruction_loss},
                        {"kl_loss", e.report.kl_loss},
                        {"total", e.report.total}}
                 .dump()
          << '\n';
    };
    auto handle = std::make_unique<plas_cvae>();
    handle->cvae =
        plas::TrainCvae(*dataset->dataset, cvae_config, seed, sink).cvae;
    *out = handle.release();
  });
}

plas_status plas_cvae_save(const plas_cvae* cvae, const char* path) {
  return Guard([&] {
    Require(cvae, "cvae");
    Require(path, "path");
    plas::SaveCvae(cvae->cvae, path);
  });
}

plas_status plas_cvae_load(const char* path, plas_cvae** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto handle = std::make_unique<plas_cvae>();
    handle->cvae = plas::LoadCvae(path);
    *out = handle.release();
  });
}

plas_status plas_cvae_hash(const plas_cvae* cvae, char** out) {
  return Guard([&] {
    Require(cvae, "cvae");
    Require(out, "out");
    *out = Dup(plas::HashToHex(cvae->cvae.Hash()));
  });
}

void plas_cvae_free(plas_cvae* cvae) { delete cvae; }

plas_status plas_run_experiment(const plas_config* config, uint64_t seed,
                                int resume, plas_progress_fn progress,
                                void* user, char** report_json) {
  return Guard([&] {
    Require(config, "config");
    const plas::RunResult result = plas::RunExperiment(
        config->config, seed, resume != 0, Progress(progress, user));
    Put(report_json, result.report.dump(2));
  });
}

plas_status plas_diagnose(const char* run_dir, plas_progress_fn progress,
                          void* user, char** report_json) {
  return Guard([&] {
    Require(run_dir, "run_dir");
    const plas::Json report =
        plas::DiagnoseRun(run_dir, Progress(progress, user));
    Put(report_json, report.dump(2));
  });
}

plas_status plas_run_sweep(const plas_config* config, const char* axis,
                           const double* values, size_t n_values,
                           plas_progress_fn progress, void* user, char** csv) {
  return Guard([&] {
    Require(config, "config");
    Require(axis, "axis");
    plas::SweepSpec spec = plas::SweepSpec::Default(axis);
    if (values != nullptr) spec.values.assign(values, values + n_values);
    const auto rows =
        plas::RunSweep(config->config, spec, Progress(progress, user));
    Put(csv, plas::SweepRowsToCsv(rows));
  });
}

plas_status plas_aggregate_sweep(const char* sweep_dir, char** csv) {
  return Guard([&] {
    Require(sweep_dir, "sweep_dir");
    Require(csv, "csv");
    *csv = Dup(plas::SweepRowsToCsv(plas::AggregateSweep(sweep_dir)));
  });
}

plas_status plas_normalize_score(double raw, double random_ref,
                                 double expert_ref, double* out) {
  return Guard([&] {
    Require(out, "out");
    *out = plas::NormalizeScore(raw, random_ref, expert_ref);
  });
}

plas_status plas_reference_scores(int episodes, uint64_t seed, char** json) {
  return Guard([&] {
    Require(json, "json");
    if (episodes <= 0) throw plas::ValueError("episodes must be positive");
    const auto table = plas::ComputeReferenceTable(episodes, seed);
    *json = Dup(plas::ReferenceTableToJson(table, episodes, seed).dump(2));
  });
}

plas_status plas_mmd_run(const char* scenario, uint64_t seed, int n_samples,
                         int n_repeats, const char* estimator, char** csv,
                         char** long_format, char** summary_json) {
  return Guard([&] {
    Require(scenario, "scenario");
    plas::MmdScenario s;
    const std::string name = scenario;
    if (name == "matched_normal") {
      s = plas::MmdScenario::MatchedNormal();
    } else if (name == "bimodal_hole") {
      s = plas::MmdScenario::BimodalHole();
    } else {
      throw plas::ConfigError("mmd.scenario", "unknown scenario '" + name + "'");
    }
    s.n_samples = n_samples;
    s.n_repeats = n_repeats;
    if (estimator != nullptr) s.estimator = plas::ParseMmdEstimator(estimator);
    const auto kernels = plas::DefaultKernels();
    const auto curve = plas::RunScenario(s, kernels, seed);
    plas::Json summary = {{"scenario", name},
                          {"seed", seed},
                          {"n_samples", n_samples},
                          {"n_repeats", n_repeats},
                          {"estimator", plas::MmdEstimatorName(s.estimator)},
                          {"argmin", plas::Json::array()}};
    for (const auto& k : kernels) {
      summary["argmin"].push_back(
          {{"kernel", plas::KernelFamilyName(k.family)},
           {"sigma", k.sigma},
           {"x", plas::CurveArgmin(curve, k)}});
    }
    Put(csv, plas::CurvesToCsv(curve));
    Put(long_format, plas::CurvesToLongFormat(curve));
    Put(summary_json, summary.dump(2));
  });
}

}  // extern "C"
