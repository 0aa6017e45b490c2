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

#ifndef PLAS_EXPERIMENT_H_
#define PLAS_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plas/config.h"
#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/diagnostics.h"
#include "plas/online.h"

namespace plas {

// 100 * (raw - random) / (expert - random).
double NormalizeScore(double raw, double random_ref, double expert_ref);

using ReferenceTable = std::map<std::string, ReferenceScores>;

ReferenceTable ComputeReferenceTable(int episodes = kReferenceEpisodes,
                                     std::uint64_t seed = kReferenceSeed);
Json ReferenceTableToJson(const ReferenceTable& table, int episodes,
                          std::uint64_t seed);
ReferenceTable ReferenceTableFromJson(const Json& json);
// Reads `path` when it exists, else computes the scores for `env`.
ReferenceScores LookupReferences(const std::filesystem::path& path,
                                 const std::string& env);

using ProgressFn = std::function<void(const std::string&)>;

// output_dir / "<algorithm>-seed<seed>"
std::filesystem::path RunDirectory(const ExperimentConfig& config,
                                   std::uint64_t seed);

// The seed a generated dataset uses for a run seed.
std::uint64_t DatasetSeed(const ExperimentConfig& config, std::uint64_t seed);

// Loads config.dataset.path, reuses `dir`/dataset.jsonl when its stamp
// matches, or generates and saves a fresh dataset there.
TransitionDataset PrepareDataset(const ExperimentConfig& config,
                                 std::uint64_t seed,
                                 const std::filesystem::path& dir,
                                 const ProgressFn& progress = {});

// Same policy for the CVAE in `dir`/cvae.json; the training curve goes to
// `dir`/cvae_log.jsonl.
std::shared_ptr<const BehaviorCvae> PrepareCvae(
    const ExperimentConfig& config, std::uint64_t seed,
    const TransitionDataset& dataset, const std::filesystem::path& dir,
    const ProgressFn& progress = {});

struct RunResult {
  std::filesystem::path run_dir;
  std::string config_hash;
  std::uint64_t seed = 0;
  double final_return = 0.0;
  double final_return_std = 0.0;
  double normalized_score = 0.0;
  bool resumed = false;
  Json report;
};

// Dataset, CVAE (PLAS only), training with periodic checkpoints, then final
// diagnostics. With `resume`, a run directory holding a checkpoint stamped
// with the same config hash continues from it; a different hash aborts with
// ConfigError.
RunResult RunExperiment(const ExperimentConfig& config, std::uint64_t seed,
                        bool resume = true, const ProgressFn& progress = {});

// Recomputes the final diagnostics of a finished run directory.
Json DiagnoseRun(const std::filesystem::path& run_dir,
                 const ProgressFn& progress = {});

struct SweepSpec {
  std::string axis;  // "epsilon" or "max_latent_action"
  std::vector<double> values;

  static SweepSpec Default(const std::string& axis);
  void Validate() const;
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  double final_return = 0.0;
  double normalized_score = 0.0;
  std::string status;  // "ok" or "failed: <reason>"
  std::string run_dir;
};

std::filesystem::path SweepDirectory(const ExperimentConfig& config,
                                     const std::string& axis);

// One PLAS run per (value, seed) over a dataset and CVAE shared per seed.
// Failed cells are recorded and the sweep carries on. Writes
// <sweep dir>/aggregate.csv.
std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const SweepSpec& spec,
                               const ProgressFn& progress = {});

// Rebuilds the aggregate rows from the per-cell directories alone.
std::vector<SweepRow> AggregateSweep(const std::filesystem::path& sweep_dir);
std::string SweepRowsToCsv(const std::vector<SweepRow>& rows);

}  // namespace plas

#endif  // PLAS_EXPERIMENT_H_
