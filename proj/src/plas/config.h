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

#ifndef PLAS_CONFIG_H_
#define PLAS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plas/actor_critic.h"
#include "plas/baselines.h"
#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/serialize.h"

namespace plas {

enum class Algorithm { kPlas, kBc, kUnconstrained };

std::string AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(const std::string& name);

struct DatasetSpec {
  GeneratorKind kind = GeneratorKind::kMediumExpert;
  std::size_t size = 10000;
  std::uint64_t seed = 0;
  // Non-empty: load this JSONL dataset instead of generating one.
  std::string path;
  GeneratorOptions options;
};

struct ExperimentConfig {
  std::string env = "edge_following";
  Algorithm algorithm = Algorithm::kPlas;
  DatasetSpec dataset;
  CvaeConfig cvae;
  // Non-empty: load this CVAE checkpoint instead of training one.
  std::string cvae_path;
  AgentConfig agent;
  TrainConfig train;
  BcConfig bc;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "runs";
  std::string reference_file = "data/reference_scores.json";
  int checkpoint_interval = 5000;
  int diagnostic_episodes = 10;

  // Throws ConfigError naming the offending field path.
  void Validate() const;
};

Json ConfigToJson(const ExperimentConfig& config);
// Missing keys keep their defaults; unknown keys and ill-typed values are
// rejected with their path.
ExperimentConfig ConfigFromJson(const Json& json);
std::uint64_t ConfigHash(const ExperimentConfig& config);
std::string ConfigHashHex(const ExperimentConfig& config);

// Applies "a.b.c=value" to a config document. The value is read as JSON when
// it parses, else as a plain string.
void ApplyOverride(Json& document, const std::string& assignment);

ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

}  // namespace plas

#endif  // PLAS_CONFIG_H_
