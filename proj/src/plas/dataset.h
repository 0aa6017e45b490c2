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

#ifndef PLAS_DATASET_H_
#define PLAS_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plas/diffnet.h"
#include "plas/envs.h"
#include "plas/random.h"

namespace plas {

enum class GeneratorKind {
  kRandom,
  kMedium,
  kMediumReplay,
  kMediumExpert,
  kExpert,
  kCustom
};

std::string GeneratorKindName(GeneratorKind kind);
GeneratorKind ParseGeneratorKind(const std::string& name);

struct DatasetMetadata {
  std::string env_name;
  GeneratorKind generator_kind = GeneratorKind::kCustom;
  // Free-form generator details, e.g. "action_range=0.5" or "bimodal".
  std::string recipe;
  std::uint64_t seed = 0;
  std::size_t size = 0;
};

// Immutable, non-empty, dimensionally consistent set of transitions.
class TransitionDataset {
 public:
  TransitionDataset(DatasetMetadata metadata,
                    std::vector<Transition> transitions);

  const DatasetMetadata& metadata() const { return metadata_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& operator[](std::size_t i) const { return transitions_[i]; }
  std::size_t size() const { return transitions_.size(); }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  // FNV-1a over every stored double and flag, in order.
  std::uint64_t ContentHash() const;

 private:
  DatasetMetadata metadata_;
  std::vector<Transition> transitions_;
  int state_dim_ = 0;
  int action_dim_ = 0;
};

// Column-major minibatch, one transition per column.
struct Batch {
  Matrix states;
  Matrix actions;
  Vector rewards;
  Matrix next_states;
  Vector dones;

  Eigen::Index size() const { return states.cols(); }
};

// k indices uniform with replacement; 1 <= k <= dataset size.
std::vector<std::size_t> SampleIndices(const TransitionDataset& dataset,
                                       std::size_t k, Rng& rng);
std::vector<Transition> SampleMinibatch(const TransitionDataset& dataset,
                                        std::size_t k, Rng& rng);
Batch GatherBatch(const TransitionDataset& dataset,
                  const std::vector<std::size_t>& indices);
Batch GatherTransitions(const std::vector<Transition>& transitions,
                        const std::vector<std::size_t>& indices);
Batch SampleBatch(const TransitionDataset& dataset, std::size_t k, Rng& rng);
// Every state of the dataset as the columns of one matrix.
Matrix StateMatrix(const TransitionDataset& dataset);
Matrix ActionMatrix(const TransitionDataset& dataset);

struct GeneratorOptions {
  // kRandom: actions uniform on [-range, range]^d.
  double random_action_range = 1.0;
  // Gaussian exploration noise on the scripted expert and the medium policy.
  double expert_noise = 0.03;
  double medium_noise = 0.1;
  // The online run stops once its evaluation return reaches this fraction of
  // the way from the random to the expert reference return.
  double medium_fraction = 0.5;
  // kMediumReplay keeps at most this fraction of `size` transitions, taken
  // from the end of the online run's buffer.
  double replay_fraction = 0.2;
  // Step budget for the online run behind the medium datasets.
  int online_max_steps = 30000;
  // kCustom recipes.
  //   "bimodal": every action coordinate is +-bimodal_center plus
  //     N(0, bimodal_width) noise, signs equally likely.
  //   "mixed": kRandom rollouts followed by kExpert rollouts making up
  //     mixed_expert_fraction of the transitions.
  std::string custom_recipe = "bimodal";
  double bimodal_center = 0.4;
  double bimodal_width = 0.02;
  double mixed_expert_fraction = 0.25;
};

// (env, kind, size, seed, options) fully determine the result.
TransitionDataset GenerateDataset(const ToyEnv& env, GeneratorKind kind,
                                  std::size_t size, std::uint64_t seed,
                                  const GeneratorOptions& options = {});

// JSONL, one {"s","a","r","s2","done"} object per line, plus the metadata
// sidecar at SidecarPath(path).
std::filesystem::path SidecarPath(const std::filesystem::path& path);
void SaveDataset(const TransitionDataset& dataset,
                 const std::filesystem::path& path);
TransitionDataset LoadDataset(const std::filesystem::path& path);

}  // namespace plas

#endif  // PLAS_DATASET_H_
