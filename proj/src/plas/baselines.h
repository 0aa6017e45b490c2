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

#ifndef PLAS_BASELINES_H_
#define PLAS_BASELINES_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "plas/actor_critic.h"
#include "plas/dataset.h"
#include "plas/plas_agent.h"
#include "plas/serialize.h"

namespace plas {

struct BcConfig {
  std::vector<int> hidden = {64, 64};
  double learning_rate = 1e-3;
  int batch_size = 100;
  int steps = 10000;
  int log_interval = 500;
  void Validate() const;
};

struct BcPolicy {
  MlpParams net;  // state -> action, tanh output

  Vector Act(const Vector& state) const;
  Matrix Act(const Matrix& states) const;
};

struct BcLogEntry {
  std::int64_t step = 0;
  double loss = 0.0;  // interval mean of the minibatch MSE
};

struct BcTrainResult {
  BcPolicy policy;
  std::vector<BcLogEntry> log;
};

using BcSink = std::function<void(const BcLogEntry&)>;

// Mean over all action entries of (net(s) - a)^2.
double BcLoss(const BcPolicy& policy, const Matrix& states,
              const Matrix& actions, Gradients* grads);

BcTrainResult TrainBc(const TransitionDataset& dataset, const BcConfig& config,
                      std::uint64_t seed, const BcSink& sink = {});

Json BcToJson(const BcPolicy& policy);
BcPolicy BcFromJson(const Json& json);

struct UnconstrainedOptions {
  // Diagnostic mode: act and bootstrap with the nearest dataset action.
  bool project_to_dataset = false;
  int projection_neighbours = 10;
};

// Twin-critic deterministic actor-critic directly in action space, trained on
// the fixed dataset with no behaviour constraint. Non-finite updates are
// counted and skipped instead of aborting.
AgentTrainResult TrainUnconstrained(const TransitionDataset& dataset,
                                    const AgentConfig& agent_config,
                                    const TrainConfig& train_config,
                                    const ToyEnv* eval_env, std::uint64_t seed,
                                    const LogSink& sink = {},
                                    const UnconstrainedOptions& options = {});

}  // namespace plas

#endif  // PLAS_BASELINES_H_
