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

#ifndef PLAS_PLAS_AGENT_H_
#define PLAS_PLAS_AGENT_H_

#include <cstdint>
#include <memory>

#include "plas/actor_critic.h"
#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/envs.h"

namespace plas {

// A latent policy over a frozen CVAE decoder, with twin critics.
using PlasAgent = ActorCriticAgent;

PlasAgent MakePlasAgent(const AgentConfig& config,
                        std::shared_ptr<const BehaviorCvae> cvae,
                        std::uint64_t seed);

struct AgentTrainResult {
  ActorCriticAgent agent;
  TrainLog log;
};

AgentTrainResult TrainPlas(const TransitionDataset& dataset,
                           std::shared_ptr<const BehaviorCvae> cvae,
                           const AgentConfig& agent_config,
                           const TrainConfig& train_config,
                           const ToyEnv* eval_env, std::uint64_t seed,
                           const LogSink& sink = {});

}  // namespace plas

#endif  // PLAS_PLAS_AGENT_H_
