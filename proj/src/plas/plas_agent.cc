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

#include "plas/plas_agent.h"

#include "plas/errors.h"

namespace plas {

PlasAgent MakePlasAgent(const AgentConfig& config,
                        std::shared_ptr<const BehaviorCvae> cvae,
                        std::uint64_t seed) {
  return ActorCriticAgent::MakeLatent(config, std::move(cvae), seed);
}

AgentTrainResult TrainPlas(const TransitionDataset& dataset,
                           std::shared_ptr<const BehaviorCvae> cvae,
                           const AgentConfig& agent_config,
                           const TrainConfig& train_config,
                           const ToyEnv* eval_env, std::uint64_t seed,
                           const LogSink& sink) {
  if (!cvae) throw ValueError("PLAS needs a trained CVAE");
  if (cvae->state_dim != dataset.state_dim() ||
      cvae->action_dim != dataset.action_dim()) {
    throw ShapeError("CVAE dimensions do not match the dataset");
  }
  AgentTrainResult result{MakePlasAgent(agent_config, std::move(cvae), seed),
                          {}};
  TrainConfig config = train_config;
  config.fatal_on_nonfinite = true;
  result.log =
      TrainActorCritic(result.agent, dataset, config, eval_env, seed, sink);
  return result;
}

}  // namespace plas
