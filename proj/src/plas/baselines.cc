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

#include "plas/baselines.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "plas/diagnostics.h"
#include "plas/errors.h"

namespace plas {

void BcConfig::Validate() const {
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("bc.hidden", "sizes must be positive");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("bc.lr", "must be > 0");
  }
  if (batch_size <= 0) throw ConfigError("bc.batch_size", "must be > 0");
  if (steps <= 0) throw ConfigError("bc.steps", "must be > 0");
  if (log_interval <= 0) throw ConfigError("bc.log_interval", "must be > 0");
}

Vector BcPolicy::Act(const Vector& state) const {
  return MlpForward(net, state);
}

Matrix BcPolicy::Act(const Matrix& states) const {
  return MlpForwardBatch(net, states);
}

double BcLoss(const BcPolicy& policy, const Matrix& states,
              const Matrix& actions, Gradients* grads) {
  ForwardCache cache;
  const Matrix out = MlpForwardBatch(policy.net, states, &cache);
  if (out.rows() != actions.rows() || out.cols() != actions.cols()) {
    throw ShapeError("behaviour cloning: action batch shape mismatch");
  }
  const Matrix diff = out - actions;
  const double n = static_cast<double>(diff.size());
  if (grads != nullptr) {
    MlpBackwardBatch(policy.net, cache, (2.0 / n) * diff, grads);
  }
  return diff.squaredNorm() / n;
}

BcTrainResult TrainBc(const TransitionDataset& dataset, const BcConfig& config,
                      std::uint64_t seed, const BcSink& sink) {
  config.Validate();
  std::vector<int> sizes{dataset.state_dim()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(dataset.action_dim());
  Rng init = MakeRng(seed, "bc/init");
  BcTrainResult result;
  result.policy.net =
      MakeMlp(sizes, Activation::kRelu, Activation::kTanh, init);
  AdamOptions adam;
  adam.learning_rate = config.learning_rate;
  AdamState opt = AdamState::For(result.policy.net, adam);
  Gradients grads = Gradients::ZerosLike(result.policy.net);
  Rng batch_rng = MakeRng(seed, "bc/batch");
  const std::size_t k =
      std::min<std::size_t>(config.batch_size, dataset.size());

  double sum = 0.0;
  int count = 0;
  for (std::int64_t step = 1; step <= config.steps; ++step) {
    const Batch batch = SampleBatch(dataset, k, batch_rng);
    grads.SetZero();
    const double loss = BcLoss(result.policy, batch.states, batch.actions,
                               &grads);
    if (!std::isfinite(loss) || !grads.AllFinite()) {
      throw NumericError("behaviour cloning step " + std::to_string(step) +
                         ": non-finite loss");
    }
    AdamStep(result.policy.net, grads, opt);
    sum += loss;
    ++count;
    if (step % config.log_interval == 0 || step == config.steps) {
      BcLogEntry entry{step, sum / count};
      result.log.push_back(entry);
      if (sink) sink(entry);
      sum = 0.0;
      count = 0;
    }
  }
  return result;
}

Json BcToJson(const BcPolicy& policy) { return {{"net", MlpToJson(policy.net)}}; }

BcPolicy BcFromJson(const Json& json) {
  BcPolicy policy;
  try {
    policy.net = MlpFromJson(json.at("net"));
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed behaviour cloning record: ") +
                  e.what());
  }
  return policy;
}

AgentTrainResult TrainUnconstrained(const TransitionDataset& dataset,
                                    const AgentConfig& agent_config,
                                    const TrainConfig& train_config,
                                    const ToyEnv* eval_env, std::uint64_t seed,
                                    const LogSink& sink,
                                    const UnconstrainedOptions& options) {
  AgentTrainResult result{
      ActorCriticAgent::MakeDirect(agent_config, dataset.state_dim(),
                                   dataset.action_dim(), seed),
      {}};
  if (options.project_to_dataset) {
    auto index = std::make_shared<const SupportIndex>(
        dataset, options.projection_neighbours);
    result.agent.set_action_projection(
        [index](const Matrix& states, const Matrix& actions) {
          return index->Project(states, actions);
        });
  }
  TrainConfig config = train_config;
  config.fatal_on_nonfinite = false;
  result.log =
      TrainActorCritic(result.agent, dataset, config, eval_env, seed, sink);
  return result;
}

}  // namespace plas
