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

#include "plas/online.h"

#include <memory>

#include "plas/dataset.h"
#include "plas/errors.h"

namespace plas {

OnlineResult TrainOnline(const ToyEnv& env, const OnlineConfig& config,
                         std::uint64_t seed) {
  if (config.max_steps <= 0 || config.batch_size <= 0 ||
      config.eval_interval <= 0 || config.eval_episodes <= 0) {
    throw ValueError("online training sizes must be positive");
  }
  OnlineResult result{ActorCriticAgent::MakeDirect(config.agent,
                                                   env.state_dim(),
                                                   env.action_dim(), seed),
                      {}, 0.0, false, 0};
  ActorCriticAgent& agent = result.agent;
  Rng env_rng = MakeRng(seed, "online/env");
  Rng noise_rng = MakeRng(seed, "online/noise");
  Rng batch_rng = MakeRng(seed, "online/batch");
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, config.exploration_noise);
  const std::uint64_t eval_seed = DeriveSeed(seed, "online/eval");
  const PolicyFn greedy = [&agent](const Vector& s) { return agent.Act(s); };

  Vector state = env.Reset(env_rng);
  int episode_steps = 0;
  for (std::int64_t t = 1; t <= config.max_steps; ++t) {
    Vector action(env.action_dim());
    if (t <= config.start_steps) {
      for (int i = 0; i < action.size(); ++i) action(i) = uniform(noise_rng);
    } else {
      action = agent.Act(state);
      for (int i = 0; i < action.size(); ++i) action(i) += noise(noise_rng);
      action = action.cwiseMax(-1.0).cwiseMin(1.0);
    }
    StepResult step = env.Step(state, action);
    result.buffer.push_back(
        {state, action, step.reward, step.next_state, step.done});
    ++episode_steps;
    if (step.done || episode_steps >= env.horizon()) {
      state = env.Reset(env_rng);
      episode_steps = 0;
    } else {
      state = std::move(step.next_state);
    }
    result.env_steps = t;

    if (t > config.start_steps) {
      std::uniform_int_distribution<std::size_t> pick(
          0, result.buffer.size() - 1);
      std::vector<std::size_t> idx(config.batch_size);
      for (auto& i : idx) i = pick(batch_rng);
      const Batch batch = GatherTransitions(result.buffer, idx);
      agent.CriticUpdate(batch);
      agent.ActorUpdate(batch.states);
      agent.UpdateTargets();
    }
    if (t > config.start_steps && t % config.eval_interval == 0) {
      result.last_eval_return =
          EvaluatePolicy(env, greedy, config.eval_episodes, eval_seed).mean;
      if (result.last_eval_return >= config.stop_return) {
        result.reached_stop_return = true;
        break;
      }
    }
  }
  return result;
}

ReferenceScores ComputeReferenceScores(const ToyEnv& env, int episodes,
                                       std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(MakeRng(seed, "reference/random"));
  const int dim = env.action_dim();
  const PolicyFn random = [rng, dim](const Vector&) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector a(dim);
    for (int i = 0; i < dim; ++i) a(i) = u(*rng);
    return a;
  };
  const PolicyFn expert = [&env](const Vector& s) {
    return env.ExpertAction(s);
  };
  ReferenceScores scores;
  scores.random_ref = EvaluatePolicy(env, random, episodes, seed).mean;
  scores.expert_ref = EvaluatePolicy(env, expert, episodes, seed).mean;
  return scores;
}

}  // namespace plas
