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

#ifndef PLAS_ONLINE_H_
#define PLAS_ONLINE_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "plas/actor_critic.h"
#include "plas/envs.h"

namespace plas {

// Online twin-critic actor-critic with Gaussian exploration. Produces the
// medium policy and the replay buffer behind the medium datasets.
struct OnlineConfig {
  AgentConfig agent = [] {
    AgentConfig c;
    c.actor_lr = 1e-3;
    return c;
  }();
  int max_steps = 30000;
  int start_steps = 1000;
  double exploration_noise = 0.2;
  int batch_size = 100;
  int eval_interval = 1000;
  int eval_episodes = 5;
  // Training stops at the first evaluation reaching this return.
  double stop_return = std::numeric_limits<double>::infinity();
};

struct OnlineResult {
  ActorCriticAgent agent;
  std::vector<Transition> buffer;
  double last_eval_return = 0.0;
  bool reached_stop_return = false;
  std::int64_t env_steps = 0;
};

OnlineResult TrainOnline(const ToyEnv& env, const OnlineConfig& config,
                         std::uint64_t seed);

struct ReferenceScores {
  double random_ref = 0.0;
  double expert_ref = 0.0;
};

inline constexpr int kReferenceEpisodes = 100;
inline constexpr std::uint64_t kReferenceSeed = 0;

// Uniform-random and scripted-expert returns over fixed evaluation resets.
ReferenceScores ComputeReferenceScores(const ToyEnv& env,
                                       int episodes = kReferenceEpisodes,
                                       std::uint64_t seed = kReferenceSeed);

}  // namespace plas

#endif  // PLAS_ONLINE_H_
