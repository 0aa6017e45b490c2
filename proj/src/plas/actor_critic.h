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

#ifndef PLAS_ACTOR_CRITIC_H_
#define PLAS_ACTOR_CRITIC_H_

// Twin-critic deterministic actor-critic shared by the latent-space policy
// and the unconstrained baseline. Both go through the same critic, target
// and optimizer code; only the actor parameterisation differs:
//
//   kLatent: a = clip(D(s, sigma * tanh(f(s))) + eps * tanh(g(s, D)), -1, 1)
//            with the perturbation term present only when a head exists and
//            D the frozen CVAE decoder.
//   kDirect: a = tanh(f(s)).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/diffnet.h"
#include "plas/envs.h"
#include "plas/serialize.h"

namespace plas {

enum class PolicyKind { kLatent, kDirect };
enum class ActorObjective { kQ1, kSoftMix };

std::string PolicyKindName(PolicyKind kind);
PolicyKind ParsePolicyKind(const std::string& name);
std::string ActorObjectiveName(ActorObjective objective);
ActorObjective ParseActorObjective(const std::string& name);

struct AgentConfig {
  std::vector<int> actor_hidden = {64, 64};
  std::vector<int> critic_hidden = {64, 64};
  std::vector<int> perturbation_hidden = {64, 64};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  double lambda = 1.0;
  double tau = 0.005;
  double max_latent_action = 2.0;
  // Perturbation bound; 0 means the latent policy alone, without a head.
  double epsilon = 0.0;
  ActorObjective actor_objective = ActorObjective::kQ1;
  // Bootstrap actions come from the target actor (true) or the online one.
  bool target_actor_for_bootstrap = true;

  void Validate() const;
};

struct LatentActor {
  MlpParams net;  // state -> latent, tanh output
  double max_latent_action = 2.0;
};

struct PerturbationHead {
  MlpParams net;  // (state, decoded action) -> residual direction, tanh output
  double epsilon = 0.0;
};

struct CriticPair {
  MlpParams q1, q2;
  MlpParams q1_target, q2_target;
  double lambda = 1.0;
  double gamma = 0.99;
};

// lambda * min(q1, q2) + (1 - lambda) * max(q1, q2)
double SoftClippedValue(double q1, double q2, double lambda);
// reward + gamma * (1 - done) * SoftClippedValue(q1_target, q2_target).
double ComputeTarget(double lambda, double gamma, double reward,
                     double q1_target, double q2_target, bool done);

// Mean squared error of critic `q` against `targets` with its gradient
// accumulated into `grads` (if non-null).
double CriticLoss(const MlpParams& q, const Matrix& states,
                  const Matrix& actions, const Vector& targets,
                  Gradients* grads);

// Maps proposed actions (columns) at the given states to replacement
// actions; used by the nearest-neighbour diagnostic mode of the baseline.
using ActionProjection =
    std::function<Matrix(const Matrix& states, const Matrix& actions)>;

class ActorCriticAgent {
 public:
  static ActorCriticAgent MakeLatent(const AgentConfig& config,
                                     std::shared_ptr<const BehaviorCvae> cvae,
                                     std::uint64_t seed);
  static ActorCriticAgent MakeDirect(const AgentConfig& config, int state_dim,
                                     int action_dim, std::uint64_t seed);

  PolicyKind kind() const { return kind_; }
  const AgentConfig& config() const { return config_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  bool has_perturbation() const { return perturbation_.has_value(); }

  // Policy evaluation; deterministic and read-only.
  Matrix Act(const Matrix& states) const;
  Vector Act(const Vector& state) const;
  Matrix ActTarget(const Matrix& states) const;
  // Latent policy only: sigma * tanh(f(s)).
  Matrix LatentActions(const Matrix& states) const;
  // Latent policy only: decoder output before the perturbation head.
  Matrix DecodedActions(const Matrix& states) const;
  // Acting with the perturbation head bypassed.
  Matrix ActWithoutPerturbation(const Matrix& states) const;
  // Q1 of the online critic.
  Vector QValues(const Matrix& states, const Matrix& actions) const;

  // r + gamma (1 - done) y for each column of the batch.
  Vector BootstrapTargets(const Batch& batch) const;

  // One Adam step on each critic against the shared targets. Returns the
  // mean of the two critics' squared TD errors. Throws NumericError on a
  // non-finite loss or gradient, leaving the parameters untouched.
  double CriticUpdate(const Batch& batch);
  // One Adam step on the actor (and head) ascending the actor objective.
  // Returns the batch-mean objective value before the step.
  double ActorUpdate(const Matrix& states);
  void UpdateTargets();

  // Objective value and the gradients of its negation (the loss that the
  // actor descends). Either gradient pointer may be null.
  double ActorObjectiveGrad(const Matrix& states, Gradients* actor_grads,
                            Gradients* perturbation_grads) const;

  const MlpParams& actor_net() const { return actor_; }
  const MlpParams& actor_target_net() const { return actor_target_; }
  const std::optional<PerturbationHead>& perturbation() const {
    return perturbation_;
  }
  const CriticPair& critics() const { return critics_; }
  const BehaviorCvae* cvae() const { return cvae_.get(); }
  std::shared_ptr<const BehaviorCvae> shared_cvae() const { return cvae_; }
  std::int64_t updates() const { return updates_; }

  // When set, acting and bootstrapping route the policy's actions through
  // `projection`; the actor gradient still flows through the raw actions.
  // Not serialized.
  void set_action_projection(ActionProjection projection) {
    projection_ = std::move(projection);
  }

  // Test hooks.
  MlpParams& mutable_actor_net() { return actor_; }
  CriticPair& mutable_critics() { return critics_; }
  std::optional<PerturbationHead>& mutable_perturbation() {
    return perturbation_;
  }

  // Networks, targets, optimizer moments and the CVAE hash. The CVAE itself
  // is stored separately and re-attached on load.
  Json ToJson() const;
  static ActorCriticAgent FromJson(const Json& json,
                                   std::shared_ptr<const BehaviorCvae> cvae);

 private:
  ActorCriticAgent() = default;

  struct PolicyPass;
  PolicyPass ForwardPolicy(const Matrix& states, bool keep_cache) const;
  Matrix PolicyForward(const MlpParams& actor,
                       const std::optional<PerturbationHead>& head,
                       const Matrix& states) const;
  void BackwardPolicy(const PolicyPass& pass, const Matrix& action_grad,
                      Gradients* actor_grads,
                      Gradients* perturbation_grads) const;

  PolicyKind kind_ = PolicyKind::kDirect;
  AgentConfig config_;
  int state_dim_ = 0;
  int action_dim_ = 0;
  std::shared_ptr<const BehaviorCvae> cvae_;
  MlpParams actor_;
  MlpParams actor_target_;
  std::optional<PerturbationHead> perturbation_;
  std::optional<PerturbationHead> perturbation_target_;
  CriticPair critics_;
  AdamState actor_opt_;
  std::optional<AdamState> perturbation_opt_;
  AdamState q1_opt_;
  AdamState q2_opt_;
  std::int64_t updates_ = 0;
  ActionProjection projection_;
};

struct TrainConfig {
  int steps = 50000;
  int batch_size = 100;
  int log_interval = 500;
  int eval_interval = 5000;
  int eval_episodes = 10;
  // The unconstrained baseline keeps going past non-finite updates.
  bool fatal_on_nonfinite = true;
};

struct LogEntry {
  std::int64_t step = 0;
  double critic_loss = 0.0;
  double mean_q = 0.0;
  std::optional<double> eval_return_mean;
  std::optional<double> eval_return_std;
  // Skipped non-finite updates so far in this training call; not serialized.
  std::int64_t nonfinite_updates = 0;
};

struct TrainLog {
  std::vector<LogEntry> entries;
  std::int64_t nonfinite_updates = 0;
};

Json LogEntryToJson(const LogEntry& entry);
LogEntry LogEntryFromJson(const Json& json);

using LogSink = std::function<void(const LogEntry&)>;

// Reported losses are capped here so a diverging baseline still logs finite
// numbers.
inline constexpr double kLossReportCap = 1e12;

// Offline loop: per step sample k transitions, update both critics, update
// the actor, soft-update all targets. Minibatch indices for step t depend
// only on (seed, t), so a run resumed at `start_step` from a checkpoint of
// the agent replays the uninterrupted run exactly.
TrainLog TrainActorCritic(ActorCriticAgent& agent,
                          const TransitionDataset& dataset,
                          const TrainConfig& config, const ToyEnv* eval_env,
                          std::uint64_t seed, const LogSink& sink = {},
                          std::int64_t start_step = 0);

}  // namespace plas

#endif  // PLAS_ACTOR_CRITIC_H_
