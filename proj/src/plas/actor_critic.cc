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

#include "plas/actor_critic.h"

#include <algorithm>
#include <cmath>

#include "plas/errors.h"

namespace plas {
namespace {

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

AdamOptions Adam(double lr) {
  AdamOptions o;
  o.learning_rate = lr;
  return o;
}

// d clip(x, -1, 1) / dx, taken as 1 on the closed interval.
Matrix ClipMask(const Matrix& pre_clip) {
  return (pre_clip.array().abs() <= 1.0).cast<double>().matrix();
}

CriticPair MakeCritics(const AgentConfig& config, int state_dim,
                       int action_dim, std::uint64_t seed) {
  const auto sizes = Sizes(state_dim + action_dim, config.critic_hidden, 1);
  Rng rng1 = MakeRng(seed, "critic1");
  Rng rng2 = MakeRng(seed, "critic2");
  CriticPair critics;
  critics.q1 = MakeMlp(sizes, Activation::kRelu, Activation::kIdentity, rng1);
  critics.q2 = MakeMlp(sizes, Activation::kRelu, Activation::kIdentity, rng2);
  critics.q1_target = critics.q1;
  critics.q2_target = critics.q2;
  critics.lambda = config.lambda;
  critics.gamma = config.gamma;
  return critics;
}

}  // namespace

std::string PolicyKindName(PolicyKind kind) {
  return kind == PolicyKind::kLatent ? "latent" : "direct";
}

PolicyKind ParsePolicyKind(const std::string& name) {
  if (name == "latent") return PolicyKind::kLatent;
  if (name == "direct") return PolicyKind::kDirect;
  throw ValueError("unknown policy kind '" + name + "'");
}

std::string ActorObjectiveName(ActorObjective objective) {
  return objective == ActorObjective::kQ1 ? "q1" : "soft-mix";
}

ActorObjective ParseActorObjective(const std::string& name) {
  if (name == "q1") return ActorObjective::kQ1;
  if (name == "soft-mix") return ActorObjective::kSoftMix;
  throw ValueError("unknown actor objective '" + name + "'");
}

void AgentConfig::Validate() const {
  auto check_hidden = [](const std::vector<int>& hidden, const char* field) {
    for (int h : hidden) {
      if (h <= 0) throw ConfigError(field, "sizes must be positive");
    }
  };
  check_hidden(actor_hidden, "agent.actor_hidden");
  check_hidden(critic_hidden, "agent.critic_hidden");
  check_hidden(perturbation_hidden, "agent.perturbation_hidden");
  if (!(actor_lr > 0.0)) throw ConfigError("agent.actor_lr", "must be > 0");
  if (!(critic_lr > 0.0)) throw ConfigError("agent.critic_lr", "must be > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("agent.gamma", "must lie in [0, 1)");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("agent.lambda", "must lie in [0, 1]");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw ConfigError("agent.tau", "must lie in (0, 1]");
  }
  if (!(max_latent_action > 0.0)) {
    throw ConfigError("agent.max_latent_action", "must be > 0");
  }
  if (!(epsilon >= 0.0)) throw ConfigError("agent.epsilon", "must be >= 0");
}

double SoftClippedValue(double q1, double q2, double lambda) {
  return lambda * std::min(q1, q2) + (1.0 - lambda) * std::max(q1, q2);
}

double ComputeTarget(double lambda, double gamma, double reward,
                     double q1_target, double q2_target, bool done) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValueError("lambda must lie in [0, 1]");
  }
  if (done) return reward;
  return reward + gamma * SoftClippedValue(q1_target, q2_target, lambda);
}

double CriticLoss(const MlpParams& q, const Matrix& states,
                  const Matrix& actions, const Vector& targets,
                  Gradients* grads) {
  if (targets.size() != states.cols()) {
    throw ShapeError("critic loss: target count does not match the batch");
  }
  ForwardCache cache;
  const Matrix values = MlpForwardBatch(q, ConcatRows(states, actions), &cache);
  const Matrix diff = values - targets.transpose();
  const double n = static_cast<double>(targets.size());
  if (grads != nullptr) {
    MlpBackwardBatch(q, cache, (2.0 / n) * diff, grads);
  }
  return diff.squaredNorm() / n;
}

struct ActorCriticAgent::PolicyPass {
  Matrix states;
  ForwardCache actor_cache;
  ForwardCache decoder_cache;
  ForwardCache head_cache;
  Matrix decoded;
  Matrix pre_clip;
  Matrix actions;
};

ActorCriticAgent ActorCriticAgent::MakeLatent(
    const AgentConfig& config, std::shared_ptr<const BehaviorCvae> cvae,
    std::uint64_t seed) {
  config.Validate();
  if (!cvae) throw ValueError("latent policy needs a trained CVAE");
  ActorCriticAgent agent;
  agent.kind_ = PolicyKind::kLatent;
  agent.config_ = config;
  agent.state_dim_ = cvae->state_dim;
  agent.action_dim_ = cvae->action_dim;
  agent.cvae_ = std::move(cvae);
  Rng actor_rng = MakeRng(seed, "actor");
  agent.actor_ = MakeMlp(
      Sizes(agent.state_dim_, config.actor_hidden, agent.cvae_->latent_dim),
      Activation::kRelu, Activation::kTanh, actor_rng);
  agent.actor_target_ = agent.actor_;
  if (config.epsilon > 0.0) {
    Rng head_rng = MakeRng(seed, "perturbation");
    PerturbationHead head;
    head.net = MakeMlp(Sizes(agent.state_dim_ + agent.action_dim_,
                             config.perturbation_hidden, agent.action_dim_),
                       Activation::kRelu, Activation::kTanh, head_rng);
    head.epsilon = config.epsilon;
    agent.perturbation_ = head;
    agent.perturbation_target_ = head;
    agent.perturbation_opt_ = AdamState::For(head.net, Adam(config.actor_lr));
  }
  agent.critics_ =
      MakeCritics(config, agent.state_dim_, agent.action_dim_, seed);
  agent.actor_opt_ = AdamState::For(agent.actor_, Adam(config.actor_lr));
  agent.q1_opt_ = AdamState::For(agent.critics_.q1, Adam(config.critic_lr));
  agent.q2_opt_ = AdamState::For(agent.critics_.q2, Adam(config.critic_lr));
  return agent;
}

ActorCriticAgent ActorCriticAgent::MakeDirect(const AgentConfig& config,
                                              int state_dim, int action_dim,
                                              std::uint64_t seed) {
  config.Validate();
  if (state_dim <= 0 || action_dim <= 0) {
    throw ShapeError("state and action dimensions must be positive");
  }
  ActorCriticAgent agent;
  agent.kind_ = PolicyKind::kDirect;
  agent.config_ = config;
  agent.config_.epsilon = 0.0;
  agent.state_dim_ = state_dim;
  agent.action_dim_ = action_dim;
  Rng actor_rng = MakeRng(seed, "actor");
  agent.actor_ = MakeMlp(Sizes(state_dim, config.actor_hidden, action_dim),
                         Activation::kRelu, Activation::kTanh, actor_rng);
  agent.actor_target_ = agent.actor_;
  agent.critics_ = MakeCritics(config, state_dim, action_dim, seed);
  agent.actor_opt_ = AdamState::For(agent.actor_, Adam(config.actor_lr));
  agent.q1_opt_ = AdamState::For(agent.critics_.q1, Adam(config.critic_lr));
  agent.q2_opt_ = AdamState::For(agent.critics_.q2, Adam(config.critic_lr));
  return agent;
}

Matrix ActorCriticAgent::PolicyForward(
    const MlpParams& actor, const std::optional<PerturbationHead>& head,
    const Matrix& states) const {
  if (states.rows() != state_dim_) {
    throw ShapeError("policy: state batch has " +
                     std::to_string(states.rows()) + " rows, expected " +
                     std::to_string(state_dim_));
  }
  const Matrix out = MlpForwardBatch(actor, states);
  if (kind_ == PolicyKind::kDirect) return out;
  const Matrix decoded =
      Decode(*cvae_, states, config_.max_latent_action * out);
  if (!head) return decoded;
  const Matrix residual =
      head->epsilon * MlpForwardBatch(head->net, ConcatRows(states, decoded));
  return (decoded + residual).cwiseMax(-1.0).cwiseMin(1.0);
}

ActorCriticAgent::PolicyPass ActorCriticAgent::ForwardPolicy(
    const Matrix& states, bool keep_cache) const {
  if (states.rows() != state_dim_) {
    throw ShapeError("policy: state batch has " +
                     std::to_string(states.rows()) + " rows, expected " +
                     std::to_string(state_dim_));
  }
  PolicyPass pass;
  pass.states = states;
  ForwardCache* actor_cache = keep_cache ? &pass.actor_cache : nullptr;
  const Matrix out = MlpForwardBatch(actor_, states, actor_cache);
  if (kind_ == PolicyKind::kDirect) {
    pass.actions = out;
    return pass;
  }
  pass.decoded = Decode(*cvae_, states, config_.max_latent_action * out,
                        keep_cache ? &pass.decoder_cache : nullptr);
  if (!perturbation_) {
    pass.actions = pass.decoded;
    return pass;
  }
  const Matrix residual =
      perturbation_->epsilon *
      MlpForwardBatch(perturbation_->net, ConcatRows(states, pass.decoded),
                      keep_cache ? &pass.head_cache : nullptr);
  pass.pre_clip = pass.decoded + residual;
  pass.actions = pass.pre_clip.cwiseMax(-1.0).cwiseMin(1.0);
  return pass;
}

void ActorCriticAgent::BackwardPolicy(const PolicyPass& pass,
                                      const Matrix& action_grad,
                                      Gradients* actor_grads,
                                      Gradients* perturbation_grads) const {
  if (kind_ == PolicyKind::kDirect) {
    MlpBackwardBatch(actor_, pass.actor_cache, action_grad, actor_grads);
    return;
  }
  Matrix decoded_grad = action_grad;
  if (perturbation_) {
    const Matrix through_clip =
        action_grad.cwiseProduct(ClipMask(pass.pre_clip));
    const Matrix head_input_grad = MlpBackwardBatch(
        perturbation_->net, pass.head_cache,
        perturbation_->epsilon * through_clip, perturbation_grads);
    decoded_grad = through_clip + head_input_grad.bottomRows(action_dim_);
  }
  const Matrix latent_grad =
      DecodeLatentGrad(*cvae_, pass.decoder_cache, decoded_grad);
  MlpBackwardBatch(actor_, pass.actor_cache,
                   config_.max_latent_action * latent_grad, actor_grads);
}

Matrix ActorCriticAgent::Act(const Matrix& states) const {
  Matrix actions = PolicyForward(actor_, perturbation_, states);
  return projection_ ? projection_(states, actions) : actions;
}

Vector ActorCriticAgent::Act(const Vector& state) const {
  return Act(Matrix(state));
}

Matrix ActorCriticAgent::ActTarget(const Matrix& states) const {
  Matrix actions = PolicyForward(actor_target_, perturbation_target_, states);
  return projection_ ? projection_(states, actions) : actions;
}

Matrix ActorCriticAgent::LatentActions(const Matrix& states) const {
  if (kind_ != PolicyKind::kLatent) {
    throw ValueError("latent actions exist only for the latent policy");
  }
  return config_.max_latent_action * MlpForwardBatch(actor_, states);
}

Matrix ActorCriticAgent::DecodedActions(const Matrix& states) const {
  return Decode(*cvae_, states, LatentActions(states));
}

Matrix ActorCriticAgent::ActWithoutPerturbation(const Matrix& states) const {
  return PolicyForward(actor_, std::nullopt, states);
}

Vector ActorCriticAgent::QValues(const Matrix& states,
                                 const Matrix& actions) const {
  return MlpForwardBatch(critics_.q1, ConcatRows(states, actions))
      .row(0)
      .transpose();
}

Vector ActorCriticAgent::BootstrapTargets(const Batch& batch) const {
  const Matrix next_actions = config_.target_actor_for_bootstrap
                                  ? ActTarget(batch.next_states)
                                  : Act(batch.next_states);
  const Matrix input = ConcatRows(batch.next_states, next_actions);
  const Matrix q1 = MlpForwardBatch(critics_.q1_target, input);
  const Matrix q2 = MlpForwardBatch(critics_.q2_target, input);
  Vector targets(batch.size());
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    targets(i) = ComputeTarget(critics_.lambda, critics_.gamma,
                               batch.rewards(i), q1(0, i), q2(0, i),
                               batch.dones(i) != 0.0);
  }
  return targets;
}

double ActorCriticAgent::CriticUpdate(const Batch& batch) {
  if (batch.size() == 0) throw ValueError("critic update on an empty batch");
  const Vector targets = BootstrapTargets(batch);
  Gradients g1 = Gradients::ZerosLike(critics_.q1);
  Gradients g2 = Gradients::ZerosLike(critics_.q2);
  const double loss1 =
      CriticLoss(critics_.q1, batch.states, batch.actions, targets, &g1);
  const double loss2 =
      CriticLoss(critics_.q2, batch.states, batch.actions, targets, &g2);
  const double loss = 0.5 * (loss1 + loss2);
  if (!std::isfinite(loss) || !g1.AllFinite() || !g2.AllFinite()) {
    throw NumericError("critic update: non-finite loss or gradient");
  }
  AdamStep(critics_.q1, g1, q1_opt_);
  AdamStep(critics_.q2, g2, q2_opt_);
  return loss;
}

double ActorCriticAgent::ActorObjectiveGrad(
    const Matrix& states, Gradients* actor_grads,
    Gradients* perturbation_grads) const {
  const bool want_grads = actor_grads != nullptr || perturbation_grads != nullptr;
  const PolicyPass pass = ForwardPolicy(states, want_grads);
  const Matrix input = ConcatRows(states, pass.actions);
  const double n = static_cast<double>(states.cols());

  ForwardCache c1, c2;
  const Matrix q1 = MlpForwardBatch(critics_.q1, input, &c1);
  if (config_.actor_objective == ActorObjective::kQ1) {
    const double value = q1.sum() / n;
    if (!want_grads) return value;
    const Matrix d_input = MlpBackwardBatch(
        critics_.q1, c1, Matrix::Constant(1, states.cols(), -1.0 / n), nullptr);
    BackwardPolicy(pass, d_input.bottomRows(action_dim_), actor_grads,
                   perturbation_grads);
    return value;
  }

  const Matrix q2 = MlpForwardBatch(critics_.q2, input, &c2);
  const double lambda = critics_.lambda;
  Matrix w1(1, states.cols()), w2(1, states.cols());
  double value = 0.0;
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    const bool first_is_min = q1(0, i) <= q2(0, i);
    w1(0, i) = first_is_min ? lambda : 1.0 - lambda;
    w2(0, i) = first_is_min ? 1.0 - lambda : lambda;
    value += w1(0, i) * q1(0, i) + w2(0, i) * q2(0, i);
  }
  value /= n;
  if (!want_grads) return value;
  const Matrix d1 = MlpBackwardBatch(critics_.q1, c1, -w1 / n, nullptr);
  const Matrix d2 = MlpBackwardBatch(critics_.q2, c2, -w2 / n, nullptr);
  BackwardPolicy(pass, (d1 + d2).bottomRows(action_dim_), actor_grads,
                 perturbation_grads);
  return value;
}

double ActorCriticAgent::ActorUpdate(const Matrix& states) {
  Gradients actor_grads = Gradients::ZerosLike(actor_);
  std::optional<Gradients> head_grads;
  if (perturbation_) head_grads = Gradients::ZerosLike(perturbation_->net);
  const double value = ActorObjectiveGrad(
      states, &actor_grads, head_grads ? &*head_grads : nullptr);
  if (!std::isfinite(value) || !actor_grads.AllFinite() ||
      (head_grads && !head_grads->AllFinite())) {
    throw NumericError("actor update: non-finite objective or gradient");
  }
  AdamStep(actor_, actor_grads, actor_opt_);
  if (perturbation_) {
    AdamStep(perturbation_->net, *head_grads, *perturbation_opt_);
  }
  return value;
}

void ActorCriticAgent::UpdateTargets() {
  const double tau = config_.tau;
  PolyakUpdate(critics_.q1_target, critics_.q1, tau);
  PolyakUpdate(critics_.q2_target, critics_.q2, tau);
  PolyakUpdate(actor_target_, actor_, tau);
  if (perturbation_) {
    PolyakUpdate(perturbation_target_->net, perturbation_->net, tau);
  }
  ++updates_;
}

Json ActorCriticAgent::ToJson() const {
  Json config = {
      {"actor_hidden", config_.actor_hidden},
      {"critic_hidden", config_.critic_hidden},
      {"perturbation_hidden", config_.perturbation_hidden},
      {"actor_lr", config_.actor_lr},
      {"critic_lr", config_.critic_lr},
      {"gamma", config_.gamma},
      {"lambda", config_.lambda},
      {"tau", config_.tau},
      {"max_latent_action", config_.max_latent_action},
      {"epsilon", config_.epsilon},
      {"actor_objective", ActorObjectiveName(config_.actor_objective)},
      {"target_actor_for_bootstrap", config_.target_actor_for_bootstrap}};
  Json json = {{"kind", PolicyKindName(kind_)},
               {"config", config},
               {"state_dim", state_dim_},
               {"action_dim", action_dim_},
               {"updates", updates_},
               {"actor", MlpToJson(actor_)},
               {"actor_target", MlpToJson(actor_target_)},
               {"actor_opt", AdamToJson(actor_opt_)},
               {"q1", MlpToJson(critics_.q1)},
               {"q2", MlpToJson(critics_.q2)},
               {"q1_target", MlpToJson(critics_.q1_target)},
               {"q2_target", MlpToJson(critics_.q2_target)},
               {"q1_opt", AdamToJson(q1_opt_)},
               {"q2_opt", AdamToJson(q2_opt_)}};
  if (cvae_) json["cvae_hash"] = HashToHex(cvae_->Hash());
  if (perturbation_) {
    json["perturbation"] = MlpToJson(perturbation_->net);
    json["perturbation_target"] = MlpToJson(perturbation_target_->net);
    json["perturbation_opt"] = AdamToJson(*perturbation_opt_);
  }
  return json;
}

ActorCriticAgent ActorCriticAgent::FromJson(
    const Json& json, std::shared_ptr<const BehaviorCvae> cvae) {
  ActorCriticAgent agent;
  try {
    agent.kind_ = ParsePolicyKind(json.at("kind"));
    const Json& c = json.at("config");
    AgentConfig& config = agent.config_;
    config.actor_hidden = c.at("actor_hidden").get<std::vector<int>>();
    config.critic_hidden = c.at("critic_hidden").get<std::vector<int>>();
    config.perturbation_hidden =
        c.at("perturbation_hidden").get<std::vector<int>>();
    config.actor_lr = c.at("actor_lr");
    config.critic_lr = c.at("critic_lr");
    config.gamma = c.at("gamma");
    config.lambda = c.at("lambda");
    config.tau = c.at("tau");
    config.max_latent_action = c.at("max_latent_action");
    config.epsilon = c.at("epsilon");
    config.actor_objective = ParseActorObjective(c.at("actor_objective"));
    config.target_actor_for_bootstrap = c.at("target_actor_for_bootstrap");
    config.Validate();
    agent.state_dim_ = json.at("state_dim");
    agent.action_dim_ = json.at("action_dim");
    agent.updates_ = json.at("updates");
    agent.actor_ = MlpFromJson(json.at("actor"));
    agent.actor_target_ = MlpFromJson(json.at("actor_target"));
    agent.actor_opt_ = AdamFromJson(json.at("actor_opt"), agent.actor_);
    CriticPair& critics = agent.critics_;
    critics.q1 = MlpFromJson(json.at("q1"));
    critics.q2 = MlpFromJson(json.at("q2"));
    critics.q1_target = MlpFromJson(json.at("q1_target"));
    critics.q2_target = MlpFromJson(json.at("q2_target"));
    critics.lambda = config.lambda;
    critics.gamma = config.gamma;
    agent.q1_opt_ = AdamFromJson(json.at("q1_opt"), critics.q1);
    agent.q2_opt_ = AdamFromJson(json.at("q2_opt"), critics.q2);
    if (json.contains("perturbation")) {
      PerturbationHead head;
      head.epsilon = config.epsilon;
      head.net = MlpFromJson(json.at("perturbation"));
      agent.perturbation_ = head;
      head.net = MlpFromJson(json.at("perturbation_target"));
      agent.perturbation_target_ = head;
      agent.perturbation_opt_ =
          AdamFromJson(json.at("perturbation_opt"), agent.perturbation_->net);
    }
    if (agent.kind_ == PolicyKind::kLatent) {
      if (!cvae) throw IoError("latent agent checkpoint needs its CVAE");
      if (json.at("cvae_hash").get<std::string>() != HashToHex(cvae->Hash())) {
        throw IoError("agent checkpoint was trained against a different CVAE");
      }
      agent.cvae_ = std::move(cvae);
    }
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed agent record: ") + e.what());
  }
  return agent;
}

Json LogEntryToJson(const LogEntry& entry) {
  Json json = {{"step", entry.step},
               {"critic_loss", entry.critic_loss},
               {"mean_q", entry.mean_q},
               {"eval_return_mean", nullptr},
               {"eval_return_std", nullptr}};
  if (entry.eval_return_mean) json["eval_return_mean"] = *entry.eval_return_mean;
  if (entry.eval_return_std) json["eval_return_std"] = *entry.eval_return_std;
  return json;
}

LogEntry LogEntryFromJson(const Json& json) {
  LogEntry entry;
  entry.step = json.at("step");
  entry.critic_loss = json.at("critic_loss");
  entry.mean_q = json.at("mean_q");
  if (!json.at("eval_return_mean").is_null()) {
    entry.eval_return_mean = json.at("eval_return_mean").get<double>();
  }
  if (!json.at("eval_return_std").is_null()) {
    entry.eval_return_std = json.at("eval_return_std").get<double>();
  }
  return entry;
}

TrainLog TrainActorCritic(ActorCriticAgent& agent,
                          const TransitionDataset& dataset,
                          const TrainConfig& config, const ToyEnv* eval_env,
                          std::uint64_t seed, const LogSink& sink,
                          std::int64_t start_step) {
  if (config.steps <= 0 || config.batch_size <= 0 || config.log_interval <= 0) {
    throw ValueError("training steps, batch size and log interval must be > 0");
  }
  if (dataset.state_dim() != agent.state_dim() ||
      dataset.action_dim() != agent.action_dim()) {
    throw ShapeError("dataset dimensions do not match the agent");
  }
  const std::uint64_t batch_seed = DeriveSeed(seed, "train/batch");
  const std::uint64_t eval_seed = DeriveSeed(seed, "train/eval");
  const std::size_t k =
      std::min<std::size_t>(config.batch_size, dataset.size());

  TrainLog log;
  double loss_sum = 0.0;
  double q_sum = 0.0;
  int count = 0;
  for (std::int64_t step = start_step + 1; step <= config.steps; ++step) {
    Rng rng(Mix64(batch_seed ^ static_cast<std::uint64_t>(step)));
    const Batch batch = SampleBatch(dataset, k, rng);
    double loss = 0.0;
    double mean_q = 0.0;
    try {
      loss = agent.CriticUpdate(batch);
      mean_q = agent.ActorUpdate(batch.states);
    } catch (const NumericError& e) {
      if (config.fatal_on_nonfinite) {
        throw NumericError("step " + std::to_string(step) + ": " + e.what());
      }
      ++log.nonfinite_updates;
      loss = kLossReportCap;
      mean_q = agent.QValues(batch.states, agent.Act(batch.states)).mean();
    }
    agent.UpdateTargets();
    loss_sum += std::min(loss, kLossReportCap);
    q_sum += std::isfinite(mean_q)
                 ? std::clamp(mean_q, -kLossReportCap, kLossReportCap)
                 : kLossReportCap;
    ++count;

    const bool log_now = step % config.log_interval == 0 || step == config.steps;
    if (!log_now) continue;
    LogEntry entry;
    entry.step = step;
    entry.critic_loss = loss_sum / count;
    entry.mean_q = q_sum / count;
    entry.nonfinite_updates = log.nonfinite_updates;
    const bool eval_now =
        eval_env != nullptr && config.eval_episodes > 0 &&
        ((config.eval_interval > 0 && step % config.eval_interval == 0) ||
         step == config.steps);
    if (eval_now) {
      const EvalResult eval = EvaluatePolicy(
          *eval_env, [&agent](const Vector& s) { return agent.Act(s); },
          config.eval_episodes, eval_seed);
      entry.eval_return_mean = eval.mean;
      entry.eval_return_std = eval.std;
    }
    log.entries.push_back(entry);
    if (sink) sink(entry);
    loss_sum = 0.0;
    q_sum = 0.0;
    count = 0;
  }
  return log;
}

}  // namespace plas
