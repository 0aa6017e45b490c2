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

#include "plas/config.h"

#include "plas/envs.h"
#include "plas/errors.h"

namespace plas {
namespace {

bool SameKind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

// Merges `user` into `base`, which holds every known key.
void Merge(Json& base, const Json& user, const std::string& path) {
  if (!user.is_object()) {
    throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string field = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(field, "unknown field");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      Merge(slot, it.value(), field);
    } else if (!SameKind(slot, it.value())) {
      throw ConfigError(field, std::string("expected ") + slot.type_name() +
                                   ", got " + it.value().type_name());
    } else if (slot.is_number_integer() && it.value().is_number_float()) {
      throw ConfigError(field, "expected an integer");
    } else if (slot.is_number_unsigned() &&
               it.value().is_number_integer() &&
               !it.value().is_number_unsigned()) {
      throw ConfigError(field, "must be non-negative");
    } else {
      slot = it.value();
    }
  }
}

template <typename T>
T Get(const Json& json, const std::string& path) {
  const Json* node = &json;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    node = &node->at(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  try {
    return node->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(path, std::string("cannot read a ") + node->type_name());
  }
}

}  // namespace

std::string AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPlas: return "plas";
    case Algorithm::kBc: return "bc";
    case Algorithm::kUnconstrained: return "unconstrained";
  }
  return "plas";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kPlas, Algorithm::kBc,
                      Algorithm::kUnconstrained}) {
    if (AlgorithmName(a) == name) return a;
  }
  throw ValueError("unknown algorithm '" + name + "'");
}

void ExperimentConfig::Validate() const {
  bool env_known = false;
  for (const auto& name : EnvNames()) env_known |= name == env;
  if (!env_known) throw ConfigError("env", "unknown environment '" + env + "'");
  if (dataset.size == 0) throw ConfigError("dataset.size", "must be >= 1");
  const GeneratorOptions& g = dataset.options;
  if (!(g.random_action_range > 0.0 && g.random_action_range <= 1.0)) {
    throw ConfigError("dataset.random_action_range", "must lie in (0, 1]");
  }
  if (!(g.expert_noise >= 0.0)) {
    throw ConfigError("dataset.expert_noise", "must be >= 0");
  }
  if (!(g.medium_noise >= 0.0)) {
    throw ConfigError("dataset.medium_noise", "must be >= 0");
  }
  if (!(g.medium_fraction > 0.0 && g.medium_fraction < 1.0)) {
    throw ConfigError("dataset.medium_fraction", "must lie in (0, 1)");
  }
  if (!(g.replay_fraction > 0.0 && g.replay_fraction <= 1.0)) {
    throw ConfigError("dataset.replay_fraction", "must lie in (0, 1]");
  }
  if (g.online_max_steps <= 0) {
    throw ConfigError("dataset.online_max_steps", "must be > 0");
  }
  if (g.custom_recipe != "bimodal" && g.custom_recipe != "mixed") {
    throw ConfigError("dataset.custom_recipe", "must be 'bimodal' or 'mixed'");
  }
  if (!(g.mixed_expert_fraction >= 0.0 && g.mixed_expert_fraction <= 1.0)) {
    throw ConfigError("dataset.mixed_expert_fraction", "must lie in [0, 1]");
  }
  if (!(g.bimodal_width >= 0.0)) {
    throw ConfigError("dataset.bimodal_width", "must be >= 0");
  }
  cvae.Validate();
  agent.Validate();
  bc.Validate();
  if (train.steps <= 0) throw ConfigError("train.steps", "must be > 0");
  if (train.batch_size <= 0) {
    throw ConfigError("train.batch_size", "must be > 0");
  }
  if (train.log_interval <= 0) {
    throw ConfigError("train.log_interval", "must be > 0");
  }
  if (train.eval_interval < 0) {
    throw ConfigError("train.eval_interval", "must be >= 0");
  }
  if (train.eval_episodes <= 0) {
    throw ConfigError("train.eval_episodes", "must be > 0");
  }
  if (seeds.empty()) throw ConfigError("seeds", "must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (checkpoint_interval <= 0 ||
      checkpoint_interval % train.log_interval != 0) {
    throw ConfigError("checkpoint_interval",
                      "must be a positive multiple of train.log_interval");
  }
  if (diagnostic_episodes <= 0) {
    throw ConfigError("diagnostic_episodes", "must be > 0");
  }
}

Json ConfigToJson(const ExperimentConfig& c) {
  const GeneratorOptions& g = c.dataset.options;
  return {
      {"env", c.env},
      {"algorithm", AlgorithmName(c.algorithm)},
      {"dataset",
       {{"kind", GeneratorKindName(c.dataset.kind)},
        {"size", c.dataset.size},
        {"seed", c.dataset.seed},
        {"path", c.dataset.path},
        {"random_action_range", g.random_action_range},
        {"expert_noise", g.expert_noise},
        {"medium_noise", g.medium_noise},
        {"medium_fraction", g.medium_fraction},
        {"replay_fraction", g.replay_fraction},
        {"online_max_steps", g.online_max_steps},
        {"custom_recipe", g.custom_recipe},
        {"bimodal_center", g.bimodal_center},
        {"bimodal_width", g.bimodal_width},
        {"mixed_expert_fraction", g.mixed_expert_fraction}}},
      {"cvae",
       {{"path", c.cvae_path},
        {"latent_dim", c.cvae.latent_dim},
        {"hidden", c.cvae.hidden},
        {"kl_weight", c.cvae.kl_weight},
        {"log_std_min", c.cvae.log_std_min},
        {"log_std_max", c.cvae.log_std_max},
        {"lr", c.cvae.learning_rate},
        {"batch_size", c.cvae.batch_size},
        {"steps", c.cvae.steps},
        {"log_interval", c.cvae.log_interval}}},
      {"agent",
       {{"actor_hidden", c.agent.actor_hidden},
        {"critic_hidden", c.agent.critic_hidden},
        {"perturbation_hidden", c.agent.perturbation_hidden},
        {"actor_lr", c.agent.actor_lr},
        {"critic_lr", c.agent.critic_lr},
        {"gamma", c.agent.gamma},
        {"lambda", c.agent.lambda},
        {"tau", c.agent.tau},
        {"max_latent_action", c.agent.max_latent_action},
        {"epsilon", c.agent.epsilon},
        {"actor_objective", ActorObjectiveName(c.agent.actor_objective)},
        {"target_actor_for_bootstrap", c.agent.target_actor_for_bootstrap}}},
      {"train",
       {{"steps", c.train.steps},
        {"batch_size", c.train.batch_size},
        {"log_interval", c.train.log_interval},
        {"eval_interval", c.train.eval_interval},
        {"eval_episodes", c.train.eval_episodes}}},
      {"bc",
       {{"hidden", c.bc.hidden},
        {"lr", c.bc.learning_rate},
        {"batch_size", c.bc.batch_size},
        {"steps", c.bc.steps},
        {"log_interval", c.bc.log_interval}}},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
      {"reference_file", c.reference_file},
      {"checkpoint_interval", c.checkpoint_interval},
      {"diagnostic_episodes", c.diagnostic_episodes}};
}

ExperimentConfig ConfigFromJson(const Json& json) {
  Json merged = ConfigToJson(ExperimentConfig{});
  Merge(merged, json, "");
  ExperimentConfig c;
  auto parse = [](const std::string& field, auto fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(field, e.what());
    }
  };
  const Json& m = merged;
  c.env = Get<std::string>(m, "env");
  c.algorithm = parse("algorithm", [&] {
    return ParseAlgorithm(Get<std::string>(m, "algorithm"));
  });
  c.dataset.kind = parse("dataset.kind", [&] {
    return ParseGeneratorKind(Get<std::string>(m, "dataset.kind"));
  });
  c.dataset.size = Get<std::size_t>(m, "dataset.size");
  c.dataset.seed = Get<std::uint64_t>(m, "dataset.seed");
  c.dataset.path = Get<std::string>(m, "dataset.path");
  GeneratorOptions& g = c.dataset.options;
  g.random_action_range = Get<double>(m, "dataset.random_action_range");
  g.expert_noise = Get<double>(m, "dataset.expert_noise");
  g.medium_noise = Get<double>(m, "dataset.medium_noise");
  g.medium_fraction = Get<double>(m, "dataset.medium_fraction");
  g.replay_fraction = Get<double>(m, "dataset.replay_fraction");
  g.online_max_steps = Get<int>(m, "dataset.online_max_steps");
  g.custom_recipe = Get<std::string>(m, "dataset.custom_recipe");
  g.bimodal_center = Get<double>(m, "dataset.bimodal_center");
  g.bimodal_width = Get<double>(m, "dataset.bimodal_width");
  g.mixed_expert_fraction = Get<double>(m, "dataset.mixed_expert_fraction");
  c.cvae_path = Get<std::string>(m, "cvae.path");
  c.cvae.latent_dim = Get<int>(m, "cvae.latent_dim");
  c.cvae.hidden = Get<std::vector<int>>(m, "cvae.hidden");
  c.cvae.kl_weight = Get<double>(m, "cvae.kl_weight");
  c.cvae.log_std_min = Get<double>(m, "cvae.log_std_min");
  c.cvae.log_std_max = Get<double>(m, "cvae.log_std_max");
  c.cvae.learning_rate = Get<double>(m, "cvae.lr");
  c.cvae.batch_size = Get<int>(m, "cvae.batch_size");
  c.cvae.steps = Get<int>(m, "cvae.steps");
  c.cvae.log_interval = Get<int>(m, "cvae.log_interval");
  c.agent.actor_hidden = Get<std::vector<int>>(m, "agent.actor_hidden");
  c.agent.critic_hidden = Get<std::vector<int>>(m, "agent.critic_hidden");
  c.agent.perturbation_hidden =
      Get<std::vector<int>>(m, "agent.perturbation_hidden");
  c.agent.actor_lr = Get<double>(m, "agent.actor_lr");
  c.agent.critic_lr = Get<double>(m, "agent.critic_lr");
  c.agent.gamma = Get<double>(m, "agent.gamma");
  c.agent.lambda = Get<double>(m, "agent.lambda");
  c.agent.tau = Get<double>(m, "agent.tau");
  c.agent.max_latent_action = Get<double>(m, "agent.max_latent_action");
  c.agent.epsilon = Get<double>(m, "agent.epsilon");
  c.agent.actor_objective = parse("agent.actor_objective", [&] {
    return ParseActorObjective(Get<std::string>(m, "agent.actor_objective"));
  });
  c.agent.target_actor_for_bootstrap =
      Get<bool>(m, "agent.target_actor_for_bootstrap");
  c.train.steps = Get<int>(m, "train.steps");
  c.train.batch_size = Get<int>(m, "train.batch_size");
  c.train.log_interval = Get<int>(m, "train.log_interval");
  c.train.eval_interval = Get<int>(m, "train.eval_interval");
  c.train.eval_episodes = Get<int>(m, "train.eval_episodes");
  c.bc.hidden = Get<std::vector<int>>(m, "bc.hidden");
  c.bc.learning_rate = Get<double>(m, "bc.lr");
  c.bc.batch_size = Get<int>(m, "bc.batch_size");
  c.bc.steps = Get<int>(m, "bc.steps");
  c.bc.log_interval = Get<int>(m, "bc.log_interval");
  c.seeds = Get<std::vector<std::uint64_t>>(m, "seeds");
  c.output_dir = Get<std::string>(m, "output_dir");
  c.reference_file = Get<std::string>(m, "reference_file");
  c.checkpoint_interval = Get<int>(m, "checkpoint_interval");
  c.diagnostic_episodes = Get<int>(m, "diagnostic_episodes");
  c.Validate();
  return c;
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  return Fnv1a64(ConfigToJson(config).dump());
}

std::string ConfigHashHex(const ExperimentConfig& config) {
  return HashToHex(ConfigHash(config));
}

void ApplyOverride(Json& document, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  if (!document.is_object()) document = Json::object();
  Json* node = &document;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError(path, "empty path component");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    Json& child = (*node)[key];
    if (child.is_null()) child = Json::object();
    if (!child.is_object()) throw ConfigError(path, "not an object");
    node = &child;
    start = dot + 1;
  }
}

ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  Json document = Json::object();
  if (!path.empty()) {
    try {
      document = ReadJsonFile(path);
    } catch (const IoError& e) {
      throw ConfigError(path.string(), e.what());
    }
  }
  for (const std::string& o : overrides) ApplyOverride(document, o);
  return ConfigFromJson(document);
}

}  // namespace plas
