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

#include "plas/dataset.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "plas/errors.h"
#include "plas/online.h"
#include "plas/serialize.h"

namespace plas {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void HashBytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void HashVector(std::uint64_t& h, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v(i);
    HashBytes(h, &x, sizeof x);
  }
}

std::string FormatDouble(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

Vector Clip(Vector v) { return v.cwiseMax(-1.0).cwiseMin(1.0); }

// Rolls `policy` from fresh resets until exactly `size` transitions exist.
std::vector<Transition> Rollouts(const ToyEnv& env, const PolicyFn& policy,
                                 std::size_t size, Rng& rng) {
  std::vector<Transition> out;
  out.reserve(size);
  while (out.size() < size) {
    Episode episode = RunEpisode(env, policy, rng);
    for (auto& t : episode.transitions) {
      if (out.size() == size) break;
      out.push_back(std::move(t));
    }
  }
  return out;
}

OnlineResult MediumRun(const ToyEnv& env, std::uint64_t seed,
                       const GeneratorOptions& options) {
  const ReferenceScores refs = ComputeReferenceScores(env);
  OnlineConfig config;
  config.max_steps = options.online_max_steps;
  config.stop_return =
      refs.random_ref +
      options.medium_fraction * (refs.expert_ref - refs.random_ref);
  return TrainOnline(env, config, DeriveSeed(seed, "medium/online"));
}

std::vector<Transition> MediumRollouts(const ToyEnv& env,
                                       const ActorCriticAgent& agent,
                                       std::size_t size, std::uint64_t seed,
                                       double noise_std) {
  Rng rng = MakeRng(seed, "medium/rollout");
  auto noise_rng = std::make_shared<Rng>(MakeRng(seed, "medium/noise"));
  const PolicyFn policy = [&agent, noise_rng, noise_std](const Vector& s) {
    std::normal_distribution<double> noise(0.0, noise_std);
    Vector a = agent.Act(s);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += noise(*noise_rng);
    return Clip(a);
  };
  return Rollouts(env, policy, size, rng);
}

std::vector<Transition> GenerateTransitions(const ToyEnv& env,
                                            GeneratorKind kind,
                                            std::size_t size,
                                            std::uint64_t seed,
                                            const GeneratorOptions& options,
                                            std::string* recipe) {
  const int dim = env.action_dim();
  switch (kind) {
    case GeneratorKind::kRandom: {
      const double range = options.random_action_range;
      if (!(range > 0.0 && range <= 1.0)) {
        throw ValueError("random_action_range must lie in (0, 1]");
      }
      *recipe = "action_range=" + FormatDouble(range);
      Rng rng = MakeRng(seed, "random/rollout");
      auto action_rng = std::make_shared<Rng>(MakeRng(seed, "random/action"));
      const PolicyFn policy = [action_rng, dim, range](const Vector&) {
        std::uniform_real_distribution<double> u(-range, range);
        Vector a(dim);
        for (int i = 0; i < dim; ++i) a(i) = u(*action_rng);
        return a;
      };
      return Rollouts(env, policy, size, rng);
    }
    case GeneratorKind::kExpert: {
      *recipe = "expert_noise=" + FormatDouble(options.expert_noise);
      Rng rng = MakeRng(seed, "expert/rollout");
      auto noise_rng = std::make_shared<Rng>(MakeRng(seed, "expert/noise"));
      const double std_dev = options.expert_noise;
      const PolicyFn policy = [&env, noise_rng, std_dev](const Vector& s) {
        std::normal_distribution<double> noise(0.0, std_dev);
        Vector a = env.ExpertAction(s);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += noise(*noise_rng);
        return Clip(a);
      };
      return Rollouts(env, policy, size, rng);
    }
    case GeneratorKind::kMedium: {
      *recipe = "medium_noise=" + FormatDouble(options.medium_noise) +
                ",fraction=" + FormatDouble(options.medium_fraction);
      const OnlineResult run = MediumRun(env, seed, options);
      return MediumRollouts(env, run.agent, size, seed, options.medium_noise);
    }
    case GeneratorKind::kMediumReplay: {
      *recipe = "replay_fraction=" + FormatDouble(options.replay_fraction) +
                ",fraction=" + FormatDouble(options.medium_fraction);
      OnlineResult run = MediumRun(env, seed, options);
      const std::size_t cap = std::max<std::size_t>(
          1, static_cast<std::size_t>(options.replay_fraction * size));
      auto& buffer = run.buffer;
      if (buffer.size() > cap) {
        buffer.erase(buffer.begin(), buffer.end() - cap);
      }
      return std::move(buffer);
    }
    case GeneratorKind::kMediumExpert: {
      *recipe = "medium_noise=" + FormatDouble(options.medium_noise) +
                ",expert_noise=" + FormatDouble(options.expert_noise) +
                ",fraction=" + FormatDouble(options.medium_fraction);
      const std::size_t n_expert = size / 2;
      std::string unused;
      std::vector<Transition> out =
          GenerateTransitions(env, GeneratorKind::kMedium, size - n_expert,
                              seed, options, &unused);
      std::vector<Transition> expert = GenerateTransitions(
          env, GeneratorKind::kExpert, n_expert, seed, options, &unused);
      out.insert(out.end(), std::make_move_iterator(expert.begin()),
                 std::make_move_iterator(expert.end()));
      return out;
    }
    case GeneratorKind::kCustom: {
      if (options.custom_recipe == "mixed") {
        const double fraction = options.mixed_expert_fraction;
        if (!(fraction >= 0.0 && fraction <= 1.0)) {
          throw ValueError("mixed_expert_fraction must lie in [0, 1]");
        }
        const auto n_expert =
            static_cast<std::size_t>(std::llround(fraction * size));
        std::string random_recipe;
        std::string unused;
        std::vector<Transition> out;
        if (n_expert < size) {
          out = GenerateTransitions(env, GeneratorKind::kRandom,
                                    size - n_expert, seed, options,
                                    &random_recipe);
        }
        if (n_expert > 0) {
          std::vector<Transition> expert = GenerateTransitions(
              env, GeneratorKind::kExpert, n_expert, seed, options, &unused);
          out.insert(out.end(), std::make_move_iterator(expert.begin()),
                     std::make_move_iterator(expert.end()));
        }
        *recipe = "mixed,action_range=" +
                  FormatDouble(options.random_action_range) +
                  ",expert_noise=" + FormatDouble(options.expert_noise) +
                  ",expert_fraction=" + FormatDouble(fraction);
        return out;
      }
      if (options.custom_recipe != "bimodal") {
        throw ValueError("unknown custom recipe '" + options.custom_recipe +
                         "'");
      }
      *recipe = "bimodal,center=" + FormatDouble(options.bimodal_center) +
                ",width=" + FormatDouble(options.bimodal_width);
      Rng rng = MakeRng(seed, "custom/rollout");
      auto action_rng = std::make_shared<Rng>(MakeRng(seed, "custom/action"));
      const double center = options.bimodal_center;
      const double width = options.bimodal_width;
      const PolicyFn policy = [action_rng, dim, center, width](const Vector&) {
        std::bernoulli_distribution sign(0.5);
        std::normal_distribution<double> noise(0.0, width);
        Vector a(dim);
        for (int i = 0; i < dim; ++i) {
          a(i) = (sign(*action_rng) ? center : -center) + noise(*action_rng);
        }
        return Clip(a);
      };
      return Rollouts(env, policy, size, rng);
    }
  }
  throw ValueError("unknown generator kind");
}

}  // namespace

std::string GeneratorKindName(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kRandom: return "random";
    case GeneratorKind::kMedium: return "medium";
    case GeneratorKind::kMediumReplay: return "medium_replay";
    case GeneratorKind::kMediumExpert: return "medium_expert";
    case GeneratorKind::kExpert: return "expert";
    case GeneratorKind::kCustom: return "custom";
  }
  return "custom";
}

GeneratorKind ParseGeneratorKind(const std::string& name) {
  for (GeneratorKind kind :
       {GeneratorKind::kRandom, GeneratorKind::kMedium,
        GeneratorKind::kMediumReplay, GeneratorKind::kMediumExpert,
        GeneratorKind::kExpert, GeneratorKind::kCustom}) {
    if (GeneratorKindName(kind) == name) return kind;
  }
  throw ValueError("unknown dataset kind '" + name + "'");
}

TransitionDataset::TransitionDataset(DatasetMetadata metadata,
                                     std::vector<Transition> transitions)
    : metadata_(std::move(metadata)), transitions_(std::move(transitions)) {
  if (transitions_.empty()) throw ValueError("dataset is empty");
  if (metadata_.size != transitions_.size()) {
    throw ValueError("metadata size " + std::to_string(metadata_.size) +
                     " does not match " + std::to_string(transitions_.size()) +
                     " transitions");
  }
  state_dim_ = static_cast<int>(transitions_.front().state.size());
  action_dim_ = static_cast<int>(transitions_.front().action.size());
  if (state_dim_ == 0 || action_dim_ == 0) {
    throw ShapeError("dataset transitions need non-empty states and actions");
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const Transition& t = transitions_[i];
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
        t.action.size() != action_dim_) {
      throw ShapeError("transition " + std::to_string(i) +
                       " has inconsistent dimensions");
    }
    if (!t.state.allFinite() || !t.next_state.allFinite() ||
        !t.action.allFinite() || !std::isfinite(t.reward)) {
      throw ValueError("transition " + std::to_string(i) +
                       " has non-finite entries");
    }
    if ((t.action.array().abs() > 1.0).any()) {
      throw ValueError("transition " + std::to_string(i) +
                       " has an action outside [-1, 1]");
    }
  }
}

std::uint64_t TransitionDataset::ContentHash() const {
  std::uint64_t h = kFnvOffset;
  for (const Transition& t : transitions_) {
    HashVector(h, t.state);
    HashVector(h, t.action);
    HashBytes(h, &t.reward, sizeof t.reward);
    HashVector(h, t.next_state);
    const unsigned char done = t.done ? 1 : 0;
    HashBytes(h, &done, 1);
  }
  return h;
}

std::vector<std::size_t> SampleIndices(const TransitionDataset& dataset,
                                       std::size_t k, Rng& rng) {
  if (k == 0) throw ValueError("minibatch size must be positive");
  if (k > dataset.size()) {
    throw ValueError("minibatch size exceeds the dataset size");
  }
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
  std::vector<std::size_t> idx(k);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<Transition> SampleMinibatch(const TransitionDataset& dataset,
                                        std::size_t k, Rng& rng) {
  std::vector<Transition> out;
  out.reserve(k);
  for (std::size_t i : SampleIndices(dataset, k, rng)) {
    out.push_back(dataset[i]);
  }
  return out;
}

Batch GatherTransitions(const std::vector<Transition>& transitions,
                        const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw ValueError("empty batch");
  const auto& first = transitions.at(indices.front());
  const Eigen::Index n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(first.state.size(), n);
  b.actions.resize(first.action.size(), n);
  b.rewards.resize(n);
  b.next_states.resize(first.state.size(), n);
  b.dones.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = transitions.at(indices[j]);
    b.states.col(j) = t.state;
    b.actions.col(j) = t.action;
    b.rewards(j) = t.reward;
    b.next_states.col(j) = t.next_state;
    b.dones(j) = t.done ? 1.0 : 0.0;
  }
  return b;
}

Batch GatherBatch(const TransitionDataset& dataset,
                  const std::vector<std::size_t>& indices) {
  return GatherTransitions(dataset.transitions(), indices);
}

Batch SampleBatch(const TransitionDataset& dataset, std::size_t k, Rng& rng) {
  return GatherBatch(dataset, SampleIndices(dataset, k, rng));
}

Matrix StateMatrix(const TransitionDataset& dataset) {
  Matrix out(dataset.state_dim(), dataset.size());
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    out.col(j) = dataset[j].state;
  }
  return out;
}

Matrix ActionMatrix(const TransitionDataset& dataset) {
  Matrix out(dataset.action_dim(), dataset.size());
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    out.col(j) = dataset[j].action;
  }
  return out;
}

TransitionDataset GenerateDataset(const ToyEnv& env, GeneratorKind kind,
                                  std::size_t size, std::uint64_t seed,
                                  const GeneratorOptions& options) {
  if (size == 0) throw ValueError("dataset size must be at least 1");
  DatasetMetadata metadata;
  metadata.env_name = env.name();
  metadata.generator_kind = kind;
  metadata.seed = seed;
  std::vector<Transition> transitions =
      GenerateTransitions(env, kind, size, seed, options, &metadata.recipe);
  metadata.size = transitions.size();
  return TransitionDataset(std::move(metadata), std::move(transitions));
}

std::filesystem::path SidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

void SaveDataset(const TransitionDataset& dataset,
                 const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Transition& t : dataset.transitions()) {
    Json line = {{"s", VectorToJson(t.state)},
                 {"a", VectorToJson(t.action)},
                 {"r", t.reward},
                 {"s2", VectorToJson(t.next_state)},
                 {"done", t.done}};
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
  const DatasetMetadata& m = dataset.metadata();
  WriteJsonFile(SidecarPath(path),
                {{"format", "plas-dataset"},
                 {"version", kCheckpointVersion},
                 {"env_name", m.env_name},
                 {"generator_kind", GeneratorKindName(m.generator_kind)},
                 {"recipe", m.recipe},
                 {"seed", m.seed},
                 {"size", m.size},
                 {"state_dim", dataset.state_dim()},
                 {"action_dim", dataset.action_dim()},
                 {"content_hash", HashToHex(dataset.ContentHash())}});
}

TransitionDataset LoadDataset(const std::filesystem::path& path) {
  const Json meta = ReadJsonFile(SidecarPath(path));
  DatasetMetadata m;
  std::string expected_hash;
  try {
    if (meta.at("format") != "plas-dataset") {
      throw IoError(path.string() + ": sidecar is not a dataset record");
    }
    if (meta.at("version").get<int>() != kCheckpointVersion) {
      throw IoError(path.string() + ": unsupported dataset version");
    }
    m.env_name = meta.at("env_name");
    m.generator_kind = ParseGeneratorKind(meta.at("generator_kind"));
    m.recipe = meta.at("recipe");
    m.seed = meta.at("seed");
    m.size = meta.at("size");
    expected_hash = meta.at("content_hash");
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": malformed sidecar: " + e.what());
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<Transition> transitions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      Transition t;
      t.state = VectorFromJson(j.at("s"));
      t.action = VectorFromJson(j.at("a"));
      t.reward = j.at("r");
      t.next_state = VectorFromJson(j.at("s2"));
      t.done = j.at("done");
      transitions.push_back(std::move(t));
    } catch (const Json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " +
                    e.what());
    }
  }
  TransitionDataset dataset(std::move(m), std::move(transitions));
  if (HashToHex(dataset.ContentHash()) != expected_hash) {
    throw IoError(path.string() + ": content hash does not match its sidecar");
  }
  return dataset;
}

}  // namespace plas
