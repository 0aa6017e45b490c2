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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "plas/dataset.h"
#include "plas/envs.h"
#include "plas/errors.h"
#include "plas/random.h"

namespace plas {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plas-dataset-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Kolmogorov-Smirnov statistic of `x` against Uniform(lo, hi).
double KsUniform(std::vector<double> x, double lo, double hi) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = (x[i] - lo) / (hi - lo);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

TEST(Generate, RandomActionsAreUniform) {
  auto env = MakeEnv("point_mass");
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kRandom, 5000, 1);
  ASSERT_EQ(data.size(), 5000u);
  std::vector<double> ax;
  for (const Transition& t : data.transitions()) ax.push_back(t.action(0));
  // 1% critical value is 1.63 / sqrt(n).
  EXPECT_LT(KsUniform(ax, -1.0, 1.0), 1.63 / std::sqrt(5000.0));
  EXPECT_EQ(data.metadata().recipe, "action_range=1");
}

TEST(Generate, ActionRangeShrinksTheBox) {
  auto env = MakeEnv("edge_following");
  GeneratorOptions options;
  options.random_action_range = 0.3;
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kRandom, 3000, 2, options);
  std::vector<double> a;
  for (const Transition& t : data.transitions()) a.push_back(t.action(0));
  EXPECT_LE(*std::max_element(a.begin(), a.end()), 0.3);
  EXPECT_GE(*std::min_element(a.begin(), a.end()), -0.3);
  EXPECT_LT(KsUniform(a, -0.3, 0.3), 1.63 / std::sqrt(3000.0));
  options.random_action_range = 0.0;
  EXPECT_THROW(GenerateDataset(*env, GeneratorKind::kRandom, 10, 2, options),
               ValueError);
}

TEST(Generate, TransitionsChainWithinEpisodes) {
  auto env = MakeEnv("point_mass");
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kExpert, 1000, 3);
  for (std::size_t i = 0; i + 1 < data.size(); ++i) {
    const Transition& t = data[i];
    const StepResult r = env->Step(t.state, t.action);
    EXPECT_EQ(r.next_state, t.next_state);
    EXPECT_EQ(r.reward, t.reward);
    EXPECT_EQ(r.done, t.done);
    // A new episode starts only after a terminal or the horizon.
    if (data[i + 1].state != t.next_state) {
      EXPECT_TRUE(t.done || data[i + 1].state.tail<2>().isZero());
    }
  }
}

TEST(Generate, ExpertDataFollowsTheScriptWithNoise) {
  auto env = MakeEnv("edge_following");
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kExpert, 2000, 4);
  double mean = 0.0, sq = 0.0;
  for (const Transition& t : data.transitions()) {
    mean += t.action(0);
    sq += t.action(0) * t.action(0);
  }
  mean /= data.size();
  const double std_dev = std::sqrt(sq / data.size() - mean * mean);
  EXPECT_NEAR(mean, 0.5, 0.01);
  EXPECT_NEAR(std_dev, 0.03, 0.005);
}

TEST(Generate, MediumExpertIsHalfMediumThenExpert) {
  auto env = MakeEnv("edge_following");
  GeneratorOptions options;
  options.online_max_steps = 3000;
  const TransitionDataset mixed =
      GenerateDataset(*env, GeneratorKind::kMediumExpert, 1000, 5, options);
  const TransitionDataset expert =
      GenerateDataset(*env, GeneratorKind::kExpert, 500, 5, options);
  ASSERT_EQ(mixed.size(), 1000u);
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(mixed[500 + i].action, expert[i].action);
    EXPECT_EQ(mixed[500 + i].state, expert[i].state);
  }
}

TEST(Generate, MediumReplayIsSmallerThanRequested) {
  auto env = MakeEnv("edge_following");
  GeneratorOptions options;
  options.online_max_steps = 3000;
  const TransitionDataset replay =
      GenerateDataset(*env, GeneratorKind::kMediumReplay, 2000, 6, options);
  EXPECT_LE(replay.size(), 400u);
  EXPECT_GE(replay.size(), 1u);
  EXPECT_EQ(replay.metadata().size, replay.size());
}

TEST(Generate, BimodalRecipe) {
  auto env = MakeEnv("edge_following");
  GeneratorOptions options;
  options.bimodal_center = 0.4;
  options.bimodal_width = 0.02;
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kCustom, 4000, 7, options);
  int positive = 0;
  for (const Transition& t : data.transitions()) {
    EXPECT_NEAR(std::abs(t.action(0)), 0.4, 0.1);
    positive += t.action(0) > 0.0;
  }
  EXPECT_NEAR(positive / 4000.0, 0.5, 5 * std::sqrt(0.25 / 4000));
}

TEST(Generate, MixedRecipeAppendsExpertRollouts) {
  auto env = MakeEnv("edge_following");
  GeneratorOptions options;
  options.custom_recipe = "mixed";
  options.random_action_range = 0.5;
  options.mixed_expert_fraction = 0.25;
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kCustom, 1000, 8, options);
  const TransitionDataset expert =
      GenerateDataset(*env, GeneratorKind::kExpert, 250, 8, options);
  ASSERT_EQ(data.size(), 1000u);
  for (std::size_t i = 0; i < 750; ++i) {
    EXPECT_LE(std::abs(data[i].action(0)), 0.5);
  }
  for (std::size_t i = 0; i < 250; ++i) {
    EXPECT_EQ(data[750 + i].action, expert[i].action);
  }
  options.mixed_expert_fraction = 1.5;
  EXPECT_THROW(GenerateDataset(*env, GeneratorKind::kCustom, 10, 8, options),
               ValueError);
  options.custom_recipe = "trimodal";
  options.mixed_expert_fraction = 0.25;
  EXPECT_THROW(GenerateDataset(*env, GeneratorKind::kCustom, 10, 8, options),
               ValueError);
}

TEST(Generate, IsDeterministicPerSeed) {
  auto env = MakeEnv("point_mass");
  const auto a = GenerateDataset(*env, GeneratorKind::kRandom, 500, 11);
  const auto b = GenerateDataset(*env, GeneratorKind::kRandom, 500, 11);
  const auto c = GenerateDataset(*env, GeneratorKind::kRandom, 500, 12);
  EXPECT_EQ(a.ContentHash(), b.ContentHash());
  EXPECT_NE(a.ContentHash(), c.ContentHash());
  EXPECT_THROW(GenerateDataset(*env, GeneratorKind::kRandom, 0, 11),
               ValueError);
}

TEST(Dataset, RejectsInconsistentTransitions) {
  DatasetMetadata meta;
  meta.size = 0;
  EXPECT_THROW(TransitionDataset(meta, {}), ValueError);
  Transition good{Vector::Zero(2), Vector::Zero(1), 0.0, Vector::Zero(2), false};
  Transition wide = good;
  wide.action = Vector::Zero(2);
  meta.size = 2;
  EXPECT_THROW(TransitionDataset(meta, {good, wide}), ShapeError);
  Transition out_of_box = good;
  out_of_box.action(0) = 1.5;
  EXPECT_THROW(TransitionDataset(meta, {good, out_of_box}), ValueError);
  Transition nan_reward = good;
  nan_reward.reward = NAN;
  EXPECT_THROW(TransitionDataset(meta, {good, nan_reward}), ValueError);
}

TransitionDataset Numbered(std::size_t n) {
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t{Vector::Constant(1, static_cast<double>(i)), Vector::Zero(1),
                 static_cast<double>(i), Vector::Zero(1), false};
    ts.push_back(t);
  }
  DatasetMetadata meta;
  meta.size = n;
  return TransitionDataset(meta, std::move(ts));
}

TEST(Sampling, SizeOneDatasetRepeatsItsTransition) {
  const TransitionDataset data = Numbered(1);
  Rng rng(0);
  const Batch b = SampleBatch(data, 1, rng);
  EXPECT_EQ(b.size(), 1);
  EXPECT_EQ(b.rewards(0), 0.0);
  EXPECT_THROW(SampleIndices(data, 2, rng), ValueError);
  EXPECT_THROW(SampleIndices(data, 0, rng), ValueError);
}

TEST(Sampling, IsDeterministicForASeed) {
  const TransitionDataset data = Numbered(100);
  Rng a(5), b(5);
  EXPECT_EQ(SampleIndices(data, 50, a), SampleIndices(data, 50, b));
}

TEST(Sampling, IsUniformWithReplacement) {
  const std::size_t n = 20;
  const TransitionDataset data = Numbered(n);
  Rng rng(6);
  std::vector<double> counts(n, 0.0);
  const int rounds = 10000;
  const std::size_t k = 20;
  bool saw_repeat = false;
  for (int r = 0; r < rounds; ++r) {
    std::vector<std::size_t> idx = SampleIndices(data, k, rng);
    for (std::size_t i : idx) counts[i] += 1.0;
    std::sort(idx.begin(), idx.end());
    saw_repeat |= std::adjacent_find(idx.begin(), idx.end()) != idx.end();
  }
  EXPECT_TRUE(saw_repeat);
  const double draws = static_cast<double>(rounds * k);
  const double expected = draws / n;
  const double sigma = std::sqrt(draws * (1.0 / n) * (1.0 - 1.0 / n));
  double chi2 = 0.0;
  for (double c : counts) {
    EXPECT_LT(std::abs(c - expected), 5.0 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 99.9% quantile of chi-square with 19 degrees of freedom.
  EXPECT_LT(chi2, 43.82);
}

TEST(Sampling, GatherBuildsColumns) {
  const TransitionDataset data = Numbered(10);
  const Batch b = GatherBatch(data, {3, 3, 7});
  EXPECT_EQ(b.states.rows(), 1);
  EXPECT_EQ(b.states(0, 0), 3.0);
  EXPECT_EQ(b.states(0, 2), 7.0);
  EXPECT_EQ(b.rewards(1), 3.0);
  EXPECT_EQ(b.dones(2), 0.0);
}

TEST(Persistence, SaveLoadRoundTripsExactly) {
  auto env = MakeEnv("point_mass");
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kRandom, 300, 9);
  const fs::path path = TempDir("roundtrip") / "data.jsonl";
  SaveDataset(data, path);
  const TransitionDataset loaded = LoadDataset(path);
  EXPECT_EQ(loaded.ContentHash(), data.ContentHash());
  EXPECT_EQ(loaded.metadata().recipe, data.metadata().recipe);
  EXPECT_EQ(loaded.metadata().seed, 9u);
  EXPECT_EQ(loaded.metadata().generator_kind, GeneratorKind::kRandom);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ASSERT_EQ(loaded[i].state, data[i].state);
    ASSERT_EQ(loaded[i].action, data[i].action);
    ASSERT_EQ(loaded[i].reward, data[i].reward);
  }
}

TEST(Persistence, DetectsTampering) {
  auto env = MakeEnv("edge_following");
  const TransitionDataset data =
      GenerateDataset(*env, GeneratorKind::kRandom, 20, 10);
  const fs::path path = TempDir("tamper") / "data.jsonl";
  SaveDataset(data, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const std::size_t pos = text.find("\"r\":");
  ASSERT_NE(pos, std::string::npos);
  text.insert(pos + 4, "1");
  std::ofstream(path) << text;
  EXPECT_THROW(LoadDataset(path), IoError);
  EXPECT_THROW(LoadDataset(path.parent_path() / "missing.jsonl"), IoError);
}

TEST(GeneratorKinds, NamesRoundTrip) {
  for (GeneratorKind kind :
       {GeneratorKind::kRandom, GeneratorKind::kMedium,
        GeneratorKind::kMediumReplay, GeneratorKind::kMediumExpert,
        GeneratorKind::kExpert, GeneratorKind::kCustom}) {
    EXPECT_EQ(ParseGeneratorKind(GeneratorKindName(kind)), kind);
  }
  EXPECT_THROW(ParseGeneratorKind("d4rl"), ValueError);
}

}  // namespace
}  // namespace plas
