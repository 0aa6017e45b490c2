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


#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "plas/config.h"
#include "plas/errors.h"
#include "plas/experiment.h"

namespace plas {
namespace {

namespace fs = std::filesystem;

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plas-experiment-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), root).string()] = ReadFile(entry.path());
    }
  }
  return out;
}

ExperimentConfig SmallConfig(const fs::path& output_dir) {
  ExperimentConfig c;
  c.env = "edge_following";
  c.dataset.kind = GeneratorKind::kRandom;
  c.dataset.size = 1000;
  c.dataset.options.random_action_range = 0.7;
  c.cvae.hidden = {32, 32};
  c.cvae.steps = 200;
  c.cvae.log_interval = 100;
  c.agent.actor_hidden = {32, 32};
  c.agent.critic_hidden = {32, 32};
  c.agent.perturbation_hidden = {32, 32};
  c.train.steps = 300;
  c.train.batch_size = 32;
  c.train.log_interval = 100;
  c.train.eval_interval = 100;
  c.train.eval_episodes = 2;
  c.bc.steps = 200;
  c.bc.log_interval = 100;
  c.checkpoint_interval = 100;
  c.diagnostic_episodes = 2;
  c.output_dir = output_dir.string();
  c.reference_file =
      (fs::path(PLAS_SOURCE_DIR) / "data" / "reference_scores.json").string();
  return c;
}

TEST(NormalizeScore, MapsReferencesToZeroAndHundred) {
  EXPECT_DOUBLE_EQ(NormalizeScore(-3.0, -3.0, 7.0), 0.0);
  EXPECT_DOUBLE_EQ(NormalizeScore(7.0, -3.0, 7.0), 100.0);
  EXPECT_DOUBLE_EQ(NormalizeScore(2.0, -3.0, 7.0), 50.0);
  EXPECT_LT(NormalizeScore(1.999, -3.0, 7.0), NormalizeScore(2.0, -3.0, 7.0));
  EXPECT_THROW(NormalizeScore(1.0, 2.0, 2.0), ValueError);
  EXPECT_THROW(NormalizeScore(1.0, 3.0, 2.0), ValueError);
}

TEST(RunExperiment, SmokeRunWritesEveryArtifact) {
  const fs::path out = FreshDir("smoke");
  const ExperimentConfig config = SmallConfig(out);
  const auto start = std::chrono::steady_clock::now();
  const RunResult result = RunExperiment(config, 0, true);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  EXPECT_LT(seconds, 60.0);
  EXPECT_FALSE(result.resumed);
  EXPECT_EQ(result.run_dir, out / "plas-seed0");
  for (const char* name :
       {"config.json", "dataset.jsonl", "cvae.json", "cvae_log.jsonl",
        "checkpoint.json", "train_log.jsonl", "report.json", "qerror.csv"}) {
    EXPECT_TRUE(fs::exists(result.run_dir / name)) << name;
  }
  for (const auto& entry : fs::directory_iterator(result.run_dir)) {
    if (entry.path().string().ends_with(".tmp")) ADD_FAILURE() << entry.path();
    // The dataset records carry the stamp in their sidecar.
    if (entry.path().filename() == "dataset.jsonl") continue;
    EXPECT_NE(ReadFile(entry.path()).find(result.config_hash),
              std::string::npos)
        << entry.path().filename() << " lacks the config hash";
  }
  const Json& report = result.report;
  for (const char* key : {"final_return_mean", "normalized_score", "q_error",
                          "value_bound", "support"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report.at("config_hash"), result.config_hash);
}

TEST(RunExperiment, IsByteIdenticalAcrossReruns) {
  const fs::path out = FreshDir("determinism");
  const ExperimentConfig config = SmallConfig(out);
  RunExperiment(config, 1, true);
  const auto first = ReadTree(out);
  fs::remove_all(out);
  RunExperiment(config, 1, true);
  const auto second = ReadTree(out);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [name, bytes] : first) {
    ASSERT_TRUE(second.count(name)) << name;
    EXPECT_EQ(bytes, second.at(name)) << name;
  }
}

TEST(RunExperiment, ResumesAnInterruptedRunExactly) {
  const fs::path straight_dir = FreshDir("straight");
  const fs::path broken_dir = FreshDir("interrupted");
  ExperimentConfig config = SmallConfig(straight_dir);
  const RunResult straight = RunExperiment(config, 2, true);

  config.output_dir = broken_dir.string();
  const ProgressFn stop_at_200 = [](const std::string& message) {
    if (message.rfind("step 200 ", 0) == 0) throw std::runtime_error("killed");
  };
  EXPECT_THROW(RunExperiment(config, 2, true, stop_at_200), std::runtime_error);
  const RunResult resumed = RunExperiment(config, 2, true);
  EXPECT_TRUE(resumed.resumed);
  EXPECT_EQ(resumed.final_return, straight.final_return);

  // The hash covers output_dir, so compare the logs without it.
  auto strip = [](std::string text, const std::string& hash) {
    for (std::size_t p; (p = text.find(hash)) != std::string::npos;) {
      text.erase(p, hash.size());
    }
    return text;
  };
  EXPECT_EQ(strip(ReadFile(resumed.run_dir / "train_log.jsonl"),
                  resumed.config_hash),
            strip(ReadFile(straight.run_dir / "train_log.jsonl"),
                  straight.config_hash));
}

TEST(RunExperiment, RefusesToResumeUnderAnotherConfig) {
  const fs::path out = FreshDir("mismatch");
  ExperimentConfig config = SmallConfig(out);
  RunExperiment(config, 3, true);
  config.agent.critic_lr = 2e-3;
  try {
    RunExperiment(config, 3, true);
    ADD_FAILURE() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "config_hash");
  }
  // Starting over is allowed.
  EXPECT_NO_THROW(RunExperiment(config, 3, false));
}

TEST(RunExperiment, RejectsInvalidConfigsBeforeWork) {
  const fs::path out = FreshDir("invalid");
  ExperimentConfig config = SmallConfig(out);
  config.agent.lambda = 1.5;
  EXPECT_THROW(RunExperiment(config, 0, true), ConfigError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(RunExperiment, BaselinesProduceReports) {
  const fs::path out = FreshDir("baselines");
  ExperimentConfig config = SmallConfig(out);
  config.algorithm = Algorithm::kBc;
  const RunResult bc = RunExperiment(config, 0, true);
  EXPECT_TRUE(fs::exists(bc.run_dir / "policy.json"));
  EXPECT_TRUE(bc.report.contains("support"));
  config.algorithm = Algorithm::kUnconstrained;
  const RunResult free = RunExperiment(config, 0, true);
  EXPECT_EQ(free.run_dir, out / "unconstrained-seed0");
  EXPECT_TRUE(free.report.contains("value_bound"));
  EXPECT_FALSE(fs::exists(free.run_dir / "cvae.json"));

  const Json diagnosed = DiagnoseRun(free.run_dir);
  EXPECT_TRUE(fs::exists(free.run_dir / "diagnostics.json"));
  EXPECT_EQ(diagnosed.at("config_hash"), free.config_hash);
}

TEST(Sweep, FourValuesThreeSeedsGiveTwelveRows) {
  const fs::path out = FreshDir("sweep");
  ExperimentConfig config = SmallConfig(out);
  config.train.steps = 100;
  config.seeds = {0, 1, 2};
  const SweepSpec spec{"max_latent_action", {0.5, 1.0, 2.0, 3.0}};
  const std::vector<SweepRow> rows = RunSweep(config, spec);
  ASSERT_EQ(rows.size(), 12u);
  std::set<std::pair<double, std::uint64_t>> cells;
  for (const SweepRow& row : rows) {
    EXPECT_EQ(row.status, "ok") << row.run_dir;
    cells.insert({row.value, row.seed});
  }
  EXPECT_EQ(cells.size(), 12u);

  const fs::path sweep_dir = SweepDirectory(config, "max_latent_action");
  const std::string csv = ReadFile(sweep_dir / "aggregate.csv");
  EXPECT_EQ(SweepRowsToCsv(AggregateSweep(sweep_dir)), csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(Sweep, ZeroEpsilonCellMatchesARunWithoutTheHead) {
  const fs::path out = FreshDir("epsilon");
  ExperimentConfig config = SmallConfig(out);
  config.train.steps = 200;
  const SweepSpec spec{"epsilon", {0.0, 0.1}};
  const std::vector<SweepRow> rows = RunSweep(config, spec);
  ASSERT_EQ(rows.size(), 2u);

  const fs::path shared = SweepDirectory(config, "epsilon") / "shared" / "seed0";
  ExperimentConfig plain = config;
  plain.output_dir = (out / "plain").string();
  plain.dataset.path = (shared / "dataset.jsonl").string();
  plain.cvae_path = (shared / "cvae.json").string();
  plain.agent.epsilon = 0.0;
  const RunResult reference = RunExperiment(plain, 0, true);

  const SweepRow& zero = rows[0].value == 0.0 ? rows[0] : rows[1];
  const SweepRow& other = rows[0].value == 0.0 ? rows[1] : rows[0];
  EXPECT_EQ(zero.final_return, reference.final_return);
  const Json cell = ReadJsonFile(fs::path(zero.run_dir) / "checkpoint.json");
  const Json ref = ReadJsonFile(reference.run_dir / "checkpoint.json");
  EXPECT_EQ(cell.at("payload").at("agent").dump(),
            ref.at("payload").at("agent").dump());
  EXPECT_EQ(other.status, "ok");
}

TEST(Sweep, FailedCellsDoNotAbortTheSweep) {
  const fs::path out = FreshDir("sweep-failure");
  ExperimentConfig config = SmallConfig(out);
  config.train.steps = 100;
  config.dataset.path = (out / "does-not-exist.jsonl").string();
  const std::vector<SweepRow> rows =
      RunSweep(config, SweepSpec{"epsilon", {0.0, 0.1}});
  ASSERT_EQ(rows.size(), 2u);
  for (const SweepRow& row : rows) {
    EXPECT_EQ(row.status.rfind("failed: ", 0), 0u) << row.status;
  }
  EXPECT_THROW(RunSweep(config, SweepSpec{"gamma", {0.9}}), ConfigError);
}

}  // namespace
}  // namespace plas
