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


#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "plas/plas.h"

namespace {

namespace fs = std::filesystem;

// Owns a string returned by the library.
std::string Take(char* s) {
  std::string out = s == nullptr ? "" : s;
  plas_string_free(s);
  return out;
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plas-capi-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CApi, StatusNamesAndClasses) {
  EXPECT_STREQ(plas_status_name(PLAS_OK), "ok");
  EXPECT_STREQ(plas_status_name(PLAS_ERR_CONFIG), "config");
  EXPECT_STREQ(plas_status_name(PLAS_ERR_RUNTIME), "runtime");
  EXPECT_TRUE(plas_status_is_validation(PLAS_ERR_CONFIG));
  EXPECT_TRUE(plas_status_is_validation(PLAS_ERR_INVALID_ARGUMENT));
  EXPECT_TRUE(plas_status_is_validation(PLAS_ERR_VALUE));
  EXPECT_FALSE(plas_status_is_validation(PLAS_ERR_IO));
  EXPECT_FALSE(plas_status_is_validation(PLAS_ERR_NUMERIC));
  EXPECT_FALSE(plas_status_is_validation(PLAS_OK));
  EXPECT_NE(std::string(plas_version()), "");
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(plas_config_from_json(nullptr, nullptr), PLAS_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(plas_last_error()).find("NULL"), std::string::npos);
  size_t n = 0;
  EXPECT_EQ(plas_dataset_size(nullptr, &n), PLAS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(plas_normalize_score(0.0, 0.0, 1.0, nullptr),
            PLAS_ERR_INVALID_ARGUMENT);
  plas_config_free(nullptr);
  plas_dataset_free(nullptr);
  plas_cvae_free(nullptr);
}

TEST(CApi, ConfigErrorsCarryTheFieldPath) {
  plas_config* config = nullptr;
  EXPECT_EQ(plas_config_from_json(R"({"agent": {"lambda": 1.5}})", &config),
            PLAS_ERR_CONFIG);
  EXPECT_EQ(config, nullptr);
  EXPECT_STREQ(plas_last_error_field(), "agent.lambda");
  EXPECT_EQ(plas_config_from_json("{oops", &config), PLAS_ERR_CONFIG);
  EXPECT_EQ(plas_config_from_json(R"({"agent": {"lamda": 1}})", &config),
            PLAS_ERR_CONFIG);
  EXPECT_STREQ(plas_last_error_field(), "agent.lamda");
}

TEST(CApi, ConfigRoundTripAndOverrides) {
  plas_config* config = nullptr;
  ASSERT_EQ(plas_config_from_json(R"({"seeds": [4, 5]})", &config), PLAS_OK);
  EXPECT_STREQ(plas_last_error(), "");
  char* hash = nullptr;
  ASSERT_EQ(plas_config_hash(config, &hash), PLAS_OK);
  const std::string before = Take(hash);
  EXPECT_EQ(before.size(), 16u);

  ASSERT_EQ(plas_config_set(config, "agent.epsilon=0.1"), PLAS_OK);
  ASSERT_EQ(plas_config_hash(config, &hash), PLAS_OK);
  EXPECT_NE(Take(hash), before);
  // A rejected override leaves the handle unchanged.
  EXPECT_EQ(plas_config_set(config, "agent.tau=0"), PLAS_ERR_CONFIG);
  char* json = nullptr;
  ASSERT_EQ(plas_config_to_json(config, &json), PLAS_OK);
  const std::string text = Take(json);
  EXPECT_NE(text.find("\"epsilon\": 0.1"), std::string::npos);
  EXPECT_NE(text.find("\"tau\": 0.005"), std::string::npos);

  uint64_t seeds[4] = {};
  size_t count = 0;
  ASSERT_EQ(plas_config_seeds(config, seeds, 4, &count), PLAS_OK);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(seeds[0], 4u);
  EXPECT_EQ(seeds[1], 5u);
  plas_config_free(config);
}

TEST(CApi, DatasetLifecycle) {
  const fs::path dir = FreshDir("dataset");
  plas_dataset* dataset = nullptr;
  ASSERT_EQ(plas_dataset_generate("edge_following", "random", 200, 3, nullptr,
                                  &dataset),
            PLAS_OK);
  size_t size = 0;
  ASSERT_EQ(plas_dataset_size(dataset, &size), PLAS_OK);
  EXPECT_EQ(size, 200u);
  const std::string path = (dir / "d.jsonl").string();
  ASSERT_EQ(plas_dataset_save(dataset, path.c_str()), PLAS_OK);
  plas_dataset* loaded = nullptr;
  ASSERT_EQ(plas_dataset_load(path.c_str(), &loaded), PLAS_OK);
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(plas_dataset_info(dataset, &a), PLAS_OK);
  ASSERT_EQ(plas_dataset_info(loaded, &b), PLAS_OK);
  EXPECT_EQ(Take(a), Take(b));
  plas_dataset_free(loaded);
  plas_dataset_free(dataset);

  plas_dataset* bad = nullptr;
  EXPECT_EQ(plas_dataset_generate("walker", "random", 10, 0, nullptr, &bad),
            PLAS_ERR_VALUE);
  EXPECT_EQ(plas_dataset_generate("edge_following", "random", 0, 0, nullptr,
                                  &bad),
            PLAS_ERR_VALUE);
  EXPECT_EQ(plas_dataset_load((dir / "none.jsonl").string().c_str(), &bad),
            PLAS_ERR_IO);
  EXPECT_EQ(bad, nullptr);
}

TEST(CApi, CvaeTrainSaveLoad) {
  const fs::path dir = FreshDir("cvae");
  plas_config* config = nullptr;
  ASSERT_EQ(plas_config_from_json(
                R"({"cvae": {"hidden": [8], "steps": 50, "log_interval": 25}})",
                &config),
            PLAS_OK);
  plas_dataset* dataset = nullptr;
  ASSERT_EQ(plas_dataset_generate("point_mass", "random", 100, 1, config,
                                  &dataset),
            PLAS_OK);
  plas_cvae* cvae = nullptr;
  const std::string log = (dir / "log.jsonl").string();
  ASSERT_EQ(plas_cvae_train(dataset, config, 2, log.c_str(), &cvae), PLAS_OK);
  EXPECT_TRUE(fs::exists(log));
  const std::string path = (dir / "cvae.json").string();
  ASSERT_EQ(plas_cvae_save(cvae, path.c_str()), PLAS_OK);
  plas_cvae* loaded = nullptr;
  ASSERT_EQ(plas_cvae_load(path.c_str(), &loaded), PLAS_OK);
  char* h1 = nullptr;
  char* h2 = nullptr;
  ASSERT_EQ(plas_cvae_hash(cvae, &h1), PLAS_OK);
  ASSERT_EQ(plas_cvae_hash(loaded, &h2), PLAS_OK);
  EXPECT_EQ(Take(h1), Take(h2));
  plas_cvae_free(loaded);
  plas_cvae_free(cvae);
  plas_dataset_free(dataset);
  plas_config_free(config);
}

struct Messages {
  std::vector<std::string> lines;
};

void Collect(const char* message, void* user) {
  static_cast<Messages*>(user)->lines.push_back(message);
}

TEST(CApi, RunDiagnoseAndSweep) {
  const fs::path dir = FreshDir("run");
  const std::string json =
      R"({"dataset": {"kind": "random", "size": 300},
          "cvae": {"hidden": [16], "steps": 50, "log_interval": 25},
          "agent": {"actor_hidden": [16], "critic_hidden": [16]},
          "train": {"steps": 60, "log_interval": 30, "eval_interval": 30,
                    "eval_episodes": 1},
          "checkpoint_interval": 30, "diagnostic_episodes": 1,
          "output_dir": ")" +
      dir.string() + R"("})";
  plas_config* config = nullptr;
  ASSERT_EQ(plas_config_from_json(json.c_str(), &config), PLAS_OK)
      << plas_last_error();
  Messages messages;
  char* report = nullptr;
  ASSERT_EQ(plas_run_experiment(config, 0, 1, Collect, &messages, &report),
            PLAS_OK)
      << plas_last_error();
  EXPECT_NE(Take(report).find("normalized_score"), std::string::npos);
  EXPECT_FALSE(messages.lines.empty());

  char* diag = nullptr;
  ASSERT_EQ(plas_diagnose((dir / "plas-seed0").string().c_str(), nullptr,
                          nullptr, &diag),
            PLAS_OK);
  EXPECT_NE(Take(diag).find("q_error"), std::string::npos);
  EXPECT_EQ(plas_diagnose((dir / "missing").string().c_str(), nullptr, nullptr,
                          &diag),
            PLAS_ERR_IO);

  const double values[] = {0.0, 0.1};
  char* csv = nullptr;
  ASSERT_EQ(plas_run_sweep(config, "epsilon", values, 2, nullptr, nullptr, &csv),
            PLAS_OK)
      << plas_last_error();
  const std::string rows = Take(csv);
  char* again = nullptr;
  ASSERT_EQ(plas_aggregate_sweep((dir / "sweep-epsilon").string().c_str(),
                                 &again),
            PLAS_OK);
  EXPECT_EQ(Take(again), rows);
  EXPECT_EQ(plas_run_sweep(config, "gamma", values, 2, nullptr, nullptr, &csv),
            PLAS_ERR_CONFIG);
  EXPECT_STREQ(plas_last_error_field(), "sweep.axis");
  plas_config_free(config);
}

TEST(CApi, NormalizeReferencesAndMmd) {
  double score = 0.0;
  ASSERT_EQ(plas_normalize_score(5.0, 0.0, 10.0, &score), PLAS_OK);
  EXPECT_EQ(score, 50.0);
  EXPECT_EQ(plas_normalize_score(5.0, 1.0, 1.0, &score), PLAS_ERR_VALUE);

  char* refs = nullptr;
  ASSERT_EQ(plas_reference_scores(3, 0, &refs), PLAS_OK);
  EXPECT_NE(Take(refs).find("edge_following"), std::string::npos);

  char* csv = nullptr;
  char* long_format = nullptr;
  char* summary = nullptr;
  ASSERT_EQ(plas_mmd_run("matched_normal", 1, 20, 2, "u", &csv, &long_format,
                         &summary),
            PLAS_OK)
      << plas_last_error();
  EXPECT_FALSE(Take(csv).empty());
  EXPECT_FALSE(Take(long_format).empty());
  EXPECT_NE(Take(summary).find("argmin"), std::string::npos);
  EXPECT_EQ(plas_mmd_run("rings", 1, 20, 2, nullptr, nullptr, nullptr, nullptr),
            PLAS_ERR_CONFIG);
  EXPECT_STREQ(plas_last_error_field(), "mmd.scenario");
}

}  // namespace
