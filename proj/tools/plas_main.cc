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

// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plas/plas.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Failure {
  int code;
};

// Throws Failure with the exit code matching `status`.
void Check(plas_status status, const std::string& what) {
  if (status == PLAS_OK) return;
  std::string message = plas_last_error();
  const std::string field = plas_last_error_field();
  std::cerr << "plas " << what << ": " << plas_status_name(status) << " error: "
            << message;
  if (!field.empty() && message.rfind(field, 0) != 0) {
    std::cerr << " (field " << field << ")";
  }
  std::cerr << "\n";
  throw Failure{plas_status_is_validation(status) ? kExitValidation
                                                  : kExitRuntime};
}

class OwnedString {
 public:
  ~OwnedString() { plas_string_free(s_); }
  char** out() { return &s_; }
  std::string str() const { return s_ != nullptr ? s_ : ""; }

 private:
  char* s_ = nullptr;
};

class Config {
 public:
  ~Config() { plas_config_free(c_); }
  plas_config** out() { return &c_; }
  plas_config* get() const { return c_; }

 private:
  plas_config* c_ = nullptr;
};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::uint64_t> seeds;
  bool quiet = false;
};

void AddCommon(CLI::App* app, CommonOptions& o) {
  app->add_option("-c,--config", o.config_path, "JSON config file");
  app->add_option("--set", o.overrides, "Override, e.g. agent.epsilon=0.05")
      ->take_all();
  app->add_option("--seed", o.seeds, "Seeds to run (replaces config seeds)");
  app->add_flag("-q,--quiet", o.quiet, "Suppress progress messages");
}

void LoadConfig(const CommonOptions& o, std::vector<std::string> extra,
                Config& config) {
  std::vector<std::string> all = o.overrides;
  all.insert(all.end(), extra.begin(), extra.end());
  if (!o.seeds.empty()) {
    std::string list = "seeds=[";
    for (std::size_t i = 0; i < o.seeds.size(); ++i) {
      list += (i ? "," : "") + std::to_string(o.seeds[i]);
    }
    all.push_back(list + "]");
  }
  std::vector<const char*> ptrs;
  for (const auto& s : all) ptrs.push_back(s.c_str());
  Check(plas_config_load(o.config_path.empty() ? nullptr
                                               : o.config_path.c_str(),
                         ptrs.data(), ptrs.size(), config.out()),
        "config");
}

std::vector<std::uint64_t> Seeds(const Config& config) {
  std::size_t n = 0;
  Check(plas_config_seeds(config.get(), nullptr, 0, &n), "config");
  std::vector<std::uint64_t> seeds(n);
  Check(plas_config_seeds(config.get(), seeds.data(), n, &n), "config");
  return seeds;
}

void PrintProgress(const char* message, void*) {
  std::cerr << "[plas] " << message << "\n";
}

plas_progress_fn ProgressFor(const CommonOptions& o) {
  return o.quiet ? nullptr : &PrintProgress;
}

void WriteText(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "plas: cannot write " << path << "\n";
    throw Failure{kExitRuntime};
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PLAS: offline RL with a latent action space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", plas_version());

  // gen-data
  CommonOptions gen_common;
  std::string gen_env = "edge_following";
  std::string gen_kind = "medium_expert";
  std::size_t gen_size = 10000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_references;
  auto* gen = app.add_subcommand("gen-data", "Generate an offline dataset");
  gen->add_option("-c,--config", gen_common.config_path,
                  "JSON config (dataset generator options)");
  gen->add_option("--set", gen_common.overrides, "Config override")
      ->take_all();
  gen->add_option("--env", gen_env, "point_mass | edge_following");
  gen->add_option("--kind", gen_kind,
                  "random | medium | medium_replay | medium_expert | expert | "
                  "custom");
  gen->add_option("--size", gen_size, "Number of transitions");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("-o,--out", gen_out, "Output JSONL path");
  gen->add_option("--reference-scores", gen_references,
                  "Write the random/expert reference scores to this file");

  // train-cvae
  CommonOptions cvae_common;
  std::string cvae_dataset, cvae_out, cvae_log;
  auto* cvae = app.add_subcommand("train-cvae", "Train the behaviour CVAE");
  AddCommon(cvae, cvae_common);
  cvae->add_option("-d,--dataset", cvae_dataset, "Dataset JSONL")->required();
  cvae->add_option("-o,--out", cvae_out, "CVAE checkpoint path")->required();
  cvae->add_option("--log", cvae_log, "ELBO curve JSONL path");

  // train-plas, train-bc, train-unconstrained
  struct TrainCommand {
    const char* name;
    const char* algorithm;
    const char* help;
    CommonOptions common;
    bool fresh = false;
    CLI::App* app = nullptr;
  };
  std::vector<TrainCommand> trains = {
      {"train-plas", "plas", "Run the PLAS pipeline", {}, false, nullptr},
      {"train-bc", "bc", "Run behaviour cloning", {}, false, nullptr},
      {"train-unconstrained", "unconstrained",
       "Run the unconstrained off-policy baseline", {}, false, nullptr}};
  for (auto& t : trains) {
    t.app = app.add_subcommand(t.name, t.help);
    AddCommon(t.app, t.common);
    t.app->add_flag("--fresh", t.fresh,
                    "Ignore existing checkpoints in the run directory");
  }

  // diagnose
  std::string diag_dir;
  bool diag_quiet = false;
  auto* diag = app.add_subcommand("diagnose", "Recompute run diagnostics");
  diag->add_option("-r,--run-dir", diag_dir, "Run directory")->required();
  diag->add_flag("-q,--quiet", diag_quiet, "Suppress progress messages");

  // sweep
  CommonOptions sweep_common;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  std::string sweep_aggregate;
  auto* sweep = app.add_subcommand("sweep", "Sweep epsilon or max latent action");
  AddCommon(sweep, sweep_common);
  sweep->add_option("--axis", sweep_axis, "epsilon | max_latent_action");
  sweep->add_option("--values", sweep_values, "Axis values")->take_all()
      ->delimiter(',');
  sweep->add_option("--aggregate", sweep_aggregate,
                    "Only re-aggregate an existing sweep directory");

  // mmd-lab
  std::string mmd_scenario = "all";
  std::string mmd_out = "mmd";
  std::uint64_t mmd_seed = 0;
  int mmd_samples = 500;
  int mmd_repeats = 20;
  std::string mmd_estimator = "v";
  auto* mmd = app.add_subcommand("mmd-lab", "Simulated MMD loss curves");
  mmd->add_option("--scenario", mmd_scenario,
                  "matched_normal | bimodal_hole | all");
  mmd->add_option("-o,--out-dir", mmd_out, "Output directory");
  mmd->add_option("--seed", mmd_seed, "Seed");
  mmd->add_option("--samples", mmd_samples, "Samples per estimate");
  mmd->add_option("--repeats", mmd_repeats, "Repeats per sweep value");
  mmd->add_option("--estimator", mmd_estimator, "v | u");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen->parsed()) {
      if (!gen_references.empty()) {
        OwnedString json;
        Check(plas_reference_scores(100, 0, json.out()), "reference scores");
        WriteText(gen_references, json.str() + "\n");
        std::cout << json.str() << "\n";
        if (gen_out.empty()) return kExitOk;
      }
      if (gen_out.empty()) {
        std::cerr << "plas gen-data: --out is required\n";
        return kExitValidation;
      }
      Config config;
      LoadConfig(gen_common, {}, config);
      plas_dataset* dataset = nullptr;
      Check(plas_dataset_generate(gen_env.c_str(), gen_kind.c_str(), gen_size,
                                  gen_seed, config.get(), &dataset),
            "gen-data");
      const plas_status saved = plas_dataset_save(dataset, gen_out.c_str());
      OwnedString info;
      const plas_status described = plas_dataset_info(dataset, info.out());
      plas_dataset_free(dataset);
      Check(saved, "gen-data");
      Check(described, "gen-data");
      std::cout << info.str() << "\n";
      return kExitOk;
    }

    if (cvae->parsed()) {
      Config config;
      LoadConfig(cvae_common, {}, config);
      const auto seeds = Seeds(config);
      plas_dataset* dataset = nullptr;
      Check(plas_dataset_load(cvae_dataset.c_str(), &dataset), "train-cvae");
      plas_cvae* model = nullptr;
      const plas_status trained = plas_cvae_train(
          dataset, config.get(), seeds.front(),
          cvae_log.empty() ? nullptr : cvae_log.c_str(), &model);
      plas_dataset_free(dataset);
      Check(trained, "train-cvae");
      const plas_status saved = plas_cvae_save(model, cvae_out.c_str());
      OwnedString hash;
      const plas_status hashed = plas_cvae_hash(model, hash.out());
      plas_cvae_free(model);
      Check(saved, "train-cvae");
      Check(hashed, "train-cvae");
      std::cout << "cvae " << cvae_out << " hash " << hash.str() << "\n";
      return kExitOk;
    }

    for (auto& t : trains) {
      if (!t.app->parsed()) continue;
      Config config;
      LoadConfig(t.common, {std::string("algorithm=") + t.algorithm}, config);
      for (std::uint64_t seed : Seeds(config)) {
        OwnedString report;
        Check(plas_run_experiment(config.get(), seed, t.fresh ? 0 : 1,
                                  ProgressFor(t.common), nullptr,
                                  report.out()),
              t.name);
        std::cout << report.str() << "\n";
      }
      return kExitOk;
    }

    if (diag->parsed()) {
      OwnedString report;
      Check(plas_diagnose(diag_dir.c_str(),
                          diag_quiet ? nullptr : &PrintProgress, nullptr,
                          report.out()),
            "diagnose");
      std::cout << report.str() << "\n";
      return kExitOk;
    }

    if (sweep->parsed()) {
      OwnedString csv;
      if (!sweep_aggregate.empty()) {
        Check(plas_aggregate_sweep(sweep_aggregate.c_str(), csv.out()),
              "sweep");
        std::cout << csv.str();
        return kExitOk;
      }
      if (sweep_axis.empty()) {
        std::cerr << "plas sweep: --axis is required\n";
        return kExitValidation;
      }
      Config config;
      LoadConfig(sweep_common, {}, config);
      Check(plas_run_sweep(config.get(), sweep_axis.c_str(),
                           sweep_values.empty() ? nullptr : sweep_values.data(),
                           sweep_values.size(), ProgressFor(sweep_common),
                           nullptr, csv.out()),
            "sweep");
      std::cout << csv.str();
      return kExitOk;
    }

    if (mmd->parsed()) {
      std::vector<std::string> scenarios;
      if (mmd_scenario == "all") {
        scenarios = {"matched_normal", "bimodal_hole"};
      } else {
        scenarios = {mmd_scenario};
      }
      for (const auto& s : scenarios) {
        OwnedString csv, long_format, summary;
        Check(plas_mmd_run(s.c_str(), mmd_seed, mmd_samples, mmd_repeats,
                           mmd_estimator.c_str(), csv.out(), long_format.out(),
                           summary.out()),
              "mmd-lab");
        const std::filesystem::path dir(mmd_out);
        WriteText((dir / (s + ".csv")).string(), csv.str());
        WriteText((dir / (s + ".dat")).string(), long_format.str());
        WriteText((dir / (s + "_summary.json")).string(), summary.str() + "\n");
        std::cout << summary.str() << "\n";
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "plas: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
