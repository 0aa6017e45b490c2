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

#include "plas/experiment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "plas/baselines.h"
#include "plas/errors.h"
#include "plas/plas_agent.h"

namespace plas {
namespace fs = std::filesystem;

namespace {

constexpr int kProbeStates = 1000;
constexpr std::size_t kCalibrationProbes = 2000;

void Report(const ProgressFn& progress, const std::string& message) {
  if (progress) progress(message);
}

std::string FormatValue(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

std::string FormatCsvNumber(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

// Writes via a temporary file so that a crash never leaves half a record.
void WriteJsonAtomic(const fs::path& path, const Json& json) {
  const fs::path tmp = path.string() + ".tmp";
  WriteJsonFile(tmp, json);
  fs::rename(tmp, path);
}

std::vector<Json> ReadJsonLines(const fs::path& path) {
  std::vector<Json> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }
  return out;
}

void WriteJsonLines(const fs::path& path, const std::vector<Json>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Json& j : lines) out << j.dump() << '\n';
}

std::string DatasetKey(const ExperimentConfig& config, std::uint64_t seed) {
  Json key = {{"env", config.env},
              {"dataset", ConfigToJson(config).at("dataset")},
              {"seed", DatasetSeed(config, seed)}};
  return HashToHex(Fnv1a64(key.dump()));
}

std::string CvaeKey(const ExperimentConfig& config, std::uint64_t seed,
                    const TransitionDataset& dataset) {
  Json key = {{"cvae", ConfigToJson(config).at("cvae")},
              {"dataset", HashToHex(dataset.ContentHash())},
              {"seed", seed}};
  return HashToHex(Fnv1a64(key.dump()));
}

Matrix ProbeStates(const TransitionDataset& dataset, std::uint64_t seed) {
  Rng rng = MakeRng(seed, "diagnostics/probe");
  const std::size_t n = std::min<std::size_t>(kProbeStates, dataset.size());
  std::vector<std::size_t> idx(dataset.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  return GatherBatch(dataset, idx).states;
}

Json SupportReport(const TransitionDataset& dataset, const Matrix& states,
                   const Matrix& actions, std::uint64_t seed) {
  const SupportIndex index(dataset);
  const double threshold =
      index.CalibrateThreshold(0.99, kCalibrationProbes, seed);
  const Vector d = index.Distances(states, actions);
  const std::vector<double> distances(d.data(), d.data() + d.size());
  const SupportSummary s = SummarizeDistances(distances);
  return {{"threshold", threshold},
          {"violation_rate", ViolationRate(distances, threshold)},
          {"mean", s.mean},
          {"median", s.median},
          {"p95", s.p95},
          {"p99", s.p99},
          {"max", s.max},
          {"n", s.n}};
}

struct FinalEval {
  double mean = 0.0;
  double std = 0.0;
};

FinalEval LastEval(const fs::path& log_path) {
  const std::vector<Json> lines = ReadJsonLines(log_path);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (it->contains("eval_return_mean") &&
        !it->at("eval_return_mean").is_null()) {
      return {it->at("eval_return_mean").get<double>(),
              it->at("eval_return_std").get<double>()};
    }
  }
  throw IoError(log_path.string() + ": no evaluation recorded");
}

Json BaseReport(const ExperimentConfig& config, std::uint64_t seed,
                const TransitionDataset& dataset, const ReferenceScores& refs,
                const FinalEval& eval) {
  return {{"config_hash", ConfigHashHex(config)},
          {"seed", seed},
          {"algorithm", AlgorithmName(config.algorithm)},
          {"env", config.env},
          {"final_return_mean", eval.mean},
          {"final_return_std", eval.std},
          {"normalized_score",
           NormalizeScore(eval.mean, refs.random_ref, refs.expert_ref)},
          {"references",
           {{"random_ref", refs.random_ref}, {"expert_ref", refs.expert_ref}}},
          {"dataset",
           {{"kind", GeneratorKindName(dataset.metadata().generator_kind)},
            {"size", dataset.size()},
            {"content_hash", HashToHex(dataset.ContentHash())}}}};
}

Json AgentReport(const ExperimentConfig& config, std::uint64_t seed,
                 const TransitionDataset& dataset, const ToyEnv& env,
                 const ActorCriticAgent& agent, const ReferenceScores& refs,
                 const FinalEval& eval, std::int64_t nonfinite) {
  Json report = BaseReport(config, seed, dataset, refs, eval);
  const std::uint64_t diag_seed = DeriveSeed(seed, "diagnostics");
  const QErrorReport q = AgentQErrorReport(
      agent, env, config.diagnostic_episodes, config.agent.gamma, diag_seed);
  report["q_error"] = QErrorReportToJson(q);
  const Matrix states = ProbeStates(dataset, seed);
  const ValueBoundCheck bound =
      CheckValueBound(agent, env, states, config.agent.gamma);
  report["value_bound"] = {{"mean_q", bound.mean_q},
                           {"mean_bound", bound.mean_bound},
                           {"exceeds", bound.Exceeds()}};
  report["support"] = SupportReport(dataset, states, agent.Act(states), seed);
  report["nonfinite_updates"] = nonfinite;
  return report;
}

Json StampedCheckpoint(const std::string& kind, Json payload,
                       const std::string& hash, std::uint64_t seed) {
  Json ck = MakeCheckpoint(kind, std::move(payload));
  ck["config_hash"] = hash;
  ck["seed"] = seed;
  return ck;
}

void WriteQErrorCsv(const fs::path& path, const Json& report,
                    const ExperimentConfig& config, std::uint64_t seed,
                    std::int64_t step) {
  if (!report.contains("q_error")) return;
  const Json& q = report.at("q_error");
  QErrorReport r;
  r.mse = q.at("mse");
  r.positive_error_pct = q.at("positive_error_pct");
  r.positive_error_mean = q.at("positive_error_mean");
  r.negative_error_mean = q.at("negative_error_mean");
  r.n_points = q.at("n_points");
  r.n_episodes = q.at("n_episodes");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << QErrorCsvHeader() << '\n'
      << QErrorCsvRow(r, AlgorithmName(config.algorithm),
                      GeneratorKindName(config.dataset.kind), seed, step,
                      ConfigHashHex(config))
      << '\n';
}

ExperimentConfig ReadRunConfig(const fs::path& run_dir, std::uint64_t* seed,
                               std::string* hash) {
  const Json stamp = ReadJsonFile(run_dir / "config.json");
  try {
    *seed = stamp.at("seed").get<std::uint64_t>();
    *hash = stamp.at("config_hash").get<std::string>();
    return ConfigFromJson(stamp.at("config"));
  } catch (const Json::exception& e) {
    throw IoError(run_dir.string() + "/config.json: " + e.what());
  }
}

}  // namespace

double NormalizeScore(double raw, double random_ref, double expert_ref) {
  if (!(expert_ref > random_ref) || !std::isfinite(expert_ref) ||
      !std::isfinite(random_ref)) {
    throw ValueError("normalization needs expert_ref > random_ref");
  }
  return 100.0 * (raw - random_ref) / (expert_ref - random_ref);
}

ReferenceTable ComputeReferenceTable(int episodes, std::uint64_t seed) {
  ReferenceTable table;
  for (const std::string& name : EnvNames()) {
    table[name] = ComputeReferenceScores(*MakeEnv(name), episodes, seed);
  }
  return table;
}

Json ReferenceTableToJson(const ReferenceTable& table, int episodes,
                          std::uint64_t seed) {
  Json envs = Json::object();
  for (const auto& [name, refs] : table) {
    envs[name] = {{"random_ref", refs.random_ref},
                  {"expert_ref", refs.expert_ref}};
  }
  return {{"format", "plas-reference-scores"},
          {"version", kCheckpointVersion},
          {"episodes", episodes},
          {"seed", seed},
          {"envs", envs}};
}

ReferenceTable ReferenceTableFromJson(const Json& json) {
  ReferenceTable table;
  try {
    if (json.at("format") != "plas-reference-scores") {
      throw IoError("not a reference score record");
    }
    if (json.at("version").get<int>() != kCheckpointVersion) {
      throw IoError("unsupported reference score version");
    }
    for (const auto& [name, refs] : json.at("envs").items()) {
      table[name] = {refs.at("random_ref").get<double>(),
                     refs.at("expert_ref").get<double>()};
    }
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed reference scores: ") + e.what());
  }
  return table;
}

ReferenceScores LookupReferences(const fs::path& path, const std::string& env) {
  if (!path.empty() && fs::exists(path)) {
    const ReferenceTable table = ReferenceTableFromJson(ReadJsonFile(path));
    const auto it = table.find(env);
    if (it != table.end()) return it->second;
  }
  return ComputeReferenceScores(*MakeEnv(env));
}

fs::path RunDirectory(const ExperimentConfig& config, std::uint64_t seed) {
  return fs::path(config.output_dir) /
         (AlgorithmName(config.algorithm) + "-seed" + std::to_string(seed));
}

std::uint64_t DatasetSeed(const ExperimentConfig& config, std::uint64_t seed) {
  return config.dataset.seed + seed;
}

TransitionDataset PrepareDataset(const ExperimentConfig& config,
                                 std::uint64_t seed, const fs::path& dir,
                                 const ProgressFn& progress) {
  if (!config.dataset.path.empty()) {
    TransitionDataset dataset = LoadDataset(config.dataset.path);
    if (dataset.metadata().env_name != config.env) {
      throw ConfigError("dataset.path", "dataset was generated on '" +
                                            dataset.metadata().env_name +
                                            "', not '" + config.env + "'");
    }
    return dataset;
  }
  const fs::path path = dir / "dataset.jsonl";
  const std::string key = DatasetKey(config, seed);
  if (fs::exists(path) && fs::exists(SidecarPath(path))) {
    const Json sidecar = ReadJsonFile(SidecarPath(path));
    if (sidecar.value("dataset_key", "") == key) {
      Report(progress, "reusing dataset " + path.string());
      return LoadDataset(path);
    }
  }
  Report(progress, "generating " + GeneratorKindName(config.dataset.kind) +
                       " dataset on " + config.env);
  const auto env = MakeEnv(config.env);
  TransitionDataset dataset =
      GenerateDataset(*env, config.dataset.kind, config.dataset.size,
                      DatasetSeed(config, seed), config.dataset.options);
  SaveDataset(dataset, path);
  Json sidecar = ReadJsonFile(SidecarPath(path));
  sidecar["dataset_key"] = key;
  sidecar["config_hash"] = ConfigHashHex(config);
  sidecar["run_seed"] = seed;
  WriteJsonAtomic(SidecarPath(path), sidecar);
  return dataset;
}

std::shared_ptr<const BehaviorCvae> PrepareCvae(
    const ExperimentConfig& config, std::uint64_t seed,
    const TransitionDataset& dataset, const fs::path& dir,
    const ProgressFn& progress) {
  auto check = [&](const BehaviorCvae& cvae) {
    if (cvae.state_dim != dataset.state_dim() ||
        cvae.action_dim != dataset.action_dim()) {
      throw ConfigError("cvae.path", "CVAE dimensions do not match dataset");
    }
  };
  if (!config.cvae_path.empty()) {
    const Json ck = ReadJsonFile(config.cvae_path);
    auto cvae =
        std::make_shared<BehaviorCvae>(CvaeFromJson(OpenCheckpoint(ck, "cvae")));
    check(*cvae);
    return cvae;
  }
  const fs::path path = dir / "cvae.json";
  const std::string key = CvaeKey(config, seed, dataset);
  if (fs::exists(path)) {
    const Json ck = ReadJsonFile(path);
    if (ck.value("cvae_key", "") == key) {
      Report(progress, "reusing CVAE " + path.string());
      return std::make_shared<BehaviorCvae>(
          CvaeFromJson(OpenCheckpoint(ck, "cvae")));
    }
  }
  Report(progress, "training CVAE for " + std::to_string(config.cvae.steps) +
                       " steps");
  fs::create_directories(dir);
  const std::string hash = ConfigHashHex(config);
  std::ofstream log(dir / "cvae_log.jsonl", std::ios::trunc);
  const ElboSink sink = [&](const ElboLogEntry& e) {
    log << Json{{"step", e.step},
                {"reconstruction_loss", e.report.reconstruction_loss},
                {"kl_loss", e.report.kl_loss},
                {"total", e.report.total},
                {"config_hash", hash}}
               .dump()
        << '\n';
  };
  CvaeTrainResult trained = TrainCvae(dataset, config.cvae, seed, sink);
  Json ck = StampedCheckpoint("cvae", CvaeToJson(trained.cvae), hash, seed);
  ck["cvae_key"] = key;
  WriteJsonAtomic(path, ck);
  return std::make_shared<BehaviorCvae>(std::move(trained.cvae));
}

RunResult RunExperiment(const ExperimentConfig& config, std::uint64_t seed,
                        bool resume, const ProgressFn& progress) {
  config.Validate();
  const std::string hash = ConfigHashHex(config);
  const fs::path dir = RunDirectory(config, seed);
  const fs::path checkpoint_path = dir / "checkpoint.json";
  const fs::path log_path = dir / "train_log.jsonl";

  if (fs::exists(dir / "config.json")) {
    const Json old = ReadJsonFile(dir / "config.json");
    const bool same = old.value("config_hash", "") == hash;
    if (!same && resume && fs::exists(checkpoint_path)) {
      throw ConfigError("config_hash",
                        dir.string() + " holds a run with config hash " +
                            old.value("config_hash", "?") + ", not " + hash);
    }
  }
  if (!resume) {
    for (const char* name : {"checkpoint.json", "train_log.jsonl",
                             "report.json", "qerror.csv", "policy.json"}) {
      fs::remove(dir / name);
    }
  }
  fs::create_directories(dir);
  WriteJsonAtomic(dir / "config.json", {{"config", ConfigToJson(config)},
                                        {"config_hash", hash},
                                        {"seed", seed}});

  const auto env = MakeEnv(config.env);
  const TransitionDataset dataset = PrepareDataset(config, seed, dir, progress);
  if (dataset.state_dim() != env->state_dim() ||
      dataset.action_dim() != env->action_dim()) {
    throw ConfigError("dataset", "dataset dimensions do not match " +
                                     config.env);
  }
  const ReferenceScores refs = LookupReferences(config.reference_file,
                                                config.env);
  const std::uint64_t eval_seed = DeriveSeed(seed, "train/eval");

  RunResult result;
  result.run_dir = dir;
  result.config_hash = hash;
  result.seed = seed;

  if (config.algorithm == Algorithm::kBc) {
    Report(progress, "training behaviour cloning");
    std::vector<Json> lines;
    const BcSink sink = [&](const BcLogEntry& e) {
      lines.push_back({{"step", e.step},
                       {"loss", e.loss},
                       {"eval_return_mean", nullptr},
                       {"eval_return_std", nullptr},
                       {"config_hash", hash}});
    };
    const BcTrainResult bc = TrainBc(dataset, config.bc, seed, sink);
    const BcPolicy& policy = bc.policy;
    const EvalResult eval = EvaluatePolicy(
        *env, [&policy](const Vector& s) { return policy.Act(s); },
        config.train.eval_episodes, eval_seed);
    lines.back()["eval_return_mean"] = eval.mean;
    lines.back()["eval_return_std"] = eval.std;
    WriteJsonLines(log_path, lines);
    WriteJsonAtomic(dir / "policy.json",
                    StampedCheckpoint("bc", BcToJson(policy), hash, seed));
    Json report = BaseReport(config, seed, dataset, refs, {eval.mean, eval.std});
    const Matrix states = ProbeStates(dataset, seed);
    report["support"] = SupportReport(dataset, states, policy.Act(states), seed);
    WriteJsonAtomic(dir / "report.json", report);
    result.final_return = eval.mean;
    result.final_return_std = eval.std;
    result.normalized_score = report.at("normalized_score");
    result.report = std::move(report);
    return result;
  }

  std::shared_ptr<const BehaviorCvae> cvae;
  if (config.algorithm == Algorithm::kPlas) {
    cvae = PrepareCvae(config, seed, dataset, dir, progress);
  }
  auto fresh_agent = [&] {
    return config.algorithm == Algorithm::kPlas
               ? MakePlasAgent(config.agent, cvae, seed)
               : ActorCriticAgent::MakeDirect(config.agent,
                                              dataset.state_dim(),
                                              dataset.action_dim(), seed);
  };
  ActorCriticAgent agent = fresh_agent();
  std::int64_t start_step = 0;
  std::int64_t nonfinite_base = 0;
  std::vector<Json> kept;
  if (resume && fs::exists(checkpoint_path)) {
    const Json ck = ReadJsonFile(checkpoint_path);
    if (ck.value("config_hash", "") != hash) {
      throw ConfigError("config_hash",
                        "checkpoint was written by a different config");
    }
    const Json payload = OpenCheckpoint(ck, "agent");
    agent = ActorCriticAgent::FromJson(payload.at("agent"), cvae);
    start_step = payload.at("step");
    nonfinite_base = payload.at("nonfinite_updates");
    for (Json& line : ReadJsonLines(log_path)) {
      if (line.at("step").get<std::int64_t>() <= start_step) {
        kept.push_back(std::move(line));
      }
    }
    result.resumed = true;
    Report(progress, "resuming from step " + std::to_string(start_step));
  }
  WriteJsonLines(log_path, kept);

  std::int64_t nonfinite = nonfinite_base;
  if (start_step < config.train.steps) {
    Report(progress, "training " + AlgorithmName(config.algorithm) + " for " +
                         std::to_string(config.train.steps - start_step) +
                         " steps");
    std::ofstream log(log_path, std::ios::app | std::ios::binary);
    if (!log) throw IoError("cannot append to " + log_path.string());
    const LogSink sink = [&](const LogEntry& entry) {
      Json line = LogEntryToJson(entry);
      line["config_hash"] = hash;
      log << line.dump() << '\n';
      log.flush();
      nonfinite = nonfinite_base + entry.nonfinite_updates;
      if (entry.step % config.checkpoint_interval == 0 ||
          entry.step == config.train.steps) {
        WriteJsonAtomic(
            checkpoint_path,
            StampedCheckpoint("agent",
                              {{"agent", agent.ToJson()},
                               {"step", entry.step},
                               {"nonfinite_updates", nonfinite}},
                              hash, seed));
      }
      if (entry.eval_return_mean) {
        Report(progress, "step " + std::to_string(entry.step) + " return " +
                             FormatValue(*entry.eval_return_mean));
      }
    };
    TrainConfig train = config.train;
    train.fatal_on_nonfinite = config.algorithm == Algorithm::kPlas;
    TrainActorCritic(agent, dataset, train, env.get(), seed, sink, start_step);
  }

  const FinalEval eval = LastEval(log_path);
  Report(progress, "running diagnostics");
  Json report = AgentReport(config, seed, dataset, *env, agent, refs, eval,
                            nonfinite);
  WriteJsonAtomic(dir / "report.json", report);
  WriteQErrorCsv(dir / "qerror.csv", report, config, seed, config.train.steps);
  result.final_return = eval.mean;
  result.final_return_std = eval.std;
  result.normalized_score = report.at("normalized_score");
  result.report = std::move(report);
  return result;
}

Json DiagnoseRun(const fs::path& run_dir, const ProgressFn& progress) {
  std::uint64_t seed = 0;
  std::string stamp;
  const ExperimentConfig config = ReadRunConfig(run_dir, &seed, &stamp);
  const std::string hash = ConfigHashHex(config);
  if (stamp != hash) {
    throw ConfigError("config_hash", "config.json hash does not match");
  }
  const auto env = MakeEnv(config.env);
  const TransitionDataset dataset =
      PrepareDataset(config, seed, run_dir, progress);
  const ReferenceScores refs =
      LookupReferences(config.reference_file, config.env);
  const FinalEval eval = LastEval(run_dir / "train_log.jsonl");
  Json report;
  if (config.algorithm == Algorithm::kBc) {
    const Json ck = ReadJsonFile(run_dir / "policy.json");
    if (ck.value("config_hash", "") != hash) {
      throw ConfigError("config_hash", "policy was written by another config");
    }
    const BcPolicy policy = BcFromJson(OpenCheckpoint(ck, "bc"));
    report = BaseReport(config, seed, dataset, refs, eval);
    const Matrix states = ProbeStates(dataset, seed);
    report["support"] = SupportReport(dataset, states, policy.Act(states), seed);
  } else {
    std::shared_ptr<const BehaviorCvae> cvae;
    if (config.algorithm == Algorithm::kPlas) {
      cvae = PrepareCvae(config, seed, dataset, run_dir, progress);
    }
    const Json ck = ReadJsonFile(run_dir / "checkpoint.json");
    if (ck.value("config_hash", "") != hash) {
      throw ConfigError("config_hash",
                        "checkpoint was written by a different config");
    }
    const Json payload = OpenCheckpoint(ck, "agent");
    const ActorCriticAgent agent =
        ActorCriticAgent::FromJson(payload.at("agent"), cvae);
    report = AgentReport(config, seed, dataset, *env, agent, refs, eval,
                         payload.at("nonfinite_updates"));
    WriteQErrorCsv(run_dir / "qerror.csv", report, config, seed,
                   payload.at("step"));
  }
  WriteJsonAtomic(run_dir / "diagnostics.json", report);
  return report;
}

SweepSpec SweepSpec::Default(const std::string& axis) {
  if (axis == "epsilon") return {axis, {0.0, 0.01, 0.05, 0.1, 0.2, 0.5}};
  if (axis == "max_latent_action") return {axis, {0.5, 1.0, 2.0, 3.0}};
  throw ConfigError("sweep.axis", "unknown sweep axis '" + axis + "'");
}

void SweepSpec::Validate() const {
  if (axis != "epsilon" && axis != "max_latent_action") {
    throw ConfigError("sweep.axis", "unknown sweep axis '" + axis + "'");
  }
  if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("sweep.values", "must be finite");
  }
}

fs::path SweepDirectory(const ExperimentConfig& config,
                        const std::string& axis) {
  return fs::path(config.output_dir) / ("sweep-" + axis);
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const SweepSpec& spec,
                               const ProgressFn& progress) {
  base.Validate();
  spec.Validate();
  ExperimentConfig shared_config = base;
  shared_config.algorithm = Algorithm::kPlas;
  const fs::path sweep_dir = SweepDirectory(base, spec.axis);
  fs::create_directories(sweep_dir);

  for (std::uint64_t seed : base.seeds) {
    const fs::path shared = sweep_dir / "shared" / ("seed" + std::to_string(seed));
    std::string shared_error;
    try {
      fs::create_directories(shared);
      const TransitionDataset dataset =
          PrepareDataset(shared_config, seed, shared, progress);
      PrepareCvae(shared_config, seed, dataset, shared, progress);
    } catch (const std::exception& e) {
      shared_error = e.what();
    }
    for (double value : spec.values) {
      ExperimentConfig cell = shared_config;
      cell.output_dir =
          (sweep_dir / (spec.axis + "=" + FormatValue(value))).string();
      cell.seeds = {seed};
      if (cell.dataset.path.empty()) {
        cell.dataset.path = (shared / "dataset.jsonl").string();
      }
      if (cell.cvae_path.empty()) {
        cell.cvae_path = (shared / "cvae.json").string();
      }
      if (spec.axis == "epsilon") {
        cell.agent.epsilon = value;
      } else {
        cell.agent.max_latent_action = value;
      }
      const fs::path cell_dir = RunDirectory(cell, seed);
      fs::create_directories(cell_dir);
      std::string status = "ok";
      if (!shared_error.empty()) {
        status = "failed: " + shared_error;
      } else {
        try {
          Report(progress, spec.axis + "=" + FormatValue(value) + " seed " +
                               std::to_string(seed));
          RunExperiment(cell, seed, true, progress);
        } catch (const std::exception& e) {
          status = std::string("failed: ") + e.what();
        }
      }
      WriteJsonAtomic(cell_dir / "status.json",
                      {{"axis", spec.axis},
                       {"value", value},
                       {"seed", seed},
                       {"status", status}});
    }
  }

  std::vector<SweepRow> rows = AggregateSweep(sweep_dir);
  std::erase_if(rows, [&](const SweepRow& row) {
    const bool value_in = std::find(spec.values.begin(), spec.values.end(),
                                    row.value) != spec.values.end();
    const bool seed_in = std::find(base.seeds.begin(), base.seeds.end(),
                                   row.seed) != base.seeds.end();
    return !(value_in && seed_in);
  });
  std::ofstream out(sweep_dir / "aggregate.csv", std::ios::trunc);
  if (!out) throw IoError("cannot write the sweep aggregate");
  out << SweepRowsToCsv(rows);
  return rows;
}

std::vector<SweepRow> AggregateSweep(const fs::path& sweep_dir) {
  if (!fs::is_directory(sweep_dir)) {
    throw IoError(sweep_dir.string() + " is not a directory");
  }
  std::vector<SweepRow> rows;
  for (const auto& value_dir : fs::directory_iterator(sweep_dir)) {
    if (!value_dir.is_directory() ||
        value_dir.path().filename().string().find('=') == std::string::npos) {
      continue;
    }
    for (const auto& run : fs::directory_iterator(value_dir.path())) {
      const fs::path status_path = run.path() / "status.json";
      if (!run.is_directory() || !fs::exists(status_path)) continue;
      const Json status = ReadJsonFile(status_path);
      SweepRow row;
      row.axis = status.at("axis");
      row.value = status.at("value");
      row.seed = status.at("seed");
      row.status = status.at("status");
      row.run_dir = run.path().string();
      if (row.status == "ok") {
        try {
          std::uint64_t seed = 0;
          std::string hash;
          const ExperimentConfig config =
              ReadRunConfig(run.path(), &seed, &hash);
          const ReferenceScores refs =
              LookupReferences(config.reference_file, config.env);
          row.final_return = LastEval(run.path() / "train_log.jsonl").mean;
          row.normalized_score =
              NormalizeScore(row.final_return, refs.random_ref, refs.expert_ref);
        } catch (const std::exception& e) {
          row.status = std::string("failed: ") + e.what();
        }
      }
      if (row.status != "ok") {
        row.final_return = std::nan("");
        row.normalized_score = std::nan("");
      }
      rows.push_back(std::move(row));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.seed < b.seed;
  });
  return rows;
}

std::string SweepRowsToCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "axis,value,seed,final_return,normalized_score,status,run_dir\n";
  for (const SweepRow& row : rows) {
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << row.axis << ',' << FormatValue(row.value) << ',' << row.seed << ','
        << FormatCsvNumber(row.final_return) << ','
        << FormatCsvNumber(row.normalized_score) << ',' << status << ','
        << row.run_dir << '\n';
  }
  return out.str();
}

}  // namespace plas
