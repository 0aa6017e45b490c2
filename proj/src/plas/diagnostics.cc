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

#include "plas/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "plas/errors.h"

namespace plas {

std::vector<double> EmpiricalReturns(const std::vector<double>& rewards,
                                     double gamma, int truncation) {
  if (rewards.empty()) throw ValueError("empirical return of an empty rollout");
  if (truncation <= 0) throw ValueError("truncation must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValueError("gamma must lie in [0, 1]");
  }
  const std::size_t n = rewards.size();
  const std::size_t window = static_cast<std::size_t>(truncation);
  std::vector<double> out(n);
  if (window >= n) {
    double g = 0.0;
    for (std::size_t t = n; t-- > 0;) {
      g = rewards[t] + gamma * g;
      out[t] = g;
    }
    return out;
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t end = std::min(n, t + window);
    double g = 0.0;
    for (std::size_t i = end; i-- > t;) g = rewards[i] + gamma * g;
    out[t] = g;
  }
  return out;
}

QErrorReport SummarizeErrors(const std::vector<double>& errors,
                             std::int64_t n_episodes) {
  if (errors.empty()) throw ValueError("no errors to summarize");
  QErrorReport report;
  report.n_points = static_cast<std::int64_t>(errors.size());
  report.n_episodes = n_episodes;
  double sq = 0.0, pos = 0.0, neg = 0.0;
  std::int64_t n_pos = 0;
  for (double e : errors) {
    sq += e * e;
    if (e > 0.0) {
      pos += e;
      ++n_pos;
    } else {
      neg += e;
    }
  }
  const std::int64_t n_neg = report.n_points - n_pos;
  report.mse = sq / static_cast<double>(report.n_points);
  report.positive_error_pct =
      static_cast<double>(n_pos) / static_cast<double>(report.n_points);
  report.positive_error_mean = n_pos > 0 ? pos / n_pos : 0.0;
  report.negative_error_mean = n_neg > 0 ? neg / n_neg : 0.0;
  return report;
}

QErrorReport ComputeQErrorReport(const ToyEnv& env, const PolicyFn& policy,
                                 const QFunction& q, int n_episodes,
                                 double gamma, std::uint64_t seed,
                                 int truncation) {
  if (n_episodes <= 0) throw ValueError("Q-error report needs episodes");
  std::vector<double> errors;
  for (int i = 0; i < n_episodes; ++i) {
    Rng rng = MakeRng(seed, "qerror/" + std::to_string(i));
    const Episode episode = RunEpisode(env, policy, rng);
    std::vector<double> rewards;
    for (const Transition& t : episode.transitions) rewards.push_back(t.reward);
    const std::vector<double> returns =
        EmpiricalReturns(rewards, gamma, truncation);
    for (std::size_t t = 0; t < rewards.size(); ++t) {
      const Transition& tr = episode.transitions[t];
      errors.push_back(q(tr.state, tr.action) - returns[t]);
    }
  }
  return SummarizeErrors(errors, n_episodes);
}

QErrorReport AgentQErrorReport(const ActorCriticAgent& agent,
                               const ToyEnv& env, int n_episodes, double gamma,
                               std::uint64_t seed) {
  const PolicyFn policy = [&agent](const Vector& s) { return agent.Act(s); };
  const QFunction q = [&agent](const Vector& s, const Vector& a) {
    return agent.QValues(Matrix(s), Matrix(a))(0);
  };
  return ComputeQErrorReport(env, policy, q, n_episodes, gamma, seed);
}

Json QErrorReportToJson(const QErrorReport& report) {
  return {{"mse", report.mse},
          {"positive_error_pct", report.positive_error_pct},
          {"positive_error_mean", report.positive_error_mean},
          {"negative_error_mean", report.negative_error_mean},
          {"n_points", report.n_points},
          {"n_episodes", report.n_episodes}};
}

std::string QErrorCsvHeader() {
  return "algorithm,dataset,seed,step,mse,positive_error_pct,"
         "positive_error_mean,negative_error_mean,n_points,n_episodes,"
         "config_hash";
}

std::string QErrorCsvRow(const QErrorReport& report,
                         const std::string& algorithm,
                         const std::string& dataset, std::uint64_t seed,
                         std::int64_t step, const std::string& config_hash) {
  std::ostringstream out;
  out.precision(17);
  out << algorithm << ',' << dataset << ',' << seed << ',' << step << ','
      << report.mse << ',' << report.positive_error_pct << ','
      << report.positive_error_mean << ',' << report.negative_error_mean << ','
      << report.n_points << ',' << report.n_episodes << ',' << config_hash;
  return out.str();
}

ValueBoundCheck CheckValueBound(const ActorCriticAgent& agent,
                                const ToyEnv& env, const Matrix& states,
                                double gamma) {
  if (states.cols() == 0) throw ValueError("no states to check");
  ValueBoundCheck check;
  check.mean_q = agent.QValues(states, agent.Act(states)).mean();
  double bound = 0.0;
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    bound += env.ReturnUpperBound(states.col(j), gamma);
  }
  check.mean_bound = bound / static_cast<double>(states.cols());
  return check;
}

SupportIndex::SupportIndex(const TransitionDataset& dataset, int k)
    : states_(StateMatrix(dataset)), actions_(ActionMatrix(dataset)), k_(k) {
  if (k <= 0) throw ValueError("neighbour count must be positive");
  k_ = std::min<int>(k, static_cast<int>(dataset.size()));
  state_sq_norms_ = states_.colwise().squaredNorm().transpose();
}

std::vector<std::size_t> SupportIndex::NearestStates(
    const Vector& state, std::optional<std::size_t> exclude) const {
  if (state.size() != states_.rows()) {
    throw ShapeError("support probe state has the wrong dimension");
  }
  const Vector d2 = state_sq_norms_ - 2.0 * states_.transpose() * state +
                    Vector::Constant(states_.cols(), state.squaredNorm());
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(d2.size());
  for (Eigen::Index j = 0; j < d2.size(); ++j) {
    if (exclude && *exclude == static_cast<std::size_t>(j)) continue;
    order.emplace_back(d2(j), static_cast<std::size_t>(j));
  }
  const std::size_t k = std::min<std::size_t>(k_, order.size());
  if (k == 0) throw ValueError("no neighbours left after exclusion");
  std::partial_sort(order.begin(), order.begin() + k, order.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = order[i].second;
  return out;
}

double SupportIndex::Distance(const Vector& state, const Vector& action) const {
  if (action.size() != actions_.rows()) {
    throw ShapeError("support probe action has the wrong dimension");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j : NearestStates(state)) {
    best = std::min(best, (actions_.col(j) - action).norm());
  }
  return best;
}

Vector SupportIndex::Project(const Vector& state, const Vector& action) const {
  if (action.size() != actions_.rows()) {
    throw ShapeError("support probe action has the wrong dimension");
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j : NearestStates(state)) {
    const double d = (actions_.col(j) - action).norm();
    if (d < best) {
      best = d;
      arg = j;
    }
  }
  return actions_.col(arg);
}

Vector SupportIndex::Distances(const Matrix& states,
                               const Matrix& actions) const {
  if (states.cols() != actions.cols()) {
    throw ShapeError("support probes need one action per state");
  }
  Vector out(states.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    out(j) = Distance(states.col(j), actions.col(j));
  }
  return out;
}

Matrix SupportIndex::Project(const Matrix& states,
                             const Matrix& actions) const {
  if (states.cols() != actions.cols()) {
    throw ShapeError("support probes need one action per state");
  }
  Matrix out(actions.rows(), actions.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    out.col(j) = Project(Vector(states.col(j)), Vector(actions.col(j)));
  }
  return out;
}

std::vector<double> SupportIndex::LeaveOneOutDistances(
    std::size_t max_probes, std::uint64_t seed) const {
  const std::size_t n = static_cast<std::size_t>(states_.cols());
  if (n < 2) throw ValueError("leave-one-out needs at least two transitions");
  std::vector<std::size_t> probes(n);
  std::iota(probes.begin(), probes.end(), 0);
  if (max_probes < n) {
    Rng rng = MakeRng(seed, "support/calibrate");
    std::shuffle(probes.begin(), probes.end(), rng);
    probes.resize(max_probes);
  }
  std::vector<double> out;
  out.reserve(probes.size());
  for (std::size_t i : probes) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : NearestStates(states_.col(i), i)) {
      best = std::min(best, (actions_.col(j) - actions_.col(i)).norm());
    }
    out.push_back(best);
  }
  return out;
}

double SupportIndex::CalibrateThreshold(double quantile,
                                        std::size_t max_probes,
                                        std::uint64_t seed) const {
  return Quantile(LeaveOneOutDistances(max_probes, seed), quantile);
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValueError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValueError("quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SupportSummary SummarizeDistances(std::vector<double> distances) {
  if (distances.empty()) throw ValueError("no distances to summarize");
  SupportSummary s;
  s.n = distances.size();
  s.mean = std::accumulate(distances.begin(), distances.end(), 0.0) /
           static_cast<double>(s.n);
  s.median = Quantile(distances, 0.5);
  s.p95 = Quantile(distances, 0.95);
  s.p99 = Quantile(distances, 0.99);
  s.max = *std::max_element(distances.begin(), distances.end());
  return s;
}

double ViolationRate(const std::vector<double>& distances, double threshold) {
  if (distances.empty()) throw ValueError("no distances");
  const auto n = std::count_if(distances.begin(), distances.end(),
                               [threshold](double d) { return d > threshold; });
  return static_cast<double>(n) / static_cast<double>(distances.size());
}

SupportSummary SupportDistance(const TransitionDataset& dataset,
                               const Matrix& states, const Matrix& actions,
                               int k) {
  const SupportIndex index(dataset, k);
  const Vector d = index.Distances(states, actions);
  return SummarizeDistances(std::vector<double>(d.data(), d.data() + d.size()));
}

}  // namespace plas
