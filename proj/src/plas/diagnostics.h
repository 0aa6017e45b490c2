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

#ifndef PLAS_DIAGNOSTICS_H_
#define PLAS_DIAGNOSTICS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plas/actor_critic.h"
#include "plas/dataset.h"
#include "plas/envs.h"
#include "plas/serialize.h"

namespace plas {

inline constexpr int kDefaultTruncation = 1000;

// Discounted return from every step of one completed rollout, summing at
// most `truncation` rewards.
std::vector<double> EmpiricalReturns(const std::vector<double>& rewards,
                                     double gamma,
                                     int truncation = kDefaultTruncation);

struct QErrorReport {
  double mse = 0.0;
  double positive_error_pct = 0.0;  // fraction in [0, 1]
  double positive_error_mean = 0.0;
  double negative_error_mean = 0.0;
  std::int64_t n_points = 0;
  std::int64_t n_episodes = 0;
};

// Errors are Q - G. Positive means average the strictly positive errors, the
// negative mean averages the rest; either is 0 when its set is empty.
QErrorReport SummarizeErrors(const std::vector<double>& errors,
                             std::int64_t n_episodes);

using QFunction = std::function<double(const Vector& state,
                                       const Vector& action)>;

QErrorReport ComputeQErrorReport(const ToyEnv& env, const PolicyFn& policy,
                                 const QFunction& q, int n_episodes,
                                 double gamma, std::uint64_t seed,
                                 int truncation = kDefaultTruncation);

// Uses the agent's online Q1 and its deterministic policy.
QErrorReport AgentQErrorReport(const ActorCriticAgent& agent,
                               const ToyEnv& env, int n_episodes, double gamma,
                               std::uint64_t seed);

Json QErrorReportToJson(const QErrorReport& report);
std::string QErrorCsvHeader();
std::string QErrorCsvRow(const QErrorReport& report,
                         const std::string& algorithm,
                         const std::string& dataset, std::uint64_t seed,
                         std::int64_t step, const std::string& config_hash);

// Mean Q1(s, pi(s)) against the mean analytic return bound over `states`.
struct ValueBoundCheck {
  double mean_q = 0.0;
  double mean_bound = 0.0;
  bool Exceeds() const { return mean_q > mean_bound; }
};

ValueBoundCheck CheckValueBound(const ActorCriticAgent& agent,
                                const ToyEnv& env, const Matrix& states,
                                double gamma);

inline constexpr int kSupportNeighbours = 10;

// Nearest-neighbour view of a dataset: the distance of (s, a) to the data is
// the smallest action distance among the k dataset transitions whose states
// are closest to s.
class SupportIndex {
 public:
  explicit SupportIndex(const TransitionDataset& dataset,
                        int k = kSupportNeighbours);

  int k() const { return k_; }

  // Indices of the k nearest dataset states; `exclude` drops one index.
  std::vector<std::size_t> NearestStates(
      const Vector& state, std::optional<std::size_t> exclude = {}) const;
  double Distance(const Vector& state, const Vector& action) const;
  // The neighbourhood action closest to `action`.
  Vector Project(const Vector& state, const Vector& action) const;

  Vector Distances(const Matrix& states, const Matrix& actions) const;
  Matrix Project(const Matrix& states, const Matrix& actions) const;

  // Leave-one-out distances of (up to `max_probes`) dataset transitions.
  std::vector<double> LeaveOneOutDistances(std::size_t max_probes,
                                           std::uint64_t seed) const;
  // The `quantile` of the leave-one-out distances.
  double CalibrateThreshold(double quantile = 0.99,
                            std::size_t max_probes = 2000,
                            std::uint64_t seed = 0) const;

 private:
  Matrix states_;
  Matrix actions_;
  Vector state_sq_norms_;
  int k_;
};

struct SupportSummary {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

SupportSummary SummarizeDistances(std::vector<double> distances);
// Fraction of distances strictly above `threshold`.
double ViolationRate(const std::vector<double>& distances, double threshold);

SupportSummary SupportDistance(const TransitionDataset& dataset,
                               const Matrix& states, const Matrix& actions,
                               int k = kSupportNeighbours);

// Linear-interpolated quantile, q in [0, 1].
double Quantile(std::vector<double> values, double q);

}  // namespace plas

#endif  // PLAS_DIAGNOSTICS_H_
