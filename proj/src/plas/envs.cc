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

#include "plas/envs.h"

#include <algorithm>
#include <cmath>

#include "plas/errors.h"

namespace plas {

StepResult ToyEnv::Step(const Vector& state, const Vector& action) const {
  if (state.size() != state_dim()) {
    throw ShapeError(name() + ": state has " + std::to_string(state.size()) +
                     " entries, expected " + std::to_string(state_dim()));
  }
  if (action.size() != action_dim()) {
    throw ShapeError(name() + ": action has " + std::to_string(action.size()) +
                     " entries, expected " + std::to_string(action_dim()));
  }
  if (!action.allFinite()) throw ValueError(name() + ": non-finite action");
  if ((action.array().abs() > 1.0).any()) {
    clipped_.fetch_add(1);
    return StepClipped(state, action.cwiseMax(-1.0).cwiseMin(1.0));
  }
  return StepClipped(state, action);
}

Vector PointMassEnv::Reset(Rng& rng) const {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  Vector s = Vector::Zero(4);
  do {
    s(0) = pos(rng);
    s(1) = pos(rng);
  } while (s.head<2>().norm() <= 3.0 * kGoalRadius);
  return s;
}

bool PointMassEnv::AtGoal(const Vector& state) const {
  return state.head<2>().norm() < kGoalRadius;
}

StepResult PointMassEnv::StepClipped(const Vector& state,
                                     const Vector& action) const {
  StepResult out;
  out.next_state = state;
  out.next_state.segment<2>(2) = state.segment<2>(2) + kDt * action;
  out.next_state.head<2>() = state.head<2>() + kDt * out.next_state.segment<2>(2);
  const double distance = out.next_state.head<2>().norm();
  out.reward = -distance;
  if (distance < kGoalRadius) {
    out.reward += kGoalBonus;
    out.done = true;
  }
  return out;
}

double PointMassEnv::ReturnUpperBound(const Vector& /*state*/,
                                      double /*gamma*/) const {
  // Every step costs a non-negative distance; the bonus is paid at most once.
  return kGoalBonus;
}

Vector PointMassEnv::ExpertAction(const Vector& state) const {
  constexpr double kP = 2.0;
  constexpr double kD = 2.5;
  Vector a = -kP * state.head<2>() - kD * state.segment<2>(2);
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

Vector EdgeFollowingEnv::Reset(Rng& rng) const {
  std::uniform_real_distribution<double> start(0.0, 0.2);
  Vector s(2);
  s << start(rng), 0.0;
  return s;
}

int EdgeFollowingEnv::ElapsedSteps(const Vector& state) {
  return static_cast<int>(std::lround(state(1) * kHorizon));
}

StepResult EdgeFollowingEnv::StepClipped(const Vector& state,
                                         const Vector& action) const {
  const int t = ElapsedSteps(state) + 1;
  const double v = action(0);
  StepResult out;
  out.next_state = state;
  out.next_state(1) = static_cast<double>(t) / kHorizon;
  if (v > kSpeedLimit) {
    out.reward = 0.0;
    out.done = true;
    return out;
  }
  out.next_state(0) = std::clamp(state(0) + v / kHorizon, 0.0, 1.0);
  out.reward = v;
  out.done = t >= kHorizon;
  return out;
}

double EdgeFollowingEnv::ReturnUpperBound(const Vector& state,
                                          double gamma) const {
  const int remaining = std::max(0, kHorizon - ElapsedSteps(state));
  if (gamma == 1.0) return kSpeedLimit * remaining;
  return kSpeedLimit * (1.0 - std::pow(gamma, remaining)) / (1.0 - gamma);
}

Vector EdgeFollowingEnv::ExpertAction(const Vector& /*state*/) const {
  return Vector::Constant(1, kExpertSpeed);
}

std::unique_ptr<ToyEnv> MakeEnv(const std::string& name) {
  if (name == "point_mass") return std::make_unique<PointMassEnv>();
  if (name == "edge_following") return std::make_unique<EdgeFollowingEnv>();
  throw ValueError("unknown environment '" + name + "'");
}

std::vector<std::string> EnvNames() { return {"point_mass", "edge_following"}; }

Episode RunEpisode(const ToyEnv& env, const PolicyFn& policy, Rng& rng) {
  Episode episode;
  Vector state = env.Reset(rng);
  for (int t = 0; t < env.horizon(); ++t) {
    Vector action = policy(state);
    StepResult step = env.Step(state, action);
    episode.total_return += step.reward;
    episode.transitions.push_back(
        {state, action.cwiseMax(-1.0).cwiseMin(1.0), step.reward,
         step.next_state, step.done});
    if (step.done) break;
    state = std::move(step.next_state);
  }
  return episode;
}

EvalResult EvaluatePolicy(const ToyEnv& env, const PolicyFn& policy,
                          int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw ValueError("evaluation needs at least one episode");
  EvalResult result;
  for (int i = 0; i < episodes; ++i) {
    Rng rng = MakeRng(seed, "eval/" + std::to_string(i));
    result.returns.push_back(RunEpisode(env, policy, rng).total_return);
  }
  double sum = 0.0;
  for (double r : result.returns) sum += r;
  result.mean = sum / episodes;
  double sq = 0.0;
  for (double r : result.returns) sq += (r - result.mean) * (r - result.mean);
  result.std = std::sqrt(sq / episodes);
  return result;
}

}  // namespace plas
