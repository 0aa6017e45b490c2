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

#ifndef PLAS_ENVS_H_
#define PLAS_ENVS_H_

// Desk-scale continuous-control tasks. Actions live in [-1, 1]^d.
//
//  point_mass       state (px, py, vx, vy), action (ax, ay). Semi-implicit
//                   Euler with dt = 0.1, goal at the origin. Reward is minus
//                   the distance to the goal after the step, plus a bonus of
//                   10 when the goal disc (radius 0.1) is entered, which ends
//                   the episode. Episodes are truncated after 100 steps; the
//                   truncation is not marked as a terminal.
//
//  edge_following   state (x, tau): x is the distance slid along the edge,
//                   tau = t / 50 is elapsed time. Action is the horizontal
//                   speed v. While v <= 0.6 the gripper keeps the edge:
//                   reward v, x += v / 50. Above 0.6 the edge is lost:
//                   reward 0 and the episode ends. The episode also ends
//                   when tau reaches 1 (horizon 50); tau is observed, so this
//                   is a true terminal.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "plas/diffnet.h"
#include "plas/random.h"

namespace plas {

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool done = false;
};

struct StepResult {
  Vector next_state;
  double reward = 0.0;
  bool done = false;
};

class ToyEnv {
 public:
  virtual ~ToyEnv() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int horizon() const = 0;

  virtual Vector Reset(Rng& rng) const = 0;

  // Out-of-bounds actions are clipped to [-1, 1] and counted in
  // clipped_actions(); the step itself is deterministic.
  StepResult Step(const Vector& state, const Vector& action) const;

  // Largest discounted return any policy can collect from `state`.
  virtual double ReturnUpperBound(const Vector& state, double gamma) const = 0;

  // Scripted controller used for the expert datasets and reference scores.
  virtual Vector ExpertAction(const Vector& state) const = 0;

  std::uint64_t clipped_actions() const { return clipped_.load(); }

 protected:
  virtual StepResult StepClipped(const Vector& state,
                                 const Vector& action) const = 0;

 private:
  mutable std::atomic<std::uint64_t> clipped_{0};
};

class PointMassEnv : public ToyEnv {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kGoalRadius = 0.1;
  static constexpr double kGoalBonus = 10.0;
  static constexpr int kHorizon = 100;

  std::string name() const override { return "point_mass"; }
  int state_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  int horizon() const override { return kHorizon; }
  Vector Reset(Rng& rng) const override;
  double ReturnUpperBound(const Vector& state, double gamma) const override;
  Vector ExpertAction(const Vector& state) const override;
  bool AtGoal(const Vector& state) const;

 protected:
  StepResult StepClipped(const Vector& state,
                         const Vector& action) const override;
};

class EdgeFollowingEnv : public ToyEnv {
 public:
  static constexpr int kHorizon = 50;
  static constexpr double kSpeedLimit = 0.6;
  static constexpr double kExpertSpeed = 0.5;

  std::string name() const override { return "edge_following"; }
  int state_dim() const override { return 2; }
  int action_dim() const override { return 1; }
  int horizon() const override { return kHorizon; }
  Vector Reset(Rng& rng) const override;
  double ReturnUpperBound(const Vector& state, double gamma) const override;
  Vector ExpertAction(const Vector& state) const override;
  // Elapsed steps encoded in tau.
  static int ElapsedSteps(const Vector& state);

 protected:
  StepResult StepClipped(const Vector& state,
                         const Vector& action) const override;
};

// Throws ValueError for unknown names.
std::unique_ptr<ToyEnv> MakeEnv(const std::string& name);
std::vector<std::string> EnvNames();

using PolicyFn = std::function<Vector(const Vector& state)>;

struct Episode {
  std::vector<Transition> transitions;
  double total_return = 0.0;  // undiscounted
};

// Runs one episode from env.Reset(rng) until a terminal or the horizon.
Episode RunEpisode(const ToyEnv& env, const PolicyFn& policy, Rng& rng);

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> returns;
};

// Deterministic given `seed`; episode i resets from stream "eval/i".
EvalResult EvaluatePolicy(const ToyEnv& env, const PolicyFn& policy,
                          int episodes, std::uint64_t seed);

}  // namespace plas

#endif  // PLAS_ENVS_H_
