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


#ifndef PLAS_TESTS_SUPPORT_ORACLES_H_
#define PLAS_TESTS_SUPPORT_ORACLES_H_

// Reference implementations used by the tests. Everything here is written
// with plain loops over std::vector and never calls the batched Eigen paths
// it is compared against.

#include <cstdint>
#include <functional>
#include <vector>

#include "plas/actor_critic.h"
#include "plas/cvae.h"
#include "plas/diffnet.h"

namespace plas::testing {

// Records every branch taken by a piecewise function (ReLU sign, clip side,
// min selection). Two evaluations with equal patterns lie on one smooth
// piece.
using Pattern = std::vector<int>;

std::vector<double> NaiveForward(const MlpParams& params,
                                 const std::vector<double>& input,
                                 Pattern* pattern = nullptr);

std::vector<double> Column(const Matrix& m, Eigen::Index col);

double OracleCriticLoss(const MlpParams& q, const Matrix& states,
                        const Matrix& actions, const Vector& targets,
                        Pattern* pattern = nullptr);

// Batch mean of the actor objective, recomputed from the agent's networks.
double OracleActorObjective(const ActorCriticAgent& agent,
                            const Matrix& states, Pattern* pattern = nullptr);

double OracleElbo(const BehaviorCvae& cvae, const Matrix& states,
                  const Matrix& actions, const Matrix& noise,
                  double kl_weight, Pattern* pattern = nullptr);

// Pointers to every weight and bias, in the order FlattenGradients uses.
std::vector<double*> ParameterSlots(MlpParams& params);
std::vector<double> FlattenGradients(const Gradients& grads);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // the +-h probes straddled a kink
};

// Compares `analytic[i]` with the central difference of `objective` in
// slots[i]. Relative error is |a - f| / max(|a|, |f|, floor).
GradientCheck CheckGradient(const std::vector<double*>& slots,
                            const std::vector<double>& analytic,
                            const std::function<double(Pattern*)>& objective,
                            double step = 1e-5, double floor = 1e-6);

GradientCheck Merge(const GradientCheck& a, const GradientCheck& b);

}  // namespace plas::testing

#endif  // PLAS_TESTS_SUPPORT_ORACLES_H_
