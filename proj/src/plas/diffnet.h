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

#ifndef PLAS_DIFFNET_H_
#define PLAS_DIFFNET_H_

// Small dense feedforward networks with hand-written reverse mode, Adam and
// Polyak averaging. Batched operations take one sample per column.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plas/random.h"

namespace plas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kRelu, kTanh, kIdentity };

std::string ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::kIdentity;
};

struct MlpParams {
  std::vector<Layer> layers;

  int input_size() const;
  int output_size() const;
  // (input, hidden..., output)
  std::vector<int> layer_sizes() const;
  std::size_t num_parameters() const;
  bool AllFinite() const;
  // Throws ShapeError unless adjacent layers chain.
  void Validate() const;
};

struct LayerGrad {
  Matrix weight;
  Vector bias;
};

struct Gradients {
  std::vector<LayerGrad> layers;

  static Gradients ZerosLike(const MlpParams& params);
  void SetZero();
  bool AllFinite() const;
  bool CongruentWith(const MlpParams& params) const;
};

// Weights and biases uniform in +-1/sqrt(fan_in); hidden layers use
// `hidden`, the last layer uses `output`.
MlpParams MakeMlp(std::span<const int> layer_sizes, Activation hidden,
                  Activation output, Rng& rng);
// Same shapes as MakeMlp, every parameter zero.
MlpParams MakeZeroMlp(std::span<const int> layer_sizes, Activation hidden,
                      Activation output);

bool SameShape(const MlpParams& a, const MlpParams& b);

// Per-layer activations kept by a batched forward pass for the backward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;   // inputs[k] feeds layer k
  std::vector<Matrix> outputs;  // activated outputs of layer k
};

Matrix MlpForwardBatch(const MlpParams& params, const Matrix& input,
                       ForwardCache* cache = nullptr);
Vector MlpForward(const MlpParams& params, const Vector& input);

// Reverse pass for the scalar sum(output_grad .* output). Parameter
// gradients are accumulated into `grads` when it is non-null; the gradient
// with respect to the input batch is returned.
Matrix MlpBackwardBatch(const MlpParams& params, const ForwardCache& cache,
                        const Matrix& output_grad, Gradients* grads);

struct BackwardResult {
  Gradients grads;
  Vector input_grad;
};
BackwardResult MlpBackward(const MlpParams& params, const Vector& input,
                           const Vector& output_grad);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  Gradients first_moment;
  Gradients second_moment;
  std::int64_t step = 0;

  static AdamState For(const MlpParams& params, AdamOptions options);
};

// One bias-corrected Adam update. A non-finite gradient leaves both
// `params` and `state` untouched and throws NumericError.
void AdamStep(MlpParams& params, const Gradients& grads, AdamState& state);

// target <- tau * online + (1 - tau) * target, elementwise. tau in (0, 1].
void PolyakUpdate(MlpParams& target, const MlpParams& online, double tau);

// 64-bit FNV-1a over the layer sizes, activations and raw parameter bytes.
std::uint64_t ParamsHash(const MlpParams& params);

}  // namespace plas

#endif  // PLAS_DIFFNET_H_
