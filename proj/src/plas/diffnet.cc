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

#include "plas/diffnet.h"

#include <cmath>
#include <cstring>

#include "plas/errors.h"

namespace plas {
namespace {

void ApplyActivation(Activation activation, Matrix& z) {
  switch (activation) {
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kIdentity:
      break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the activated output.
void ApplyActivationGrad(Activation activation, const Matrix& out,
                         Matrix& grad) {
  switch (activation) {
    case Activation::kRelu:
      grad = (out.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - out.array().square();
      break;
    case Activation::kIdentity:
      break;
  }
}

std::uint64_t Fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ValueError("unknown activation '" + name + "'");
}

int MlpParams::input_size() const {
  if (layers.empty()) throw ShapeError("empty network");
  return static_cast<int>(layers.front().weight.cols());
}

int MlpParams::output_size() const {
  if (layers.empty()) throw ShapeError("empty network");
  return static_cast<int>(layers.back().weight.rows());
}

std::vector<int> MlpParams::layer_sizes() const {
  std::vector<int> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(input_size());
  for (const Layer& layer : layers) {
    sizes.push_back(static_cast<int>(layer.weight.rows()));
  }
  return sizes;
}

std::size_t MlpParams::num_parameters() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) {
    n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

bool MlpParams::AllFinite() const {
  for (const Layer& layer : layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

void MlpParams::Validate() const {
  if (layers.empty()) throw ShapeError("network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& layer = layers[k];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0) {
      throw ShapeError("layer " + std::to_string(k) + " has a zero dimension");
    }
    if (layer.bias.size() != layer.weight.rows()) {
      throw ShapeError("layer " + std::to_string(k) +
                       " bias length does not match weight rows");
    }
    if (k > 0 && layer.weight.cols() != layers[k - 1].weight.rows()) {
      throw ShapeError("layer " + std::to_string(k) +
                       " input size does not match previous output size");
    }
  }
}

Gradients Gradients::ZerosLike(const MlpParams& params) {
  Gradients g;
  g.layers.reserve(params.layers.size());
  for (const Layer& layer : params.layers) {
    g.layers.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                        Vector::Zero(layer.bias.size())});
  }
  return g;
}

void Gradients::SetZero() {
  for (LayerGrad& layer : layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
}

bool Gradients::AllFinite() const {
  for (const LayerGrad& layer : layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool Gradients::CongruentWith(const MlpParams& params) const {
  if (layers.size() != params.layers.size()) return false;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].weight.rows() != params.layers[k].weight.rows() ||
        layers[k].weight.cols() != params.layers[k].weight.cols() ||
        layers[k].bias.size() != params.layers[k].bias.size()) {
      return false;
    }
  }
  return true;
}

MlpParams MakeMlp(std::span<const int> layer_sizes, Activation hidden,
                  Activation output, Rng& rng) {
  if (layer_sizes.size() < 2) {
    throw ShapeError("a network needs at least an input and an output size");
  }
  MlpParams params;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    const int in = layer_sizes[k];
    const int out = layer_sizes[k + 1];
    if (in <= 0 || out <= 0) throw ShapeError("layer sizes must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Layer layer;
    layer.weight.resize(out, in);
    layer.bias.resize(out);
    // Row-major fill so the draw order is independent of storage order.
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weight(r, c) = dist(rng);
    }
    for (int r = 0; r < out; ++r) layer.bias(r) = dist(rng);
    layer.activation = (k + 2 == layer_sizes.size()) ? output : hidden;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams MakeZeroMlp(std::span<const int> layer_sizes, Activation hidden,
                      Activation output) {
  if (layer_sizes.size() < 2) {
    throw ShapeError("a network needs at least an input and an output size");
  }
  MlpParams params;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    if (layer_sizes[k] <= 0 || layer_sizes[k + 1] <= 0) {
      throw ShapeError("layer sizes must be positive");
    }
    Layer layer;
    layer.weight = Matrix::Zero(layer_sizes[k + 1], layer_sizes[k]);
    layer.bias = Vector::Zero(layer_sizes[k + 1]);
    layer.activation = (k + 2 == layer_sizes.size()) ? output : hidden;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

bool SameShape(const MlpParams& a, const MlpParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    if (a.layers[k].weight.rows() != b.layers[k].weight.rows() ||
        a.layers[k].weight.cols() != b.layers[k].weight.cols() ||
        a.layers[k].bias.size() != b.layers[k].bias.size() ||
        a.layers[k].activation != b.layers[k].activation) {
      return false;
    }
  }
  return true;
}

Matrix MlpForwardBatch(const MlpParams& params, const Matrix& input,
                       ForwardCache* cache) {
  if (params.layers.empty()) throw ShapeError("empty network");
  if (input.rows() != params.input_size()) {
    throw ShapeError("input has " + std::to_string(input.rows()) +
                     " rows, network expects " +
                     std::to_string(params.input_size()));
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->outputs.clear();
    cache->inputs.reserve(params.layers.size());
    cache->outputs.reserve(params.layers.size());
  }
  Matrix x = input;
  for (const Layer& layer : params.layers) {
    Matrix z = layer.weight * x;
    z.colwise() += layer.bias;
    ApplyActivation(layer.activation, z);
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(x));
      cache->outputs.push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

Vector MlpForward(const MlpParams& params, const Vector& input) {
  return MlpForwardBatch(params, input);
}

Matrix MlpBackwardBatch(const MlpParams& params, const ForwardCache& cache,
                        const Matrix& output_grad, Gradients* grads) {
  const std::size_t n = params.layers.size();
  if (cache.inputs.size() != n || cache.outputs.size() != n) {
    throw ShapeError("forward cache does not match the network");
  }
  if (output_grad.rows() != params.output_size() ||
      output_grad.cols() != cache.outputs.back().cols()) {
    throw ShapeError("output gradient shape does not match the forward pass");
  }
  if (grads != nullptr && !grads->CongruentWith(params)) {
    throw ShapeError("gradient container does not match the network");
  }
  Matrix delta = output_grad;
  for (std::size_t k = n; k-- > 0;) {
    const Layer& layer = params.layers[k];
    ApplyActivationGrad(layer.activation, cache.outputs[k], delta);
    if (grads != nullptr) {
      grads->layers[k].weight.noalias() += delta * cache.inputs[k].transpose();
      grads->layers[k].bias += delta.rowwise().sum();
    }
    Matrix next = layer.weight.transpose() * delta;
    delta = std::move(next);
  }
  return delta;
}

BackwardResult MlpBackward(const MlpParams& params, const Vector& input,
                           const Vector& output_grad) {
  ForwardCache cache;
  MlpForwardBatch(params, input, &cache);
  BackwardResult result{Gradients::ZerosLike(params), Vector()};
  result.input_grad =
      MlpBackwardBatch(params, cache, output_grad, &result.grads);
  return result;
}

AdamState AdamState::For(const MlpParams& params, AdamOptions options) {
  AdamState state;
  state.options = options;
  state.first_moment = Gradients::ZerosLike(params);
  state.second_moment = Gradients::ZerosLike(params);
  return state;
}

void AdamStep(MlpParams& params, const Gradients& grads, AdamState& state) {
  if (!grads.CongruentWith(params) ||
      !state.first_moment.CongruentWith(params) ||
      !state.second_moment.CongruentWith(params)) {
    throw ShapeError("Adam: gradients or moments do not match the network");
  }
  if (!grads.AllFinite()) {
    throw NumericError("Adam: non-finite gradient, update rejected");
  }
  const AdamOptions& o = state.options;
  const std::int64_t t = state.step + 1;
  const double correction1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  const double step_size = o.learning_rate / correction1;
  const double sqrt_c2 = std::sqrt(correction2);
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    p.array() -= step_size * m.array() /
                 (v.array().sqrt() / sqrt_c2 + o.epsilon);
  };
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update(params.layers[k].weight, grads.layers[k].weight,
           state.first_moment.layers[k].weight,
           state.second_moment.layers[k].weight);
    update(params.layers[k].bias, grads.layers[k].bias,
           state.first_moment.layers[k].bias,
           state.second_moment.layers[k].bias);
  }
  state.step = t;
}

void PolyakUpdate(MlpParams& target, const MlpParams& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw ValueError("polyak tau must lie in (0, 1]");
  }
  if (!SameShape(target, online)) {
    throw ShapeError("polyak: target and online networks differ in shape");
  }
  const double keep = 1.0 - tau;
  for (std::size_t k = 0; k < target.layers.size(); ++k) {
    target.layers[k].weight =
        tau * online.layers[k].weight + keep * target.layers[k].weight;
    target.layers[k].bias =
        tau * online.layers[k].bias + keep * target.layers[k].bias;
  }
}

std::uint64_t ParamsHash(const MlpParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Layer& layer : params.layers) {
    const std::int64_t dims[2] = {layer.weight.rows(), layer.weight.cols()};
    h = Fnv1a(h, dims, sizeof(dims));
    const int act = static_cast<int>(layer.activation);
    h = Fnv1a(h, &act, sizeof(act));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        const double w = layer.weight(r, c);
        h = Fnv1a(h, &w, sizeof(w));
      }
    }
    h = Fnv1a(h, layer.bias.data(), sizeof(double) * layer.bias.size());
  }
  return h;
}

}  // namespace plas
