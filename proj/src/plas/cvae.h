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

#ifndef PLAS_CVAE_H_
#define PLAS_CVAE_H_

// Conditional VAE over actions given states. The encoder maps (s, a) to a
// diagonal Gaussian over the latent space, the decoder maps (s, z) back to an
// action through a tanh output. The prior is N(0, I) for every state.

#include <cstdint>
#include <functional>
#include <vector>

#include "plas/dataset.h"
#include "plas/diffnet.h"
#include "plas/serialize.h"

namespace plas {

struct CvaeConfig {
  // 0 selects 2 * action_dim.
  int latent_dim = 0;
  std::vector<int> hidden = {128, 128};
  double kl_weight = 0.02;
  double log_std_min = -4.0;
  double log_std_max = 15.0;
  double learning_rate = 1e-4;
  int batch_size = 100;
  int steps = 20000;
  int log_interval = 500;

  void Validate() const;
};

struct BehaviorCvae {
  MlpParams encoder;  // (s, a) -> (mu, raw log_std)
  MlpParams decoder;  // (s, z) -> action
  int state_dim = 0;
  int action_dim = 0;
  int latent_dim = 0;
  double log_std_min = -4.0;
  double log_std_max = 15.0;

  // Zero-initialised networks are used by tests; MakeCvae draws
  // fan-in-scaled weights.
  static BehaviorCvae Make(int state_dim, int action_dim,
                           const CvaeConfig& config, Rng& rng);
  static BehaviorCvae MakeZero(int state_dim, int action_dim,
                               const CvaeConfig& config);

  std::uint64_t Hash() const;
};

struct LatentGaussian {
  Matrix mu;       // latent_dim x batch
  Matrix log_std;  // clamped
};

struct ElboReport {
  double reconstruction_loss = 0.0;
  double kl_loss = 0.0;
  double total = 0.0;
};

Matrix ConcatRows(const Matrix& top, const Matrix& bottom);

LatentGaussian Encode(const BehaviorCvae& cvae, const Matrix& states,
                      const Matrix& actions);
// z = mu + exp(log_std) * noise, elementwise.
Matrix Reparameterize(const Matrix& mu, const Matrix& log_std,
                      const Matrix& noise);
Matrix Decode(const BehaviorCvae& cvae, const Matrix& states,
              const Matrix& latents, ForwardCache* cache = nullptr);
// Gradient of sum(action_grad .* decode) with respect to the latents.
// Decoder parameters receive no gradient.
Matrix DecodeLatentGrad(const BehaviorCvae& cvae, const ForwardCache& cache,
                        const Matrix& action_grad);

// 1/2 * sum_i (mu_i^2 + exp(2 log_std_i) - 1 - 2 log_std_i)
double KlToStandardNormal(const Vector& mu, const Vector& log_std);

// ELBO loss of one minibatch for fixed reparameterisation noise:
// mean squared reconstruction error over all action entries plus
// kl_weight times the batch-mean KL. Gradients are accumulated when the
// pointers are non-null.
ElboReport ElboLoss(const BehaviorCvae& cvae, const Matrix& states,
                    const Matrix& actions, const Matrix& noise,
                    double kl_weight, Gradients* encoder_grads,
                    Gradients* decoder_grads);

struct ElboLogEntry {
  std::int64_t step = 0;
  ElboReport report;  // averaged over the logging interval
};

struct CvaeTrainResult {
  BehaviorCvae cvae;
  std::vector<ElboLogEntry> log;
};

using ElboSink = std::function<void(const ElboLogEntry&)>;

// Minimises the ELBO loss over uniform minibatches. Throws ValueError on an
// empty dataset and NumericError (with the step index) on a non-finite loss.
CvaeTrainResult TrainCvae(const TransitionDataset& dataset,
                          const CvaeConfig& config, std::uint64_t seed,
                          const ElboSink& sink = {});

Json CvaeToJson(const BehaviorCvae& cvae);
BehaviorCvae CvaeFromJson(const Json& json);
void SaveCvae(const BehaviorCvae& cvae, const std::filesystem::path& path);
BehaviorCvae LoadCvae(const std::filesystem::path& path);

}  // namespace plas

#endif  // PLAS_CVAE_H_
