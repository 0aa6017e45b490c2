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

#include "plas/cvae.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "plas/errors.h"

namespace plas {
namespace {

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

int ResolveLatentDim(const CvaeConfig& config, int action_dim) {
  return config.latent_dim > 0 ? config.latent_dim : 2 * action_dim;
}

void CheckBatch(const BehaviorCvae& cvae, const Matrix& states,
                const Matrix& actions) {
  if (states.rows() != cvae.state_dim || actions.rows() != cvae.action_dim ||
      states.cols() != actions.cols()) {
    throw ShapeError("cvae: state/action batch does not match the model");
  }
}

}  // namespace

void CvaeConfig::Validate() const {
  if (latent_dim < 0) throw ConfigError("cvae.latent_dim", "must be >= 0");
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("cvae.hidden", "sizes must be positive");
  }
  if (!(kl_weight >= 0.0)) throw ConfigError("cvae.kl_weight", "must be >= 0");
  if (!(log_std_min < log_std_max)) {
    throw ConfigError("cvae.log_std_min", "must be below log_std_max");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("cvae.lr", "must be > 0");
  if (batch_size <= 0) throw ConfigError("cvae.batch_size", "must be > 0");
  if (steps <= 0) throw ConfigError("cvae.steps", "must be > 0");
  if (log_interval <= 0) throw ConfigError("cvae.log_interval", "must be > 0");
}

BehaviorCvae BehaviorCvae::Make(int state_dim, int action_dim,
                                const CvaeConfig& config, Rng& rng) {
  BehaviorCvae cvae;
  cvae.state_dim = state_dim;
  cvae.action_dim = action_dim;
  cvae.latent_dim = ResolveLatentDim(config, action_dim);
  cvae.log_std_min = config.log_std_min;
  cvae.log_std_max = config.log_std_max;
  const auto enc = Sizes(state_dim + action_dim, config.hidden, 2 * cvae.latent_dim);
  const auto dec = Sizes(state_dim + cvae.latent_dim, config.hidden, action_dim);
  cvae.encoder = MakeMlp(enc, Activation::kRelu, Activation::kIdentity, rng);
  cvae.decoder = MakeMlp(dec, Activation::kRelu, Activation::kTanh, rng);
  return cvae;
}

BehaviorCvae BehaviorCvae::MakeZero(int state_dim, int action_dim,
                                    const CvaeConfig& config) {
  BehaviorCvae cvae;
  cvae.state_dim = state_dim;
  cvae.action_dim = action_dim;
  cvae.latent_dim = ResolveLatentDim(config, action_dim);
  cvae.log_std_min = config.log_std_min;
  cvae.log_std_max = config.log_std_max;
  cvae.encoder = MakeZeroMlp(
      Sizes(state_dim + action_dim, config.hidden, 2 * cvae.latent_dim),
      Activation::kRelu, Activation::kIdentity);
  cvae.decoder = MakeZeroMlp(
      Sizes(state_dim + cvae.latent_dim, config.hidden, action_dim),
      Activation::kRelu, Activation::kTanh);
  return cvae;
}

std::uint64_t BehaviorCvae::Hash() const {
  std::uint64_t h = Mix64(ParamsHash(encoder));
  h = Mix64(h ^ ParamsHash(decoder));
  h = Mix64(h ^ static_cast<std::uint64_t>(latent_dim));
  return h;
}

Matrix ConcatRows(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) {
    throw ShapeError("cannot stack batches with different sizes");
  }
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

LatentGaussian Encode(const BehaviorCvae& cvae, const Matrix& states,
                      const Matrix& actions) {
  CheckBatch(cvae, states, actions);
  const Matrix out = MlpForwardBatch(cvae.encoder, ConcatRows(states, actions));
  LatentGaussian g;
  g.mu = out.topRows(cvae.latent_dim);
  g.log_std = out.bottomRows(cvae.latent_dim)
                  .cwiseMax(cvae.log_std_min)
                  .cwiseMin(cvae.log_std_max);
  return g;
}

Matrix Reparameterize(const Matrix& mu, const Matrix& log_std,
                      const Matrix& noise) {
  if (mu.rows() != log_std.rows() || mu.cols() != log_std.cols() ||
      mu.rows() != noise.rows() || mu.cols() != noise.cols()) {
    throw ShapeError("reparameterize: mu, log_std and noise differ in shape");
  }
  return (mu.array() + log_std.array().exp() * noise.array()).matrix();
}

Matrix Decode(const BehaviorCvae& cvae, const Matrix& states,
              const Matrix& latents, ForwardCache* cache) {
  if (states.rows() != cvae.state_dim || latents.rows() != cvae.latent_dim ||
      states.cols() != latents.cols()) {
    throw ShapeError("decode: state/latent batch does not match the model");
  }
  return MlpForwardBatch(cvae.decoder, ConcatRows(states, latents), cache);
}

Matrix DecodeLatentGrad(const BehaviorCvae& cvae, const ForwardCache& cache,
                        const Matrix& action_grad) {
  const Matrix input_grad =
      MlpBackwardBatch(cvae.decoder, cache, action_grad, nullptr);
  return input_grad.bottomRows(cvae.latent_dim);
}

double KlToStandardNormal(const Vector& mu, const Vector& log_std) {
  if (mu.size() != log_std.size()) {
    throw ShapeError("kl: mu and log_std differ in length");
  }
  return 0.5 * (mu.array().square() + (2.0 * log_std.array()).exp() - 1.0 -
                2.0 * log_std.array())
                   .sum();
}

ElboReport ElboLoss(const BehaviorCvae& cvae, const Matrix& states,
                    const Matrix& actions, const Matrix& noise,
                    double kl_weight, Gradients* encoder_grads,
                    Gradients* decoder_grads) {
  CheckBatch(cvae, states, actions);
  const Eigen::Index batch = states.cols();
  const int latent = cvae.latent_dim;
  if (noise.rows() != latent || noise.cols() != batch) {
    throw ShapeError("elbo: noise shape does not match latent batch");
  }
  ForwardCache enc_cache;
  const Matrix enc_out =
      MlpForwardBatch(cvae.encoder, ConcatRows(states, actions), &enc_cache);
  const Matrix mu = enc_out.topRows(latent);
  const Matrix raw_log_std = enc_out.bottomRows(latent);
  const Matrix log_std =
      raw_log_std.cwiseMax(cvae.log_std_min).cwiseMin(cvae.log_std_max);
  const Matrix std_dev = log_std.array().exp().matrix();
  const Matrix z = (mu.array() + std_dev.array() * noise.array()).matrix();

  ForwardCache dec_cache;
  const Matrix recon = Decode(cvae, states, z, &dec_cache);
  const Matrix diff = recon - actions;
  const double n_entries = static_cast<double>(diff.size());

  ElboReport report;
  report.reconstruction_loss = diff.squaredNorm() / n_entries;
  const Matrix var = (2.0 * log_std.array()).exp().matrix();
  report.kl_loss = 0.5 *
                   (mu.array().square() + var.array() - 1.0 -
                    2.0 * log_std.array())
                       .sum() /
                   static_cast<double>(batch);
  report.total = report.reconstruction_loss + kl_weight * report.kl_loss;

  if (encoder_grads == nullptr && decoder_grads == nullptr) return report;

  const Matrix d_recon = (2.0 / n_entries) * diff;
  const Matrix d_input =
      MlpBackwardBatch(cvae.decoder, dec_cache, d_recon, decoder_grads);
  if (encoder_grads == nullptr) return report;

  const Matrix d_z = d_input.bottomRows(latent);
  const double kl_scale = kl_weight / static_cast<double>(batch);
  Matrix d_enc(2 * latent, batch);
  d_enc.topRows(latent) = d_z + kl_scale * mu;
  Matrix d_log_std = (d_z.array() * noise.array() * std_dev.array() +
                      kl_scale * (var.array() - 1.0))
                         .matrix();
  // The clamp passes gradient only where it is inactive.
  d_log_std = (raw_log_std.array() >= cvae.log_std_min &&
               raw_log_std.array() <= cvae.log_std_max)
                  .select(d_log_std, 0.0);
  d_enc.bottomRows(latent) = d_log_std;
  MlpBackwardBatch(cvae.encoder, enc_cache, d_enc, encoder_grads);
  return report;
}

CvaeTrainResult TrainCvae(const TransitionDataset& dataset,
                          const CvaeConfig& config, std::uint64_t seed,
                          const ElboSink& sink) {
  config.Validate();
  if (dataset.size() == 0) throw ValueError("cvae: empty dataset");
  Rng init_rng = MakeRng(seed, "cvae/init");
  CvaeTrainResult result;
  BehaviorCvae& cvae = result.cvae;
  cvae = BehaviorCvae::Make(dataset.state_dim(), dataset.action_dim(), config,
                            init_rng);

  AdamOptions adam;
  adam.learning_rate = config.learning_rate;
  AdamState enc_opt = AdamState::For(cvae.encoder, adam);
  AdamState dec_opt = AdamState::For(cvae.decoder, adam);
  Gradients enc_grads = Gradients::ZerosLike(cvae.encoder);
  Gradients dec_grads = Gradients::ZerosLike(cvae.decoder);

  Rng batch_rng = MakeRng(seed, "cvae/batch");
  Rng noise_rng = MakeRng(seed, "cvae/noise");
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t k =
      std::min<std::size_t>(config.batch_size, dataset.size());

  ElboReport acc;
  int acc_count = 0;
  for (int step = 1; step <= config.steps; ++step) {
    const Batch batch = SampleBatch(dataset, k, batch_rng);
    Matrix noise(cvae.latent_dim, batch.size());
    for (Eigen::Index c = 0; c < noise.cols(); ++c) {
      for (Eigen::Index r = 0; r < noise.rows(); ++r) noise(r, c) = normal(noise_rng);
    }
    enc_grads.SetZero();
    dec_grads.SetZero();
    const ElboReport report = ElboLoss(cvae, batch.states, batch.actions,
                                       noise, config.kl_weight, &enc_grads,
                                       &dec_grads);
    if (!std::isfinite(report.total)) {
      throw NumericError("cvae: non-finite loss at step " +
                         std::to_string(step) + " (reconstruction " +
                         std::to_string(report.reconstruction_loss) + ", kl " +
                         std::to_string(report.kl_loss) + ")");
    }
    AdamStep(cvae.encoder, enc_grads, enc_opt);
    AdamStep(cvae.decoder, dec_grads, dec_opt);

    acc.reconstruction_loss += report.reconstruction_loss;
    acc.kl_loss += report.kl_loss;
    acc.total += report.total;
    ++acc_count;
    if (step % config.log_interval == 0 || step == config.steps) {
      ElboLogEntry entry;
      entry.step = step;
      entry.report.reconstruction_loss = acc.reconstruction_loss / acc_count;
      entry.report.kl_loss = acc.kl_loss / acc_count;
      entry.report.total = acc.total / acc_count;
      result.log.push_back(entry);
      if (sink) sink(entry);
      acc = ElboReport{};
      acc_count = 0;
    }
  }
  return result;
}

Json CvaeToJson(const BehaviorCvae& cvae) {
  return {{"state_dim", cvae.state_dim},
          {"action_dim", cvae.action_dim},
          {"latent_dim", cvae.latent_dim},
          {"log_std_min", cvae.log_std_min},
          {"log_std_max", cvae.log_std_max},
          {"encoder", MlpToJson(cvae.encoder)},
          {"decoder", MlpToJson(cvae.decoder)}};
}

BehaviorCvae CvaeFromJson(const Json& json) {
  BehaviorCvae cvae;
  try {
    cvae.state_dim = json.at("state_dim");
    cvae.action_dim = json.at("action_dim");
    cvae.latent_dim = json.at("latent_dim");
    cvae.log_std_min = json.at("log_std_min");
    cvae.log_std_max = json.at("log_std_max");
    cvae.encoder = MlpFromJson(json.at("encoder"));
    cvae.decoder = MlpFromJson(json.at("decoder"));
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed cvae record: ") + e.what());
  }
  if (cvae.encoder.input_size() != cvae.state_dim + cvae.action_dim ||
      cvae.encoder.output_size() != 2 * cvae.latent_dim ||
      cvae.decoder.input_size() != cvae.state_dim + cvae.latent_dim ||
      cvae.decoder.output_size() != cvae.action_dim) {
    throw IoError("cvae checkpoint dimensions are inconsistent");
  }
  return cvae;
}

void SaveCvae(const BehaviorCvae& cvae, const std::filesystem::path& path) {
  WriteJsonFile(path, MakeCheckpoint("cvae", CvaeToJson(cvae)));
}

BehaviorCvae LoadCvae(const std::filesystem::path& path) {
  return CvaeFromJson(OpenCheckpoint(ReadJsonFile(path), "cvae"));
}

}  // namespace plas
