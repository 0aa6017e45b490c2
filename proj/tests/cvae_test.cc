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


#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "plas/cvae.h"
#include "plas/dataset.h"
#include "plas/diagnostics.h"
#include "plas/envs.h"
#include "plas/errors.h"
#include "plas/random.h"

namespace plas {
namespace {

// Actions are drawn by `draw` independently of the states, which are
// standard normal.
template <typename Draw>
TransitionDataset StateIndependentDataset(int state_dim, int action_dim,
                                          std::size_t size, Draw draw,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Transition> transitions;
  for (std::size_t i = 0; i < size; ++i) {
    Transition t;
    t.state = Vector(state_dim);
    for (int k = 0; k < state_dim; ++k) t.state(k) = normal(rng);
    t.action = Vector(action_dim);
    for (int k = 0; k < action_dim; ++k) t.action(k) = draw(rng);
    t.next_state = t.state;
    transitions.push_back(std::move(t));
  }
  DatasetMetadata meta;
  meta.env_name = "synthetic";
  meta.size = size;
  return TransitionDataset(meta, std::move(transitions));
}

// Numerical KL(N(mu, s^2) || N(0, 1)) for one coordinate.
double QuadratureKl(double mu, double log_std) {
  const double s = std::exp(log_std);
  const double lo = mu - 12.0 * s, hi = mu + 12.0 * s;
  const int n = 200000;
  const double h = (hi - lo) / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + h * i;
    const double log_q = -0.5 * std::pow((x - mu) / s, 2) - log_std -
                         0.5 * std::log(2 * M_PI);
    const double log_p = -0.5 * x * x - 0.5 * std::log(2 * M_PI);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    total += w * std::exp(log_q) * (log_q - log_p);
  }
  return total * h;
}

TEST(Kl, ZeroForTheStandardNormal) {
  EXPECT_EQ(KlToStandardNormal(Vector::Zero(3), Vector::Zero(3)), 0.0);
}

TEST(Kl, UnitMeanShift) {
  EXPECT_DOUBLE_EQ(KlToStandardNormal(Vector::Ones(1), Vector::Zero(1)), 0.5);
}

TEST(Kl, MatchesQuadrature) {
  Rng rng(12);
  std::uniform_real_distribution<double> mu(-3.0, 3.0), log_std(-2.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector m(2), l(2);
    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
      m(k) = mu(rng);
      l(k) = log_std(rng);
      expected += QuadratureKl(m(k), l(k));
    }
    const double kl = KlToStandardNormal(m, l);
    EXPECT_NEAR(kl, expected, 1e-6);
    EXPECT_GE(kl, 0.0);
  }
}

TEST(Kl, RejectsMismatchedShapes) {
  EXPECT_THROW(KlToStandardNormal(Vector::Zero(2), Vector::Zero(3)),
               ShapeError);
}

TEST(Cvae, DecodeStaysInActionBox) {
  Rng rng(4);
  CvaeConfig config;
  config.hidden = {16, 16};
  BehaviorCvae cvae = BehaviorCvae::Make(3, 2, config, rng);
  EXPECT_EQ(cvae.latent_dim, 4);
  EXPECT_EQ(cvae.encoder.output_size(), 8);
  EXPECT_EQ(cvae.decoder.output_size(), 2);
  // Large weights drive the tanh output into saturation.
  for (Layer& layer : cvae.decoder.layers) layer.weight *= 50.0;
  std::normal_distribution<double> normal(0.0, 10.0);
  Matrix states(3, 500), z(4, 500);
  for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  const Matrix actions = Decode(cvae, states, z);
  EXPECT_LE(actions.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Cvae, EncoderClampsLogStd) {
  CvaeConfig config;
  config.hidden = {4};
  BehaviorCvae cvae = BehaviorCvae::MakeZero(1, 1, config);
  // Rows [latent_dim, 2 latent_dim) of the encoder output are log-stds.
  const int row = cvae.latent_dim;
  cvae.encoder.layers.back().bias(row) = 40.0;
  LatentGaussian g = Encode(cvae, Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  EXPECT_EQ(g.log_std(0, 0), 15.0);
  cvae.encoder.layers.back().bias(row) = -40.0;
  g = Encode(cvae, Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  EXPECT_EQ(g.log_std(0, 0), -4.0);
}

TEST(Cvae, ElboReportIsConsistent) {
  Rng rng(6);
  CvaeConfig config;
  config.hidden = {8};
  const BehaviorCvae cvae = BehaviorCvae::Make(2, 1, config, rng);
  std::normal_distribution<double> normal;
  Matrix s(2, 7), a(1, 7), noise(2, 7);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = 0.3 * normal(rng);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
  const ElboReport r = ElboLoss(cvae, s, a, noise, 0.7, nullptr, nullptr);
  EXPECT_GE(r.reconstruction_loss, 0.0);
  EXPECT_GE(r.kl_loss, 0.0);
  EXPECT_DOUBLE_EQ(r.total, r.reconstruction_loss + 0.7 * r.kl_loss);
}

TEST(CvaeTraining, ConstantActionIsReconstructed) {
  const TransitionDataset data = StateIndependentDataset(
      2, 1, 2000, [](Rng&) { return 0.35; }, 1);
  CvaeConfig config;
  config.hidden = {32, 32};
  config.learning_rate = 1e-3;
  config.steps = 3000;
  const CvaeTrainResult result = TrainCvae(data, config, 5);
  EXPECT_LT(result.log.back().report.reconstruction_loss, 1e-3);

  Rng rng(9);
  std::normal_distribution<double> normal;
  Matrix states(2, 1000), z(2, 1000);
  for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  const Matrix decoded = Decode(result.cvae, states, z);
  EXPECT_LT((decoded.array() - 0.35).abs().maxCoeff(), 0.05);
}

class BimodalCvae : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new TransitionDataset(StateIndependentDataset(
        1, 1, 10000,
        [](Rng& rng) {
          std::bernoulli_distribution sign(0.5);
          std::normal_distribution<double> noise(0.0, 0.03);
          return (sign(rng) ? 0.8 : -0.8) + noise(rng);
        },
        2));
    CvaeConfig config;
    config.steps = 10000;
    result_ = new CvaeTrainResult(TrainCvae(*data_, config, 3));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete data_;
  }
  static TransitionDataset* data_;
  static CvaeTrainResult* result_;
};

TransitionDataset* BimodalCvae::data_ = nullptr;
CvaeTrainResult* BimodalCvae::result_ = nullptr;

TEST_F(BimodalCvae, PriorSamplesAvoidTheHole) {
  Rng rng(21);
  std::normal_distribution<double> normal;
  const int n = 10000;
  Matrix states(1, n), z(result_->cvae.latent_dim, n);
  for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  const Matrix decoded = Decode(result_->cvae, states, z);
  const double in_hole =
      (decoded.array().abs() < 0.3).cast<double>().sum() / n;
  // A smooth decoder keeps a thin transition band between the modes; a
  // unimodal Gaussian fit would put about 28% of its mass in the hole.
  EXPECT_LT(in_hole, 0.05);
}

// The bimodal dataset of the edge-following task.
class EdgeCvae : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto env = MakeEnv("edge_following");
    GeneratorOptions options;
    options.bimodal_center = 0.4;
    options.bimodal_width = 0.02;
    data_ = new TransitionDataset(
        GenerateDataset(*env, GeneratorKind::kCustom, 10000, 5, options));
    CvaeConfig config;
    config.steps = 10000;
    cvae_ = new BehaviorCvae(TrainCvae(*data_, config, 6).cvae);
    index_ = new SupportIndex(*data_);
  }
  static void TearDownTestSuite() {
    delete index_;
    delete cvae_;
    delete data_;
  }
  // Dataset states paired with fresh latents.
  static Vector ProbeDistances(bool box, Matrix* states_out = nullptr) {
    Rng rng(23);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, data_->size() - 1);
    const int n = 10000;
    Matrix states(data_->state_dim(), n), z(cvae_->latent_dim, n);
    for (int i = 0; i < n; ++i) states.col(i) = (*data_)[pick(rng)].state;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z.data()[i] = box ? uniform(rng) : normal(rng);
    }
    if (states_out) *states_out = states;
    return index_->Distances(states, Decode(*cvae_, states, z));
  }
  // Share of uniform actions on [-1, 1] within `radius` of the data.
  static double UniformControl(double radius) {
    Matrix states;
    ProbeDistances(false, &states);
    Rng rng(24);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix actions(1, states.cols());
    for (Eigen::Index i = 0; i < actions.size(); ++i) actions.data()[i] = u(rng);
    return (index_->Distances(states, actions).array() <= radius)
        .cast<double>()
        .mean();
  }
  static TransitionDataset* data_;
  static BehaviorCvae* cvae_;
  static SupportIndex* index_;
};

TransitionDataset* EdgeCvae::data_ = nullptr;
BehaviorCvae* EdgeCvae::cvae_ = nullptr;
SupportIndex* EdgeCvae::index_ = nullptr;

TEST_F(EdgeCvae, PriorDecodesLandNearDatasetActions) {
  const Vector d = ProbeDistances(false);
  const double near = (d.array() <= 0.1).cast<double>().mean();
  EXPECT_GE(near, 0.85);
  EXPECT_GT(near, 2.0 * UniformControl(0.1));
}

TEST_F(EdgeCvae, BoundedLatentsDecodeInsideSupport) {
  const double threshold = index_->CalibrateThreshold();
  const Vector d = ProbeDistances(true);
  const double within = (d.array() <= threshold).cast<double>().mean();
  EXPECT_GE(within, 0.85) << "threshold " << threshold;
  EXPECT_GT(within, 4.0 * UniformControl(threshold));
}

TEST_F(BimodalCvae, SmoothedLossMostlyDecreases) {
  std::vector<double> totals;
  for (const ElboLogEntry& e : result_->log) totals.push_back(e.report.total);
  ASSERT_GE(totals.size(), 10u);
  const std::size_t window = 3;
  std::vector<double> smooth;
  for (std::size_t i = 0; i + window <= totals.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < window; ++k) acc += totals[i + k];
    smooth.push_back(acc / window);
  }
  // Once the curve flattens, minibatch noise moves the window means by a
  // fraction of a percent either way.
  int non_increasing = 0;
  for (std::size_t i = 1; i < smooth.size(); ++i) {
    non_increasing += smooth[i] <= smooth[i - 1] * 1.01;
  }
  EXPECT_GE(non_increasing, 0.9 * static_cast<double>(smooth.size() - 1));
  EXPECT_LT(smooth.back(), 0.5 * smooth.front());
}

TEST(CvaeTraining, RejectsBadConfig) {
  CvaeConfig config;
  config.kl_weight = -1.0;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = CvaeConfig{};
  config.log_std_min = 2.0;
  config.log_std_max = 1.0;
  EXPECT_THROW(config.Validate(), ConfigError);
}

TEST(CvaeTraining, IsSeedReproducibleAndRoundTrips) {
  const TransitionDataset data = StateIndependentDataset(
      2, 1, 500, [](Rng& rng) {
        return std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      }, 4);
  CvaeConfig config;
  config.hidden = {16};
  config.steps = 200;
  config.log_interval = 50;
  const CvaeTrainResult a = TrainCvae(data, config, 8);
  const CvaeTrainResult b = TrainCvae(data, config, 8);
  EXPECT_EQ(a.cvae.Hash(), b.cvae.Hash());
  ASSERT_EQ(a.log.size(), 4u);
  EXPECT_EQ(a.log.back().report.total, b.log.back().report.total);

  const BehaviorCvae restored =
      CvaeFromJson(Json::parse(CvaeToJson(a.cvae).dump()));
  EXPECT_EQ(restored.Hash(), a.cvae.Hash());
  EXPECT_EQ(restored.latent_dim, a.cvae.latent_dim);
}

}  // namespace
}  // namespace plas
