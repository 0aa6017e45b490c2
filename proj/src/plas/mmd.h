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

#ifndef PLAS_MMD_H_
#define PLAS_MMD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "plas/diffnet.h"

namespace plas {

enum class KernelFamily { kGaussian, kLaplacian };

std::string KernelFamilyName(KernelFamily family);
KernelFamily ParseKernelFamily(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double sigma = 1.0;

  void Validate() const;
  bool operator==(const KernelSpec&) const = default;
};

// gaussian: exp(-|x - y|_2^2 / (2 sigma^2)); laplacian: exp(-|x - y|_1 / sigma).
double KernelEval(const KernelSpec& spec, const Vector& x, const Vector& y);

// Mean of k(p_i, q_j) over all pairs; samples are matrix columns. With
// skip_diagonal the i == j terms are left out (p and q must then coincide).
double MeanKernel(const KernelSpec& spec, const Matrix& p, const Matrix& q,
                  bool skip_diagonal = false);

enum class MmdEstimator { kVStatistic, kUStatistic };

std::string MmdEstimatorName(MmdEstimator estimator);
MmdEstimator ParseMmdEstimator(const std::string& name);

// Squared MMD between two sample sets (columns).
double SampledMmd(const KernelSpec& spec, const Matrix& p, const Matrix& q,
                  MmdEstimator estimator = MmdEstimator::kVStatistic);

enum class BehaviorSampler {
  kStdNormal,       // N(0, 1)
  kUniformBimodal,  // uniform on [-2, -1] U [1, 2]
};

enum class AgentFamily {
  kScaledNormal,   // N(0, x), x is the standard deviation
  kShiftedNormal,  // N(x, agent_std)
};

struct MmdScenario {
  std::string name;
  BehaviorSampler behavior = BehaviorSampler::kStdNormal;
  AgentFamily agent = AgentFamily::kScaledNormal;
  double agent_std = 0.5;
  std::vector<double> sweep;
  int n_samples = 500;
  int n_repeats = 20;
  MmdEstimator estimator = MmdEstimator::kVStatistic;

  void Validate() const;

  // Agent N(0, x) against behaviour N(0, 1), x in 0.1..3.0.
  static MmdScenario MatchedNormal();
  // Agent N(x, 0.5) against the bimodal behaviour, x in -3.0..3.0.
  static MmdScenario BimodalHole();
};

// x_0, x_0 + step, ..., x_1 with values rounded to the step's grid.
std::vector<double> Grid(double from, double to, double step);

std::vector<KernelSpec> DefaultKernels();

struct CurvePoint {
  KernelSpec kernel;
  double x = 0.0;
  double mean = 0.0;
  double std = 0.0;  // across repeats
};

// For each (x, repeat) cell one behaviour and one agent sample set are drawn
// from a cell-specific stream and shared by every kernel.
std::vector<CurvePoint> RunScenario(const MmdScenario& scenario,
                                    const std::vector<KernelSpec>& kernels,
                                    std::uint64_t seed);

// Sweep value with the smallest mean for `kernel` (first on ties).
double CurveArgmin(const std::vector<CurvePoint>& curve,
                   const KernelSpec& kernel);

std::string CurvesToCsv(const std::vector<CurvePoint>& curve);
// Blank-line separated blocks, one per kernel, for gnuplot's `index`.
std::string CurvesToLongFormat(const std::vector<CurvePoint>& curve);

}  // namespace plas

#endif  // PLAS_MMD_H_
