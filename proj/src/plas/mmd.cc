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

#include "plas/mmd.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plas/errors.h"
#include "plas/random.h"

namespace plas {
namespace {

Eigen::ArrayXXd KernelMatrix(const KernelSpec& spec, const Matrix& p,
                             const Matrix& q) {
  if (p.rows() != q.rows()) {
    throw ShapeError("kernel: sample dimensions differ");
  }
  Eigen::ArrayXXd acc = Eigen::ArrayXXd::Zero(p.cols(), q.cols());
  for (Eigen::Index d = 0; d < p.rows(); ++d) {
    const Eigen::ArrayXXd diff =
        p.row(d).transpose().replicate(1, q.cols()).array() -
        q.row(d).replicate(p.cols(), 1).array();
    if (spec.family == KernelFamily::kGaussian) {
      acc += diff.square();
    } else {
      acc += diff.abs();
    }
  }
  if (spec.family == KernelFamily::kGaussian) {
    return (-acc / (2.0 * spec.sigma * spec.sigma)).exp();
  }
  return (-acc / spec.sigma).exp();
}

// Gaussian terms with d^2 / (2 sigma^2) beyond this are below 5e-18 and
// dropped by the one-dimensional path.
constexpr double kGaussianCutoff = 40.0;

std::vector<double> Sorted(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  std::sort(v.begin(), v.end());
  return v;
}

// Sum over all ordered pairs of exp(-|x_i - y_j| / sigma), both sorted.
double LaplacianCrossSum(const std::vector<double>& x,
                         const std::vector<double>& y, double sigma) {
  double total = 0.0;
  // y_j <= x_i, sweeping upwards.
  double acc = 0.0, at = 0.0;
  bool started = false;
  std::size_t j = 0;
  for (double xi : x) {
    while (j < y.size() && y[j] <= xi) {
      acc = started ? acc * std::exp(-(y[j] - at) / sigma) + 1.0 : 1.0;
      at = y[j];
      started = true;
      ++j;
    }
    if (started) {
      acc *= std::exp(-(xi - at) / sigma);
      at = xi;
      total += acc;
    }
  }
  // y_j > x_i, sweeping downwards.
  acc = 0.0;
  started = false;
  std::size_t k = y.size();
  for (std::size_t i = x.size(); i-- > 0;) {
    const double xi = x[i];
    while (k > 0 && y[k - 1] > xi) {
      --k;
      acc = started ? acc * std::exp(-(at - y[k]) / sigma) + 1.0 : 1.0;
      at = y[k];
      started = true;
    }
    if (started) {
      acc *= std::exp(-(at - xi) / sigma);
      at = xi;
      total += acc;
    }
  }
  return total;
}

// Sum over ordered pairs i != j of exp(-|x_i - x_j| / sigma), x sorted.
double LaplacianSelfSum(const std::vector<double>& x, double sigma) {
  double total = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) acc = (acc + 1.0) * std::exp(-(x[i] - x[i - 1]) / sigma);
    total += acc;
  }
  return 2.0 * total;
}

double GaussianCrossSum(const std::vector<double>& x,
                        const std::vector<double>& y, double sigma) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  const double reach = std::sqrt(kGaussianCutoff / scale);
  double total = 0.0;
  std::size_t lo = 0;
  for (double xi : x) {
    while (lo < y.size() && y[lo] < xi - reach) ++lo;
    for (std::size_t j = lo; j < y.size() && y[j] <= xi + reach; ++j) {
      const double d = xi - y[j];
      total += std::exp(-d * d * scale);
    }
  }
  return total;
}

double GaussianSelfSum(const std::vector<double>& x, double sigma) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  const double reach = std::sqrt(kGaussianCutoff / scale);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size() && x[j] - x[i] <= reach; ++j) {
      const double d = x[j] - x[i];
      total += std::exp(-d * d * scale);
    }
  }
  return 2.0 * total;
}

// Kernel sum over all pairs of one-dimensional samples; `self` means x and y
// are the same set and the diagonal is excluded.
double PairSum1d(const KernelSpec& spec, const std::vector<double>& x,
                 const std::vector<double>& y, bool self) {
  if (spec.family == KernelFamily::kLaplacian) {
    return self ? LaplacianSelfSum(x, spec.sigma)
                : LaplacianCrossSum(x, y, spec.sigma);
  }
  return self ? GaussianSelfSum(x, spec.sigma)
              : GaussianCrossSum(x, y, spec.sigma);
}

Matrix Sample(BehaviorSampler sampler, int n, Rng& rng) {
  Matrix out(1, n);
  if (sampler == BehaviorSampler::kStdNormal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n; ++i) out(0, i) = normal(rng);
  } else {
    std::uniform_real_distribution<double> magnitude(1.0, 2.0);
    std::bernoulli_distribution sign(0.5);
    for (int i = 0; i < n; ++i) {
      const double m = magnitude(rng);
      out(0, i) = sign(rng) ? m : -m;
    }
  }
  return out;
}

std::string FormatNumber(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

std::string KernelFamilyName(KernelFamily family) {
  return family == KernelFamily::kGaussian ? "gaussian" : "laplacian";
}

KernelFamily ParseKernelFamily(const std::string& name) {
  if (name == "gaussian") return KernelFamily::kGaussian;
  if (name == "laplacian") return KernelFamily::kLaplacian;
  throw ValueError("unknown kernel family '" + name + "'");
}

void KernelSpec::Validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValueError("kernel bandwidth must be positive");
  }
}

double KernelEval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  spec.Validate();
  if (x.size() != y.size()) throw ShapeError("kernel: dimensions differ");
  if (!x.allFinite() || !y.allFinite()) {
    throw ValueError("kernel: non-finite input");
  }
  if (spec.family == KernelFamily::kGaussian) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
  }
  return std::exp(-(x - y).lpNorm<1>() / spec.sigma);
}

double MeanKernel(const KernelSpec& spec, const Matrix& p, const Matrix& q,
                  bool skip_diagonal) {
  spec.Validate();
  if (p.cols() == 0 || q.cols() == 0) throw ValueError("empty sample set");
  if (p.rows() == 1 && q.rows() == 1) {
    const double n = static_cast<double>(p.cols());
    const double m = static_cast<double>(q.cols());
    const std::vector<double> x = Sorted(p);
    if (&p == &q || skip_diagonal) {
      if (skip_diagonal && (p.cols() != q.cols() || p.cols() < 2)) {
        throw ValueError("diagonal-free mean needs one square sample set");
      }
      const double off = PairSum1d(spec, x, x, true);
      return skip_diagonal ? off / (n * (n - 1.0)) : (off + n) / (n * n);
    }
    return PairSum1d(spec, x, Sorted(q), false) / (n * m);
  }
  const Eigen::ArrayXXd k = KernelMatrix(spec, p, q);
  if (!skip_diagonal) return k.sum() / static_cast<double>(k.size());
  if (p.cols() != q.cols() || p.cols() < 2) {
    throw ValueError("diagonal-free mean needs one square sample set");
  }
  const double n = static_cast<double>(p.cols());
  return (k.sum() - k.matrix().trace()) / (n * (n - 1.0));
}

std::string MmdEstimatorName(MmdEstimator estimator) {
  return estimator == MmdEstimator::kVStatistic ? "v" : "u";
}

MmdEstimator ParseMmdEstimator(const std::string& name) {
  if (name == "v") return MmdEstimator::kVStatistic;
  if (name == "u") return MmdEstimator::kUStatistic;
  throw ValueError("unknown MMD estimator '" + name + "'");
}

double SampledMmd(const KernelSpec& spec, const Matrix& p, const Matrix& q,
                  MmdEstimator estimator) {
  if (p.cols() < 2 || q.cols() < 2) {
    throw ValueError("MMD needs at least two samples per set");
  }
  const bool u = estimator == MmdEstimator::kUStatistic;
  return MeanKernel(spec, p, p, u) - 2.0 * MeanKernel(spec, p, q) +
         MeanKernel(spec, q, q, u);
}

void MmdScenario::Validate() const {
  if (sweep.empty()) throw ConfigError("mmd.sweep", "must not be empty");
  if (n_samples < 2) throw ConfigError("mmd.n_samples", "must be >= 2");
  if (n_repeats < 1) throw ConfigError("mmd.n_repeats", "must be >= 1");
  if (!(agent_std > 0.0)) throw ConfigError("mmd.agent_std", "must be > 0");
  if (agent == AgentFamily::kScaledNormal) {
    for (double x : sweep) {
      if (!(x > 0.0)) {
        throw ConfigError("mmd.sweep", "standard deviations must be > 0");
      }
    }
  }
}

std::vector<double> Grid(double from, double to, double step) {
  if (!(step > 0.0) || to < from) throw ValueError("invalid sweep grid");
  const long n = std::lround((to - from) / step);
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) {
    // Round to the grid so that 0 and +-1.5 are represented exactly.
    out.push_back(std::round((from + i * step) / step) * step);
  }
  return out;
}

MmdScenario MmdScenario::MatchedNormal() {
  MmdScenario s;
  s.name = "matched_normal";
  s.behavior = BehaviorSampler::kStdNormal;
  s.agent = AgentFamily::kScaledNormal;
  s.sweep = Grid(0.1, 3.0, 0.1);
  return s;
}

MmdScenario MmdScenario::BimodalHole() {
  MmdScenario s;
  s.name = "bimodal_hole";
  s.behavior = BehaviorSampler::kUniformBimodal;
  s.agent = AgentFamily::kShiftedNormal;
  s.agent_std = 0.5;
  s.sweep = Grid(-3.0, 3.0, 0.1);
  return s;
}

std::vector<KernelSpec> DefaultKernels() {
  std::vector<KernelSpec> out;
  for (KernelFamily family : {KernelFamily::kGaussian, KernelFamily::kLaplacian}) {
    for (double sigma : {0.1, 1.0, 3.0, 10.0}) out.push_back({family, sigma});
  }
  return out;
}

std::vector<CurvePoint> RunScenario(const MmdScenario& scenario,
                                    const std::vector<KernelSpec>& kernels,
                                    std::uint64_t seed) {
  scenario.Validate();
  if (kernels.empty()) throw ValueError("no kernels to evaluate");
  for (const KernelSpec& k : kernels) k.Validate();
  const std::size_t nk = kernels.size();
  const std::size_t nx = scenario.sweep.size();
  // values[k][x][r]
  std::vector<std::vector<std::vector<double>>> values(
      nk, std::vector<std::vector<double>>(
              nx, std::vector<double>(scenario.n_repeats)));
  for (std::size_t xi = 0; xi < nx; ++xi) {
    const double x = scenario.sweep[xi];
    for (int r = 0; r < scenario.n_repeats; ++r) {
      Rng rng = MakeRng(seed, scenario.name + "/" + std::to_string(xi) + "/" +
                                  std::to_string(r));
      const Matrix behavior = Sample(scenario.behavior, scenario.n_samples, rng);
      Matrix agent = Sample(BehaviorSampler::kStdNormal, scenario.n_samples,
                            rng);
      if (scenario.agent == AgentFamily::kScaledNormal) {
        agent *= x;
      } else {
        agent = (agent * scenario.agent_std).array() + x;
      }
      for (std::size_t k = 0; k < nk; ++k) {
        values[k][xi][r] =
            SampledMmd(kernels[k], agent, behavior, scenario.estimator);
      }
    }
  }
  std::vector<CurvePoint> out;
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t xi = 0; xi < nx; ++xi) {
      const auto& v = values[k][xi];
      double mean = 0.0;
      for (double e : v) mean += e;
      mean /= static_cast<double>(v.size());
      double sq = 0.0;
      for (double e : v) sq += (e - mean) * (e - mean);
      out.push_back({kernels[k], scenario.sweep[xi], mean,
                     std::sqrt(sq / static_cast<double>(v.size()))});
    }
  }
  return out;
}

double CurveArgmin(const std::vector<CurvePoint>& curve,
                   const KernelSpec& kernel) {
  const CurvePoint* best = nullptr;
  for (const CurvePoint& p : curve) {
    if (!(p.kernel == kernel)) continue;
    if (best == nullptr || p.mean < best->mean) best = &p;
  }
  if (best == nullptr) throw ValueError("kernel not present in the curve");
  return best->x;
}

std::string CurvesToCsv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "kernel,sigma,x,mean,std\n";
  for (const CurvePoint& p : curve) {
    out << KernelFamilyName(p.kernel.family) << ','
        << FormatNumber(p.kernel.sigma) << ',' << FormatNumber(p.x) << ','
        << FormatNumber(p.mean) << ',' << FormatNumber(p.std) << '\n';
  }
  return out.str();
}

std::string CurvesToLongFormat(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  const KernelSpec* current = nullptr;
  for (const CurvePoint& p : curve) {
    if (current == nullptr || !(*current == p.kernel)) {
      if (current != nullptr) out << "\n\n";
      out << "# " << KernelFamilyName(p.kernel.family)
          << " sigma=" << FormatNumber(p.kernel.sigma) << "\n# x mean std\n";
      current = &p.kernel;
    }
    out << FormatNumber(p.x) << ' ' << FormatNumber(p.mean) << ' '
        << FormatNumber(p.std) << '\n';
  }
  return out.str();
}

}  // namespace plas
