//
// Copyright 2026 The dpmul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpmul/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "dpmul/errors.hpp"
#include "dpmul/kernels/kernels.hpp"
#include "dpmul/theory_bounds.hpp"

namespace dpmul {
namespace {

constexpr std::int64_t kChunk = 4096;
// Held-out evaluation uses a disjoint seed stream.
constexpr std::uint64_t kHeldOutSalt = 0x5eed0f0e11d0a7aULL;

// Runs fn(chunk_index, count) for every chunk; results stay in chunk
// order so merging is independent of the worker count.
template <typename Fn>
auto RunChunks(std::int64_t total, int threads, Fn fn) {
  using Result = decltype(fn(std::int64_t{0}, std::int64_t{0}));
  const std::int64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t c = next++; c < chunks; c = next++) {
      const std::int64_t count = std::min(kChunk, total - c * kChunk);
      results[static_cast<std::size_t>(c)] = fn(c, count);
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

McResult FromMoments(const kernels::Moments& m, std::uint64_t seed) {
  McResult r;
  r.estimate = m.mean;
  r.samples = m.count;
  r.seed = seed;
  r.std_error =
      m.count > 1 ? std::sqrt(m.m2 / static_cast<double>(m.count - 1) /
                              static_cast<double>(m.count))
                  : 0.0;
  r.isa = kernels::ActiveIsaName();
  return r;
}

Eigen::MatrixXd VandermondeInverse(const EvaluationGrid& grid, int n) {
  Eigen::MatrixXd v(n, n);
  for (int r = 0; r < n; ++r) {
    double p = 1.0;
    for (int c = 0; c < n; ++c) {
      v(r, c) = p;
      p *= grid.points[r];
    }
  }
  return v.fullPivLu().inverse();
}

}  // namespace

double InputModel::Draw(Rng& rng) const {
  const double sd = std::sqrt(variance);
  switch (kind) {
    case InputKind::kRademacher:
      return rng.Sign() * sd;
    case InputKind::kUniform:
      return (2.0 * rng.Uniform() - 1.0) * std::sqrt(3.0) * sd;
    case InputKind::kGaussian:
      return rng.StandardNormal() * sd;
  }
  return 0.0;
}

InputKind ParseInputKind(const std::string& name) {
  if (name == "rademacher") return InputKind::kRademacher;
  if (name == "uniform") return InputKind::kUniform;
  if (name == "gaussian") return InputKind::kGaussian;
  throw ParameterError("input_model", "unknown input model '" + name + "'");
}

std::string InputKindName(InputKind kind) {
  switch (kind) {
    case InputKind::kRademacher:
      return "rademacher";
    case InputKind::kUniform:
      return "uniform";
    case InputKind::kGaussian:
      return "gaussian";
  }
  return "unknown";
}

McResult MonteCarloLmse(const SchemeParams& params,
                        const NoiseCalibration& calibration,
                        const ScalingSchedule& schedule,
                        const EvaluationGrid& grid, const InputModel& inputs,
                        const LinearDecoder& decoder,
                        const McOptions& options) {
  params.RequireSupported();
  if (decoder.regime != params.regime) {
    throw UsageError("decoder.regime==params.regime",
                     "decoder built for " + RegimeName(decoder.regime) +
                         " but scheme is " + RegimeName(params.regime));
  }
  if (options.samples < 1000) {
    throw ParameterError("samples>=1000", "Monte Carlo needs >= 1000 samples");
  }
  if (static_cast<int>(decoder.weights.size()) != params.N ||
      grid.size() < params.N) {
    throw ParameterError("decoder-size", "decoder/grid size must match N");
  }
  const int m = params.M;
  const int ns = params.T - 1;
  const int used = params.DecodeEvaluations();
  std::vector<ShareCoefficients> coef;
  for (int j = 0; j < used; ++j) {
    coef.push_back(NodeShareCoefficients(schedule, grid.points[j], params.T));
  }
  const StaircaseSpec spec = calibration.spec();
  const kernels::KernelTable& k = kernels::ActiveKernels();

  auto chunk_fn = [&](std::int64_t c, std::int64_t count) {
    Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(c)));
    const std::size_t len = static_cast<std::size_t>(count);
    std::vector<double> a(m * len), r(m * len), s(m * ns * len);
    for (std::size_t b = 0; b < len; ++b) {
      for (int i = 0; i < m; ++i) a[i * len + b] = inputs.Draw(rng);
      for (int i = 0; i < m; ++i) {
        r[i * len + b] = options.r_scale * StaircaseSample(spec, rng);
        for (int t = 0; t < ns; ++t) {
          s[(i * ns + t) * len + b] = LaplaceUnitSample(rng);
        }
      }
    }
    std::vector<double> share(len), prod(len), est(len, 0.0),
        target(len, 1.0), err(len);
    std::vector<const double*> sp(std::max(ns, 1));
    for (int i = 0; i < m; ++i) k.multiply_inplace(target.data(), &a[i * len], len);
    for (int j = 0; j < used; ++j) {
      std::fill(prod.begin(), prod.end(), 1.0);
      for (int i = 0; i < m; ++i) {
        for (int t = 0; t < ns; ++t) sp[t] = &s[(i * ns + t) * len];
        k.layered_share(&a[i * len], &r[i * len], sp.data(),
                        coef[j].s_coef.data(), ns, coef[j].r_coef,
                        share.data(), len);
        k.multiply_inplace(prod.data(), share.data(), len);
      }
      k.axpy(decoder.weights[j], prod.data(), est.data(), len);
    }
    k.squared_error(est.data(), target.data(), err.data(), len);
    return k.moments(err.data(), len);
  };

  kernels::Moments total;
  for (const auto& mo : RunChunks(options.samples, options.threads, chunk_fn)) {
    total.Merge(mo);
  }
  if (!std::isfinite(total.mean)) {
    throw NumericError("lmse-finite", "Monte Carlo LMSE is not finite");
  }
  return FromMoments(total, options.seed);
}

double DirectCk(std::span<const double> a, std::span<const double> r, int k) {
  const int m = static_cast<int>(a.size());
  if (k < 0 || k > m || r.size() != a.size()) {
    throw ParameterError("0<=k<=M", "invalid subset size");
  }
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < m; ++i) {
      p *= (mask >> i & 1u) ? r[i] : a[i] + r[i];
    }
    sum += p;
  }
  return sum;
}

double DirectDk(std::span<const double> a, std::span<const double> z, int k) {
  const int m = static_cast<int>(a.size());
  if (k < 0 || k > m || z.size() != a.size()) {
    throw ParameterError("0<=k<=M", "invalid subset size");
  }
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < m; ++i) {
      p *= (mask >> i & 1u) ? a[i] : a[i] + z[i];
    }
    sum += p;
  }
  return sum;
}

SchemeSampler LayeredSampler(const SchemeParams& params,
                             const NoiseCalibration& calibration,
                             const ScalingSchedule& schedule,
                             const EvaluationGrid& grid,
                             const InputModel& inputs, double r_scale) {
  params.RequireSupported();
  const int m = params.M;
  const int t = params.T;
  const int n = params.N;
  if (m > 64 || t > 9) {
    throw ParameterError("M<=64,T<=9", "sampler supports M <= 64, T <= 9");
  }
  std::vector<ShareCoefficients> coef;
  for (int j = 0; j < n; ++j) {
    coef.push_back(NodeShareCoefficients(schedule, grid.points[j], t));
  }
  const StaircaseSpec spec = calibration.spec();
  SchemeSampler s;
  s.outputs = n;
  s.precondition = VandermondeInverse(grid, n);
  s.draw = [=](Rng& rng, double* y, double* target) {
    double a[64], r[64], sv[64 * 8];
    for (int i = 0; i < m; ++i) a[i] = inputs.Draw(rng);
    for (int i = 0; i < m; ++i) {
      r[i] = r_scale * StaircaseSample(spec, rng);
      for (int k = 0; k < t - 1; ++k) sv[i * (t - 1) + k] = LaplaceUnitSample(rng);
    }
    double v = 1.0;
    for (int i = 0; i < m; ++i) v *= a[i];
    *target = v;
    for (int j = 0; j < n; ++j) {
      double p = 1.0;
      for (int i = 0; i < m; ++i) {
        p *= EvaluateShare(a[i], r[i], t >= 2 ? &sv[i * (t - 1)] : nullptr,
                           coef[j]);
      }
      y[j] = p;
    }
  };
  return s;
}

SchemeSampler IndependentBaselineSampler(const SchemeParams& params,
                                         const InputModel& inputs) {
  const int m = params.M;
  const int n = params.N;
  if (m > 64) throw ParameterError("M<=64", "sampler supports M <= 64");
  const StaircaseSpec spec =
      StaircaseSpec::Create(params.epsilon, OptimalGamma(params.epsilon));
  SchemeSampler s;
  s.outputs = n;
  s.precondition = Eigen::MatrixXd::Identity(n, n);
  s.draw = [=](Rng& rng, double* y, double* target) {
    double a[64];
    double v = 1.0;
    for (int i = 0; i < m; ++i) {
      a[i] = inputs.Draw(rng);
      v *= a[i];
    }
    *target = v;
    for (int j = 0; j < n; ++j) {
      double p = 1.0;
      for (int i = 0; i < m; ++i) p *= a[i] + StaircaseSample(spec, rng);
      y[j] = p;
    }
  };
  return s;
}

OptimalLinearResult McOptimalLinear(const SchemeSampler& sampler,
                                    const McOptions& options) {
  if (options.samples < 10000) {
    throw ParameterError("samples>=10000",
                         "optimal-linear fit needs >= 10^4 samples");
  }
  const int n = sampler.outputs;
  const Eigen::MatrixXd& pre = sampler.precondition;

  struct Sums {
    Eigen::MatrixXd ff;
    Eigen::VectorXd fv;
    double vv = 0.0;
  };
  auto fit_chunk = [&](std::int64_t c, std::int64_t count) {
    Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(c)));
    Sums s{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
    Eigen::VectorXd y(n);
    for (std::int64_t b = 0; b < count; ++b) {
      double v = 0.0;
      sampler.draw(rng, y.data(), &v);
      const Eigen::VectorXd f = pre * y;
      s.ff.selfadjointView<Eigen::Lower>().rankUpdate(f);
      s.fv += f * v;
      s.vv += v * v;
    }
    return s;
  };
  Sums total{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
  for (const Sums& s : RunChunks(options.samples, options.threads, fit_chunk)) {
    total.ff += s.ff;
    total.fv += s.fv;
    total.vv += s.vv;
  }
  const double inv = 1.0 / static_cast<double>(options.samples);
  Eigen::MatrixXd cov = total.ff.selfadjointView<Eigen::Lower>();
  cov *= inv;
  const Eigen::VectorXd cross = total.fv * inv;

  // Unit-RMS feature scaling; the LMMSE is invariant to it.
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) {
    scale(i) = cov(i, i) > 0.0 ? 1.0 / std::sqrt(cov(i, i)) : 1.0;
  }
  Eigen::MatrixXd cs = scale.asDiagonal() * cov * scale.asDiagonal();
  Eigen::VectorXd xs = scale.asDiagonal() * cross;

  OptimalLinearResult out;
  LmmseResult lm = LmmseWeights(cs, xs, total.vv * inv);
  if (lm.singular) {
    out.ridge = true;
    cs.diagonal().array() += 1e-10 * cs.trace() / n;
    lm = LmmseWeights(cs, xs, total.vv * inv);
  }
  out.in_sample_lmse = lm.lmse;
  out.weights = pre.transpose() * (scale.asDiagonal() * lm.weights);

  McOptions eval = options;
  eval.seed = options.seed ^ kHeldOutSalt;
  const std::vector<double> w(out.weights.data(),
                              out.weights.data() + out.weights.size());
  out.held_out = McFixedLinear(sampler, w, eval);
  out.held_out.seed = options.seed;
  return out;
}

McResult McFixedLinear(const SchemeSampler& sampler,
                       std::span<const double> weights,
                       const McOptions& options) {
  if (static_cast<int>(weights.size()) != sampler.outputs) {
    throw ParameterError("|w|==N", "weight vector has wrong length");
  }
  const int n = sampler.outputs;
  const kernels::KernelTable& k = kernels::ActiveKernels();
  auto chunk_fn = [&](std::int64_t c, std::int64_t count) {
    Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(c)));
    std::vector<double> err(static_cast<std::size_t>(count));
    std::vector<double> y(n);
    for (std::int64_t b = 0; b < count; ++b) {
      double v = 0.0;
      sampler.draw(rng, y.data(), &v);
      double est = 0.0;
      for (int j = 0; j < n; ++j) est += weights[j] * y[j];
      err[b] = (est - v) * (est - v);
    }
    return k.moments(err.data(), err.size());
  };
  kernels::Moments total;
  for (const auto& mo : RunChunks(options.samples, options.threads, chunk_fn)) {
    total.Merge(mo);
  }
  return FromMoments(total, options.seed);
}

}  // namespace dpmul
