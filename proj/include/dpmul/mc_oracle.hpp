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

#ifndef DPMUL_MC_ORACLE_HPP_
#define DPMUL_MC_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/product_decoder.hpp"
#include "dpmul/rng.hpp"
#include "dpmul/scheme_encoder.hpp"

namespace dpmul {

enum class InputKind { kRademacher, kUniform, kGaussian };

struct InputModel {
  InputKind kind = InputKind::kRademacher;
  double variance = 1.0;

  double Draw(Rng& rng) const;
};

InputKind ParseInputKind(const std::string& name);
std::string InputKindName(InputKind kind);

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::string isa;
};

struct McOptions {
  std::int64_t samples = 100000;
  std::uint64_t seed = 42;
  int threads = 1;
  // Multiplies every staircase draw; 1 keeps the calibrated noise.
  double r_scale = 1.0;
};

McResult MonteCarloLmse(const SchemeParams& params,
                        const NoiseCalibration& calibration,
                        const ScalingSchedule& schedule,
                        const EvaluationGrid& grid, const InputModel& inputs,
                        const LinearDecoder& decoder, const McOptions& options);

double DirectCk(std::span<const double> a, std::span<const double> r, int k);
double DirectDk(std::span<const double> a, std::span<const double> z, int k);

// Draws one sample of node outputs and the target prod(A).
struct SchemeSampler {
  int outputs = 0;
  std::function<void(Rng&, double* y, double* target)> draw;
  // Invertible map applied to y before fitting; keeps the empirical
  // covariance well conditioned without changing the linear span.
  Eigen::MatrixXd precondition;
};

SchemeSampler LayeredSampler(const SchemeParams& params,
                             const NoiseCalibration& calibration,
                             const ScalingSchedule& schedule,
                             const EvaluationGrid& grid,
                             const InputModel& inputs, double r_scale = 1.0);

// Each node adds its own independent staircase noise at the full epsilon.
SchemeSampler IndependentBaselineSampler(const SchemeParams& params,
                                         const InputModel& inputs);

struct OptimalLinearResult {
  McResult held_out;            // achieved LMSE on fresh samples
  double in_sample_lmse = 0.0;  // plug-in value from the fitted moments
  Eigen::VectorXd weights;      // in node-output coordinates
  bool ridge = false;
};

OptimalLinearResult McOptimalLinear(const SchemeSampler& sampler,
                                    const McOptions& options);

McResult McFixedLinear(const SchemeSampler& sampler,
                       std::span<const double> weights,
                       const McOptions& options);

}  // namespace dpmul

#endif  // DPMUL_MC_ORACLE_HPP_
