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

#ifndef DPMUL_PRODUCT_DECODER_HPP_
#define DPMUL_PRODUCT_DECODER_HPP_

#include <span>
#include <vector>

#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/scheme_encoder.hpp"

namespace dpmul {

inline constexpr double kIllConditioned = 1e12;

struct CoefficientSet {
  std::vector<double> c;
  int r = 0;
  double condition = 1.0;
  bool ill_conditioned = false;
};

CoefficientSet VandermondeSolve(std::span<const double> points,
                                std::span<const double> values);

struct MmseAlpha {
  double alpha;
  double residual_var;  // E[Z^2] = eta sigma^2 / (eta + sigma^2)
};

MmseAlpha ComputeMmseAlpha(double eta, double sigma_sq);

// C-hat_l = c_{lT} / zeta1^l over the first (M-1)T+1 outputs.
std::vector<double> ExtractSymmetricSums(const SchemeParams& params,
                                         const ScalingSchedule& schedule,
                                         std::span<const double> node_outputs,
                                         const EvaluationGrid& grid);

std::vector<double> DkFromCk(std::span<const double> c, double alpha);

// Forward map C_k = sum_u C_{k,u} D_u, used as the inverse check.
std::vector<double> CkFromDk(std::span<const double> d, double alpha);

// Sign-corrected alternating sum: +prod(A) +/- prod(Z).
double FinalEstimate(std::span<const double> d, int m);

struct DecodedEstimate {
  double estimate = 0.0;
  std::vector<double> C;
  std::vector<double> D;
  double alpha = 0.0;
  // Minimal regime only: (c0, c0 + cT) and their LMMSE weights.
  std::vector<double> observations;
  std::vector<double> weights;
};

DecodedEstimate DecodeOptimalRegime(const SchemeParams& params,
                                    const NoiseCalibration& calibration,
                                    const ScalingSchedule& schedule,
                                    std::span<const double> node_outputs,
                                    const EvaluationGrid& grid);

DecodedEstimate DecodeMinimalRegime(const SchemeParams& params,
                                    const NoiseCalibration& calibration,
                                    const ScalingSchedule& schedule,
                                    std::span<const double> node_outputs,
                                    const EvaluationGrid& grid);

DecodedEstimate Decode(const SchemeParams& params,
                       const NoiseCalibration& calibration,
                       const ScalingSchedule& schedule,
                       std::span<const double> node_outputs,
                       const EvaluationGrid& grid);

// Both decoders are linear in the node outputs; this holds the functional
// d so Monte Carlo can skip the staged pipeline.
struct LinearDecoder {
  Regime regime = Regime::kOutOfScope;
  std::vector<double> weights;  // length N, zero past the used outputs

  double Apply(std::span<const double> node_outputs) const;
};

LinearDecoder MakeDecoder(const SchemeParams& params,
                          const NoiseCalibration& calibration,
                          const ScalingSchedule& schedule,
                          const EvaluationGrid& grid);

}  // namespace dpmul

#endif  // DPMUL_PRODUCT_DECODER_HPP_
