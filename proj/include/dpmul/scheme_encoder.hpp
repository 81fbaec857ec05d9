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

// Scheme parameters, scaling schedules, evaluation grids, and the layered
// share encoder.
//
// For multiplicand i the encoding polynomial is
//
//   p_i(x) = (A_i + R_i) + zeta2 * sum_{t=1}^{T-1} S_{i,t} x^t + zeta1 R_i x^T
//
// (for T = 1 the middle layer is empty and the last term is zeta1 R_i x).
// Node j stores p_i(x_j) for every i and outputs their product.

#ifndef DPMUL_SCHEME_ENCODER_HPP_
#define DPMUL_SCHEME_ENCODER_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/rng.hpp"

namespace dpmul {

enum class Regime { kOptimal, kMinimal, kOutOfScope };

std::string RegimeName(Regime regime);

// kOptimal iff (M-1)T+1 <= N <= MT; kMinimal iff N = T+1 < M.
Regime ClassifyRegime(int m, int n, int t);

struct SchemeParams {
  int M = 0;
  int N = 0;
  int T = 0;
  double eta = 1.0;
  double epsilon = 1.0;
  Regime regime = Regime::kOutOfScope;

  // Validates ranges and classifies; does not reject kOutOfScope (callers
  // that need a decodable scheme call RequireSupported()).
  static SchemeParams Create(int m, int n, int t, double eta, double epsilon);

  void RequireSupported() const;

  // Number of evaluations the decoder consumes: (M-1)T+1 in the optimal
  // regime, T+1 in the minimal regime.
  int DecodeEvaluations() const;
};

struct ScalingSchedule {
  int n = 0;
  double zeta1 = 0.0;
  std::optional<double> zeta2;  // absent for T = 1
  double beta1 = 1.0;
};

// T >= 2: zeta2 = 1/n, zeta1 = n^-beta1 with beta1 = (2T-1)/(2(T-1)) unless
// overridden (must lie in (1, T/(T-1))). T = 1: zeta1 = 1/n.
ScalingSchedule MakeSchedule(int n, int t,
                             std::optional<double> beta1 = std::nullopt);

struct EvaluationGrid {
  std::vector<double> points;

  // Throws ParameterError on duplicates or non-finite points.
  static EvaluationGrid Create(std::vector<double> points);
  int size() const { return static_cast<int>(points.size()); }
};

// x_j = j for j = 1..N.
EvaluationGrid DefaultGrid(int n);

// 2-norm condition number of the square Vandermonde matrix of the first
// `count` grid points.
double VandermondeCondition(const EvaluationGrid& grid, int count);

// Noisy shares plus the noise realization that produced them.
struct ShareTable {
  int N = 0;
  int M = 0;
  int T = 0;
  std::vector<double> shares;   // row-major N x M
  std::vector<double> noise_r;  // M
  std::vector<double> noise_s;  // row-major M x (T-1)
  std::optional<std::vector<double>> inputs;  // oracle use only

  double share(int node, int multiplicand) const {
    return shares[static_cast<std::size_t>(node) * M + multiplicand];
  }
  double s(int multiplicand, int t_index) const {
    return noise_s[static_cast<std::size_t>(multiplicand) * (T - 1) + t_index];
  }

  // Copy without the retained inputs, as a node-facing view.
  ShareTable StripInputs() const;
};

// Per-node coefficients of the layered polynomial at a fixed grid point:
// share = ((a + r) + sum_t s_coef[t] * s_t) + r_coef * r.
struct ShareCoefficients {
  std::vector<double> s_coef;  // zeta2 * x^t, t = 1..T-1
  double r_coef = 0.0;         // zeta1 * x^T
};

ShareCoefficients NodeShareCoefficients(const ScalingSchedule& schedule,
                                        double x, int t);

// Evaluates one share with the fixed operation order shared by the scalar
// and SIMD batch kernels.
inline double EvaluateShare(double a, double r, const double* s,
                            const ShareCoefficients& coef) {
  double v = a + r;
  for (std::size_t t = 0; t < coef.s_coef.size(); ++t) {
    v = v + coef.s_coef[t] * s[t];
  }
  return v + coef.r_coef * r;
}

// Deterministic encoding from a given noise realization.
ShareTable EncodeWithNoise(const SchemeParams& params,
                           const ScalingSchedule& schedule,
                           const EvaluationGrid& grid,
                           std::span<const double> inputs,
                           std::span<const double> noise_r,
                           std::span<const double> noise_s);

// Draws R_i from the calibrated staircase and S_{i,t} from unit Laplace and
// encodes. Throws UsageError for out-of-scope parameters and ParameterError
// for non-finite inputs or mismatched sizes.
ShareTable Encode(const SchemeParams& params,
                  const NoiseCalibration& calibration,
                  const ScalingSchedule& schedule, const EvaluationGrid& grid,
                  std::span<const double> inputs, Rng& rng);

// V^(j) = prod_i share(j, i).
std::vector<double> NodeProducts(const ShareTable& table);

}  // namespace dpmul

#endif  // DPMUL_SCHEME_ENCODER_HPP_
