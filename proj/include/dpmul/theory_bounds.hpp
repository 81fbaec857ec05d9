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

// Closed-form privacy/accuracy bounds and the linear MMSE machinery.
//
// With s = SNR*(eps) = eta / sigma*(eps)^2:
//   optimal regime          eta^M / (1+s)^M
//   minimal regime, upper   eta^M ((1+s)^M - M s^{M-1} - s^M) / (1+s)^M
//   minimal regime, lower   eta^M ((1+s)^{M-T} - s^{M-T}) / (1+s)^M
// All three are evaluated as sums of non-negative terms in the log domain so
// that large M or extreme eps neither overflow nor cancel.

#ifndef DPMUL_THEORY_BOUNDS_HPP_
#define DPMUL_THEORY_BOUNDS_HPP_

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dpmul {

struct SchemeParams;

double SnrStar(double epsilon, double eta);

double LmseOptimal(double epsilon, double eta, int m);

// Regime checks: both minimal-regime bounds require T+1 < M (N = T+1).
double LmseMinimalUpper(double epsilon, double eta, int m, int t);
double LmseMinimalLower(double epsilon, double eta, int m, int t);

// SNR' = s^{M-T} / ((1+s)^{M-T} - s^{M-T}).
double SnrPrime(double snr, int m, int t);

// Gap(s) = upper / lower for the minimal regime, as a function of s.
double GapOfSnr(double snr, int m, int t);
double Gap(double epsilon, double eta, int m, int t);

struct LmmseResult {
  Eigen::VectorXd weights;
  double lmse = 0.0;
  bool singular = false;  // pseudo-inverse path taken
  // 1 + SNR_a = det(K1)/det(K2); present when a noise covariance is given.
  std::optional<double> one_plus_snr;
};

// Solves cov_obs * w = cross. LMSE = target_var - cross^T w.
LmmseResult LmmseWeights(const Eigen::MatrixXd& cov_obs,
                         const Eigen::VectorXd& cross, double target_var,
                         const std::optional<Eigen::MatrixXd>& noise_cov =
                             std::nullopt);

// Independent staircase noise at every node (noise calibrated to eps itself):
// E[V_j V_k] = eta^M off the diagonal, (eta + sigma*^2)^M on it, and every
// node output has cross-moment eta^M with the target.
double BaselineIndependentLmse(double epsilon, double eta, int m, int n);
LmmseResult BaselineIndependentDecoder(double epsilon, double eta, int m,
                                       int n);

struct BoundSet {
  double snr_star = 0.0;
  double lmse_opt = 0.0;
  std::optional<double> lmse_min_upper;
  std::optional<double> lmse_min_lower;
  std::optional<double> gap;
  std::optional<double> snr_prime;
  double baseline_independent = 0.0;
};

BoundSet ComputeBounds(const SchemeParams& params);

}  // namespace dpmul

#endif  // DPMUL_THEORY_BOUNDS_HPP_
