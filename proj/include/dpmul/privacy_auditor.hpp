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

#ifndef DPMUL_PRIVACY_AUDITOR_HPP_
#define DPMUL_PRIVACY_AUDITOR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/scheme_encoder.hpp"

namespace dpmul {

// What T colluding nodes see of one multiplicand:
//   Z = (A + R) 1 + Gbar (zeta1 R, zeta2 S_1, ..., zeta2 S_{T-1}).
struct ColluderView {
  std::vector<int> subset;
  std::vector<double> points;
  Eigen::MatrixXd Gbar;  // row j = (x_j^T, x_j, ..., x_j^{T-1})
  Eigen::MatrixXd Gbar_inv;
  Eigen::VectorXd gprime_dot_one;  // Gbar_inv * 1
};

ColluderView BuildColluderView(const EvaluationGrid& grid,
                               const std::vector<int>& subset, int t);

struct ViewDecomposition {
  Eigen::MatrixXd P;      // Z = P Z'
  Eigen::MatrixXd P_inv;  // Z' = P_inv Z
  // Z'_1 = A + r_multiplier R.
  double r_multiplier = 0.0;
  // Z'_j = A + laplace_coef[j-2] S_{j-1}; zero when the coordinate is
  // pure noise (g'_j^T 1 == 0), in which case Z'_j = S_{j-1}.
  std::vector<double> laplace_coef;
  std::vector<bool> pure_noise;
};

ViewDecomposition DecomposeView(const ColluderView& view, double zeta1,
                                double zeta2);

struct BudgetReport {
  double eps_bar_bar = 0.0;
  std::vector<double> laplace_terms;
  double eps_total = 0.0;
  double target = 0.0;
  bool within_target = false;
  // Staircase-coordinate diagnostics: multiplier on R in Z'_1 and the
  // exact sup log-ratio of that coordinate at this finite n.
  double z1_multiplier = 1.0;
  double z1_exact_eps = 0.0;
};

BudgetReport BudgetAccount(const ColluderView& view, double zeta1,
                           double zeta2, double eps_bar_bar,
                           const NoiseCalibration& calibration);

// T = 1: a single node sees A + (1 + zeta1 x) R.
BudgetReport BudgetAccountScalar(double grid_point, double zeta1,
                                 double eps_bar_bar,
                                 const NoiseCalibration& calibration);

// Midpoint of (eps_bar, eps); the composed bound needs eps_bar < eps_bar_bar.
double DefaultEpsBarBar(const NoiseCalibration& calibration);

// Grid sup of log f(y/c)/f((y+s)/c), |s| <= 1, for the effective noise cR,
// c = 1 + zeta1 x^T. The x grid includes the density breakpoints.
double AuditMarginal(const NoiseCalibration& calibration, double zeta1,
                     double grid_point, int t = 1);

// Same sup for an arbitrary multiplier c != 0.
double AuditScaledStaircase(const StaircaseSpec& spec, double multiplier);

// Histogram estimate of the log-ratio between cR and 1 + cR.
double HistogramAudit(const StaircaseSpec& spec, double multiplier,
                      std::int64_t samples, std::uint64_t seed, int bins = 400);

// Worst T-subset budget over the grid at schedule index n.
BudgetReport WorstSubsetBudget(const SchemeParams& params,
                               const EvaluationGrid& grid,
                               const NoiseCalibration& calibration, int n,
                               std::optional<double> beta1 = std::nullopt,
                               std::optional<double> eps_bar_bar = std::nullopt);

struct ThresholdReport {
  std::optional<int> n0;  // absent if not reached below max_n
  BudgetReport at_n0;
};

// Smallest n with worst-subset eps_total <= eps (monotone in n).
ThresholdReport FindBudgetThreshold(
    const SchemeParams& params, const EvaluationGrid& grid,
    const NoiseCalibration& calibration,
    std::optional<double> beta1 = std::nullopt,
    std::optional<double> eps_bar_bar = std::nullopt, int max_n = 1 << 30);

}  // namespace dpmul

#endif  // DPMUL_PRIVACY_AUDITOR_HPP_
