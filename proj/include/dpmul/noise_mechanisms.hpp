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

// Additive noise mechanisms for unit-sensitivity scalar queries: the
// staircase mechanism (density, sampler, variance-optimal calibration) and
// unit-variance Laplace noise.
//
// The staircase density with parameters (epsilon, gamma) is piecewise
// constant on [k, k+gamma) and [k+gamma, k+1) for every period k >= 0 and
// mirrored for negative x:
//
//   f(x) = a * b^k        for |x| - k in [0, gamma)
//   f(x) = a * b^(k+1)    for |x| - k in [gamma, 1)
//
// with b = exp(-epsilon) and a = (1 - b) / (2 (gamma + b (1 - gamma))).

#ifndef DPMUL_NOISE_MECHANISMS_HPP_
#define DPMUL_NOISE_MECHANISMS_HPP_

#include "dpmul/rng.hpp"

namespace dpmul {

// Staircase parameters. Sensitivity is fixed to 1.
class StaircaseSpec {
 public:
  // Throws ParameterError unless epsilon > 0 and 0 < gamma <= 1.
  static StaircaseSpec Create(double epsilon, double gamma);

  double epsilon() const { return epsilon_; }
  double gamma() const { return gamma_; }
  double delta() const { return 1.0; }

  // Density value at the origin.
  double normalizer() const;

 private:
  StaircaseSpec(double epsilon, double gamma)
      : epsilon_(epsilon), gamma_(gamma) {}

  double epsilon_;
  double gamma_;
};

// Smallest variance of any additive noise achieving epsilon-DP at unit
// sensitivity: (2^{-2/3} b^{2/3} (1+b)^{2/3} + b) / (1-b)^2 with b = e^-eps.
double OptimalVariance(double epsilon);

double StaircasePdf(double x, const StaircaseSpec& spec);

// Closed-form second moment of the staircase density.
double StaircaseVariance(const StaircaseSpec& spec);

// Numerically minimizes StaircaseVariance over gamma in (0, 1]. Throws
// NumericError if the minimizer does not reproduce OptimalVariance within
// 0.1% relative.
double OptimalGamma(double epsilon);

double StaircaseSample(const StaircaseSpec& spec, Rng& rng);

// Exact sup over x and |s| <= max_shift of log(f(x) / f(x + s)) for the
// staircase density. Each jump at +-(k + gamma) contributes epsilon; a shift
// can straddle ceil(max_shift) of them (one when max_shift <= 1).
double StaircaseSupLogRatio(const StaircaseSpec& spec, double max_shift);

struct NoiseCalibration {
  double target_epsilon;
  double eps_bar;
  double gamma_star;
  double sigma_sq;

  StaircaseSpec spec() const {
    return StaircaseSpec::Create(eps_bar, gamma_star);
  }
};

inline constexpr double kDefaultPrivSlack = 0.01;

// Calibrates the base-layer noise to eps_bar = epsilon * (1 - priv_slack),
// strictly below the target. Throws ParameterError unless epsilon > 0 and
// 0 < priv_slack < 1.
NoiseCalibration CalibrateRNoise(double epsilon,
                                 double priv_slack = kDefaultPrivSlack);

// Zero-mean Laplace with scale 1/sqrt(2), i.e. variance 1.
double LaplaceUnitSample(Rng& rng);
double LaplaceUnitPdf(double x);

}  // namespace dpmul

#endif  // DPMUL_NOISE_MECHANISMS_HPP_
