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

#include "dpmul/noise_mechanisms.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "dpmul/errors.hpp"

namespace dpmul {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon>0", "epsilon must be positive and finite, got " +
                                          std::to_string(epsilon));
  }
}

}  // namespace

StaircaseSpec StaircaseSpec::Create(double epsilon, double gamma) {
  CheckEpsilon(epsilon);
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterError("0<gamma<=1",
                         "staircase gamma must lie in (0, 1], got " +
                             std::to_string(gamma));
  }
  return StaircaseSpec(epsilon, gamma);
}

double StaircaseSpec::normalizer() const {
  const double b = std::exp(-epsilon_);
  return (1.0 - b) / (2.0 * (gamma_ + b * (1.0 - gamma_)));
}

double OptimalVariance(double epsilon) {
  CheckEpsilon(epsilon);
  const double b = std::exp(-epsilon);
  const double one_minus_b = -std::expm1(-epsilon);
  const double num = std::cbrt(b * b * (1.0 + b) * (1.0 + b) / 4.0) + b;
  return num / (one_minus_b * one_minus_b);
}

double StaircasePdf(double x, const StaircaseSpec& spec) {
  const double ax = std::fabs(x);
  const double k = std::floor(ax);
  const double frac = ax - k;
  const double steps = frac < spec.gamma() ? k : k + 1.0;
  return spec.normalizer() * std::exp(-steps * spec.epsilon());
}

double StaircaseVariance(const StaircaseSpec& spec) {
  const double g = spec.gamma();
  const double b = std::exp(-spec.epsilon());
  const double omb = -std::expm1(-spec.epsilon());
  // Geometric moment sums: sum_k b^k k^m for m = 0, 1, 2.
  const double s0 = 1.0 / omb;
  const double s1 = b / (omb * omb);
  const double s2 = b * (1.0 + b) / (omb * omb * omb);
  const double first = 3.0 * g * s2 + 3.0 * g * g * s1 + g * g * g * s0;
  const double second = 3.0 * (1.0 - g) * s2 + 3.0 * (1.0 - g * g) * s1 +
                        (1.0 - g * g * g) * s0;
  return 2.0 * spec.normalizer() / 3.0 * (first + b * second);
}

double OptimalGamma(double epsilon) {
  CheckEpsilon(epsilon);
  auto variance_at = [epsilon](double g) {
    return StaircaseVariance(StaircaseSpec::Create(epsilon, g));
  };
  std::uintmax_t iterations = 200;
  const auto [gamma, variance] = boost::math::tools::brent_find_minima(
      variance_at, 1e-9, 1.0, std::numeric_limits<double>::digits / 2,
      iterations);
  const double target = OptimalVariance(epsilon);
  const double rel = std::fabs(variance / target - 1.0);
  if (iterations >= 200 || !(rel <= 1e-3)) {
    throw NumericError(
        "staircase-variance-minimization",
        "gamma minimization did not reach the optimal variance: eps=" +
            std::to_string(epsilon) + " gamma=" + std::to_string(gamma) +
            " variance=" + std::to_string(variance) +
            " optimum=" + std::to_string(target) +
            " iterations=" + std::to_string(iterations));
  }
  return gamma;
}

double StaircaseSample(const StaircaseSpec& spec, Rng& rng) {
  const double eps = spec.epsilon();
  const double g = spec.gamma();
  const double b = std::exp(-eps);
  const double sign = rng.Sign();
  // P(period >= k) = b^k.
  const double period = std::floor(-std::log(rng.UniformOpen()) / eps);
  const double p_first = g / (g + (1.0 - g) * b);
  const bool first = rng.Bernoulli(p_first);
  const double u = rng.Uniform();
  const double magnitude =
      first ? period + g * u : period + g + (1.0 - g) * u;
  return sign * magnitude;
}

double StaircaseSupLogRatio(const StaircaseSpec& spec, double max_shift) {
  if (!(max_shift > 0.0)) return 0.0;
  return spec.epsilon() * std::ceil(max_shift);
}

NoiseCalibration CalibrateRNoise(double epsilon, double priv_slack) {
  CheckEpsilon(epsilon);
  if (!(priv_slack > 0.0 && priv_slack < 1.0)) {
    throw ParameterError("0<priv_slack<1",
                         "priv_slack must lie in (0, 1), got " +
                             std::to_string(priv_slack));
  }
  NoiseCalibration cal;
  cal.target_epsilon = epsilon;
  cal.eps_bar = epsilon * (1.0 - priv_slack);
  cal.gamma_star = OptimalGamma(cal.eps_bar);
  cal.sigma_sq = StaircaseVariance(cal.spec());
  return cal;
}

double LaplaceUnitSample(Rng& rng) {
  const double sign = rng.Sign();
  return sign * kInvSqrt2 * -std::log(rng.UniformOpen());
}

double LaplaceUnitPdf(double x) {
  return kInvSqrt2 * std::exp(-std::fabs(x) / kInvSqrt2);
}

}  // namespace dpmul
