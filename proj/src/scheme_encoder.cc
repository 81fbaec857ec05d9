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

#include "dpmul/scheme_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dpmul/errors.hpp"

namespace dpmul {

std::string RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kOptimal:
      return "optimal";
    case Regime::kMinimal:
      return "minimal";
    case Regime::kOutOfScope:
      return "out_of_scope";
  }
  return "unknown";
}

Regime ClassifyRegime(int m, int n, int t) {
  if ((m - 1) * t + 1 <= n && n <= m * t) return Regime::kOptimal;
  if (n == t + 1 && n < m) return Regime::kMinimal;
  return Regime::kOutOfScope;
}

SchemeParams SchemeParams::Create(int m, int n, int t, double eta,
                                  double epsilon) {
  if (m < 2) throw ParameterError("M>=2", "M must be at least 2");
  if (n < 2) throw ParameterError("N>=2", "N must be at least 2");
  if (t < 1) throw ParameterError("T>=1", "T must be at least 1");
  if (t >= n) throw ParameterError("T<N", "T must be smaller than N");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ParameterError("eta>=0", "eta must be finite and non-negative");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon>0", "epsilon must be positive and finite");
  }
  SchemeParams p;
  p.M = m;
  p.N = n;
  p.T = t;
  p.eta = eta;
  p.epsilon = epsilon;
  p.regime = ClassifyRegime(m, n, t);
  return p;
}

void SchemeParams::RequireSupported() const {
  if (regime == Regime::kOutOfScope) {
    throw UsageError("regime!=out_of_scope",
                     "(M=" + std::to_string(M) + ", N=" + std::to_string(N) +
                         ", T=" + std::to_string(T) +
                         ") is neither (M-1)T+1 <= N <= MT nor N = T+1 < M");
  }
}

int SchemeParams::DecodeEvaluations() const {
  switch (regime) {
    case Regime::kOptimal:
      return (M - 1) * T + 1;
    case Regime::kMinimal:
      return T + 1;
    case Regime::kOutOfScope:
      break;
  }
  RequireSupported();
  return 0;
}

ScalingSchedule MakeSchedule(int n, int t, std::optional<double> beta1) {
  if (n < 2) throw ParameterError("n>=2", "schedule index n must be >= 2");
  if (t < 1) throw ParameterError("T>=1", "T must be at least 1");
  ScalingSchedule s;
  s.n = n;
  const double nd = static_cast<double>(n);
  if (t == 1) {
    s.beta1 = 1.0;
    s.zeta1 = 1.0 / nd;
    return s;
  }
  const double upper = static_cast<double>(t) / (t - 1);
  const double b1 = beta1.value_or((2.0 * t - 1.0) / (2.0 * (t - 1.0)));
  if (!(b1 > 1.0 && b1 < upper)) {
    throw ParameterError("1<beta1<T/(T-1)",
                         "beta1 must lie in (1, " + std::to_string(upper) +
                             "), got " + std::to_string(b1));
  }
  s.beta1 = b1;
  s.zeta2 = 1.0 / nd;
  s.zeta1 = std::pow(nd, -b1);
  return s;
}

EvaluationGrid EvaluationGrid::Create(std::vector<double> points) {
  for (double x : points) {
    if (!std::isfinite(x)) {
      throw ParameterError("grid-finite", "grid points must be finite");
    }
  }
  std::vector<double> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("grid-distinct", "grid points must be pairwise distinct");
  }
  EvaluationGrid g;
  g.points = std::move(points);
  return g;
}

EvaluationGrid DefaultGrid(int n) {
  std::vector<double> pts(static_cast<std::size_t>(std::max(n, 0)));
  for (int j = 0; j < n; ++j) pts[j] = j + 1.0;
  return EvaluationGrid::Create(std::move(pts));
}

double VandermondeCondition(const EvaluationGrid& grid, int count) {
  if (count < 1 || count > grid.size()) {
    throw ParameterError("1<=count<=N", "invalid Vandermonde size");
  }
  Eigen::MatrixXd v(count, count);
  for (int r = 0; r < count; ++r) {
    double p = 1.0;
    for (int c = 0; c < count; ++c) {
      v(r, c) = p;
      p *= grid.points[r];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

ShareTable ShareTable::StripInputs() const {
  ShareTable copy = *this;
  copy.inputs.reset();
  return copy;
}

ShareCoefficients NodeShareCoefficients(const ScalingSchedule& schedule,
                                        double x, int t) {
  ShareCoefficients c;
  if (t >= 2) {
    const double z2 = schedule.zeta2.value_or(0.0);
    double xp = 1.0;
    for (int k = 1; k <= t - 1; ++k) {
      xp *= x;
      c.s_coef.push_back(z2 * xp);
    }
  }
  c.r_coef = schedule.zeta1 * std::pow(x, t);
  return c;
}

ShareTable EncodeWithNoise(const SchemeParams& params,
                           const ScalingSchedule& schedule,
                           const EvaluationGrid& grid,
                           std::span<const double> inputs,
                           std::span<const double> noise_r,
                           std::span<const double> noise_s) {
  params.RequireSupported();
  const int m = params.M;
  const int t = params.T;
  if (grid.size() != params.N) {
    throw ParameterError("grid-size==N", "grid must have exactly N points");
  }
  if (static_cast<int>(inputs.size()) != m ||
      static_cast<int>(noise_r.size()) != m ||
      static_cast<int>(noise_s.size()) != m * (t - 1)) {
    throw ParameterError("shape", "inputs/noise sizes do not match M and T");
  }
  for (double a : inputs) {
    if (!std::isfinite(a)) {
      throw ParameterError("inputs-finite", "inputs must be finite");
    }
  }
  if (t >= 2 && !schedule.zeta2) {
    throw ParameterError("zeta2-present", "T >= 2 requires a zeta2 schedule");
  }

  ShareTable table;
  table.N = params.N;
  table.M = m;
  table.T = t;
  table.noise_r.assign(noise_r.begin(), noise_r.end());
  table.noise_s.assign(noise_s.begin(), noise_s.end());
  table.inputs = std::vector<double>(inputs.begin(), inputs.end());
  table.shares.resize(static_cast<std::size_t>(params.N) * m);
  for (int j = 0; j < params.N; ++j) {
    const ShareCoefficients coef =
        NodeShareCoefficients(schedule, grid.points[j], t);
    for (int i = 0; i < m; ++i) {
      const double* s = t >= 2 ? &noise_s[static_cast<std::size_t>(i) * (t - 1)]
                               : nullptr;
      table.shares[static_cast<std::size_t>(j) * m + i] =
          EvaluateShare(inputs[i], noise_r[i], s, coef);
    }
  }
  return table;
}

ShareTable Encode(const SchemeParams& params,
                  const NoiseCalibration& calibration,
                  const ScalingSchedule& schedule, const EvaluationGrid& grid,
                  std::span<const double> inputs, Rng& rng) {
  params.RequireSupported();
  const StaircaseSpec spec = calibration.spec();
  std::vector<double> r(params.M);
  std::vector<double> s(static_cast<std::size_t>(params.M) * (params.T - 1));
  for (int i = 0; i < params.M; ++i) {
    r[i] = StaircaseSample(spec, rng);
    for (int k = 0; k < params.T - 1; ++k) {
      s[static_cast<std::size_t>(i) * (params.T - 1) + k] =
          LaplaceUnitSample(rng);
    }
  }
  return EncodeWithNoise(params, schedule, grid, inputs, r, s);
}

std::vector<double> NodeProducts(const ShareTable& table) {
  std::vector<double> out(table.N, 1.0);
  for (int j = 0; j < table.N; ++j) {
    double v = 1.0;
    for (int i = 0; i < table.M; ++i) v *= table.share(j, i);
    out[j] = v;
  }
  return out;
}

}  // namespace dpmul
