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

#include "dpmul/product_decoder.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/binomial.hpp>

#include "dpmul/errors.hpp"
#include "dpmul/theory_bounds.hpp"

namespace dpmul {
namespace {

Eigen::MatrixXd Vandermonde(std::span<const double> points) {
  const Eigen::Index r = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd v(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      v(i, j) = p;
      p *= points[i];
    }
  }
  return v;
}

double Binom(int n, int k) {
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                   static_cast<unsigned>(k));
}

// C_{k,u} = (-1)^u alpha^{u-M} binom(M-u, k-u), u <= k.
double TriangularEntry(int m, int k, int u, double alpha) {
  const double sign = (u % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(alpha, u - m) * Binom(m - u, k - u);
}

void RequireAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("0<alpha<1",
                         "alpha must lie in (0,1), got " + std::to_string(alpha));
  }
}

void RequireOutputs(const SchemeParams& params, std::span<const double> y,
                    const EvaluationGrid& grid) {
  if (static_cast<int>(y.size()) < params.DecodeEvaluations() ||
      grid.size() < params.DecodeEvaluations()) {
    throw ParameterError("outputs>=evaluations",
                         "need " + std::to_string(params.DecodeEvaluations()) +
                             " node outputs and grid points");
  }
}

}  // namespace

CoefficientSet VandermondeSolve(std::span<const double> points,
                                std::span<const double> values) {
  if (points.size() != values.size() || points.empty()) {
    throw ParameterError("|points|==|values|>0", "mismatched Vandermonde data");
  }
  // Duplicate check lives in the grid factory.
  EvaluationGrid::Create(std::vector<double>(points.begin(), points.end()));
  const Eigen::MatrixXd v = Vandermonde(points);
  const Eigen::Map<const Eigen::VectorXd> rhs(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
  const Eigen::VectorXd c = v.fullPivLu().solve(rhs);

  CoefficientSet out;
  out.r = static_cast<int>(points.size());
  out.c.assign(c.data(), c.data() + c.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  out.condition = sv(0) / sv(sv.size() - 1);
  out.ill_conditioned = !(out.condition < kIllConditioned);
  return out;
}

MmseAlpha ComputeMmseAlpha(double eta, double sigma_sq) {
  if (!(eta >= 0.0)) throw ParameterError("eta>=0", "eta must be non-negative");
  if (!(sigma_sq > 0.0)) {
    throw ParameterError("sigma_sq>0", "noise variance must be positive");
  }
  return {eta / (eta + sigma_sq), eta * sigma_sq / (eta + sigma_sq)};
}

std::vector<double> ExtractSymmetricSums(const SchemeParams& params,
                                         const ScalingSchedule& schedule,
                                         std::span<const double> node_outputs,
                                         const EvaluationGrid& grid) {
  if (params.regime != Regime::kOptimal) {
    throw UsageError("regime==optimal",
                     "symmetric-sum extraction needs the optimal regime, got " +
                         RegimeName(params.regime));
  }
  RequireOutputs(params, node_outputs, grid);
  const int r = params.DecodeEvaluations();
  const CoefficientSet cs =
      VandermondeSolve(std::span(grid.points).first(r), node_outputs.first(r));
  std::vector<double> out(params.M);
  double scale = 1.0;
  for (int l = 0; l < params.M; ++l) {
    out[l] = cs.c[static_cast<std::size_t>(l) * params.T] / scale;
    scale *= schedule.zeta1;
  }
  return out;
}

std::vector<double> DkFromCk(std::span<const double> c, double alpha) {
  RequireAlpha(alpha);
  const int m = static_cast<int>(c.size());
  std::vector<double> d(m);
  for (int k = 0; k < m; ++k) {
    double acc = c[k];
    for (int u = 0; u < k; ++u) acc -= TriangularEntry(m, k, u, alpha) * d[u];
    d[k] = acc / TriangularEntry(m, k, k, alpha);
  }
  return d;
}

std::vector<double> CkFromDk(std::span<const double> d, double alpha) {
  RequireAlpha(alpha);
  const int m = static_cast<int>(d.size());
  std::vector<double> c(m, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int u = 0; u <= k; ++u) c[k] += TriangularEntry(m, k, u, alpha) * d[u];
  }
  return c;
}

double FinalEstimate(std::span<const double> d, int m) {
  if (static_cast<int>(d.size()) != m) {
    throw ParameterError("|D|==M", "D must have M entries");
  }
  double s = 0.0;
  for (int k = 0; k < m; ++k) s += (k % 2 == 0) ? d[k] : -d[k];
  return (m % 2 == 1) ? s : -s;
}

DecodedEstimate DecodeOptimalRegime(const SchemeParams& params,
                                    const NoiseCalibration& calibration,
                                    const ScalingSchedule& schedule,
                                    std::span<const double> node_outputs,
                                    const EvaluationGrid& grid) {
  DecodedEstimate out;
  out.C = ExtractSymmetricSums(params, schedule, node_outputs, grid);
  out.alpha = ComputeMmseAlpha(params.eta, calibration.sigma_sq).alpha;
  out.D = DkFromCk(out.C, out.alpha);
  out.estimate = FinalEstimate(out.D, params.M);
  return out;
}

DecodedEstimate DecodeMinimalRegime(const SchemeParams& params,
                                    const NoiseCalibration& calibration,
                                    const ScalingSchedule& schedule,
                                    std::span<const double> node_outputs,
                                    const EvaluationGrid& grid) {
  if (params.regime != Regime::kMinimal) {
    throw UsageError("regime==minimal",
                     "minimal decoder called in regime " +
                         RegimeName(params.regime));
  }
  RequireOutputs(params, node_outputs, grid);
  const int r = params.T + 1;
  const CoefficientSet cs =
      VandermondeSolve(std::span(grid.points).first(r), node_outputs.first(r));
  const double c0 = cs.c[0];
  const double ct = cs.c[params.T];

  const double eta = params.eta;
  const double s2 = calibration.sigma_sq;
  const double z = schedule.zeta1;
  const int m = params.M;
  Eigen::Matrix2d cov;
  cov(0, 0) = std::pow(eta + s2, m);
  cov(0, 1) = cov(1, 0) = std::pow(eta + (1.0 + z) * s2, m);
  cov(1, 1) = std::pow(eta + (1.0 + z) * (1.0 + z) * s2, m);
  const Eigen::Vector2d cross = Eigen::Vector2d::Constant(std::pow(eta, m));
  const LmmseResult lm = LmmseWeights(cov, cross, std::pow(eta, m));

  DecodedEstimate out;
  out.alpha = ComputeMmseAlpha(eta, s2).alpha;
  out.C = {c0, ct / z};
  out.observations = {c0, c0 + ct};
  out.weights = {lm.weights(0), lm.weights(1)};
  out.estimate = lm.weights(0) * c0 + lm.weights(1) * (c0 + ct);
  return out;
}

DecodedEstimate Decode(const SchemeParams& params,
                       const NoiseCalibration& calibration,
                       const ScalingSchedule& schedule,
                       std::span<const double> node_outputs,
                       const EvaluationGrid& grid) {
  params.RequireSupported();
  if (params.regime == Regime::kOptimal) {
    return DecodeOptimalRegime(params, calibration, schedule, node_outputs,
                               grid);
  }
  return DecodeMinimalRegime(params, calibration, schedule, node_outputs, grid);
}

double LinearDecoder::Apply(std::span<const double> node_outputs) const {
  double acc = 0.0;
  const std::size_t n = std::min(weights.size(), node_outputs.size());
  for (std::size_t j = 0; j < n; ++j) acc += weights[j] * node_outputs[j];
  return acc;
}

LinearDecoder MakeDecoder(const SchemeParams& params,
                          const NoiseCalibration& calibration,
                          const ScalingSchedule& schedule,
                          const EvaluationGrid& grid) {
  params.RequireSupported();
  LinearDecoder dec;
  dec.regime = params.regime;
  dec.weights.assign(params.N, 0.0);
  std::vector<double> unit(params.N, 0.0);
  for (int j = 0; j < params.DecodeEvaluations(); ++j) {
    unit[j] = 1.0;
    dec.weights[j] =
        Decode(params, calibration, schedule, unit, grid).estimate;
    unit[j] = 0.0;
  }
  return dec;
}

}  // namespace dpmul
