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

#include "dpmul/theory_bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpmul/errors.hpp"
#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/scheme_encoder.hpp"

namespace dpmul {
namespace {

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void CheckMinimal(int m, int t) {
  if (t < 1 || t + 1 >= m) {
    throw UsageError("N=T+1<M", "minimal-regime bound needs T >= 1 and T+1 < M, got M=" +
                                     std::to_string(m) + " T=" + std::to_string(t));
  }
}

// sum_{k=0}^{M-2} C(M,k) s^k / (1+s)^M, every term non-negative.
double UpperFraction(double s, int m) {
  const double log1ps = std::log1p(s);
  double total = std::exp(-m * log1ps);
  if (s > 0.0) {
    const double logs = std::log(s);
    for (int k = 1; k <= m - 2; ++k) {
      total += std::exp(LogBinomial(m, k) + k * logs - m * log1ps);
    }
  }
  return total;
}

// 1 - (s/(1+s))^p for p >= 1.
double OneMinusQPow(double s, int p) {
  if (s <= 0.0) return 1.0;
  const double logq = std::log(s) - std::log1p(s);
  return -std::expm1(p * logq);
}

double EtaPow(double eta, int m) { return std::pow(eta, m); }

}  // namespace

double SnrStar(double epsilon, double eta) {
  if (!(eta >= 0.0)) throw ParameterError("eta>=0", "eta must be non-negative");
  return eta / OptimalVariance(epsilon);
}

double LmseOptimal(double epsilon, double eta, int m) {
  if (m < 1) throw ParameterError("M>=1", "M must be positive");
  const double s = SnrStar(epsilon, eta);
  return EtaPow(eta, m) * std::exp(-m * std::log1p(s));
}

double LmseMinimalUpper(double epsilon, double eta, int m, int t) {
  CheckMinimal(m, t);
  return EtaPow(eta, m) * UpperFraction(SnrStar(epsilon, eta), m);
}

double LmseMinimalLower(double epsilon, double eta, int m, int t) {
  CheckMinimal(m, t);
  const double s = SnrStar(epsilon, eta);
  return EtaPow(eta, m) * std::exp(-t * std::log1p(s)) * OneMinusQPow(s, m - t);
}

double SnrPrime(double snr, int m, int t) {
  CheckMinimal(m, t);
  if (snr <= 0.0) return 0.0;
  const double qp = std::exp((m - t) * (std::log(snr) - std::log1p(snr)));
  return qp / OneMinusQPow(snr, m - t);
}

double GapOfSnr(double snr, int m, int t) {
  CheckMinimal(m, t);
  if (!(snr >= 0.0)) throw ParameterError("snr>=0", "SNR must be non-negative");
  return UpperFraction(snr, m) * std::exp(t * std::log1p(snr)) /
         OneMinusQPow(snr, m - t);
}

double Gap(double epsilon, double eta, int m, int t) {
  return GapOfSnr(SnrStar(epsilon, eta), m, t);
}

LmmseResult LmmseWeights(const Eigen::MatrixXd& cov_obs,
                         const Eigen::VectorXd& cross, double target_var,
                         const std::optional<Eigen::MatrixXd>& noise_cov) {
  const Eigen::Index m = cov_obs.rows();
  if (cov_obs.cols() != m || cross.size() != m || m == 0) {
    throw ParameterError("dims", "LMMSE dimensions are inconsistent");
  }
  if (noise_cov && (noise_cov->rows() != m || noise_cov->cols() != m)) {
    throw ParameterError("dims", "noise covariance has wrong shape");
  }
  LmmseResult out;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_obs);
  // LDLT pseudo-inverts zero pivots, so rcond alone misses exact rank loss.
  const Eigen::VectorXd piv = ldlt.vectorD().cwiseAbs();
  const bool usable = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                      piv.minCoeff() > 1e-14 * piv.maxCoeff() &&
                      ldlt.rcond() > 1e-14;
  if (usable) {
    out.weights = ldlt.solve(cross);
  } else {
    out.singular = true;
    out.weights = cov_obs.completeOrthogonalDecomposition().solve(cross);
  }
  out.lmse = target_var - cross.dot(out.weights);
  if (noise_cov) {
    out.one_plus_snr = cov_obs.determinant() / noise_cov->determinant();
  }
  return out;
}

LmmseResult BaselineIndependentDecoder(double epsilon, double eta, int m,
                                       int n) {
  if (n < 1) throw ParameterError("N>=1", "N must be positive");
  const double off = EtaPow(eta, m);
  const double diag = std::pow(eta + OptimalVariance(epsilon), m);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(n, n, off);
  cov.diagonal().setConstant(diag);
  const Eigen::VectorXd cross = Eigen::VectorXd::Constant(n, off);
  return LmmseWeights(cov, cross, off);
}

double BaselineIndependentLmse(double epsilon, double eta, int m, int n) {
  return BaselineIndependentDecoder(epsilon, eta, m, n).lmse;
}

BoundSet ComputeBounds(const SchemeParams& params) {
  BoundSet b;
  b.snr_star = SnrStar(params.epsilon, params.eta);
  b.lmse_opt = LmseOptimal(params.epsilon, params.eta, params.M);
  if (params.regime == Regime::kMinimal) {
    b.lmse_min_upper =
        LmseMinimalUpper(params.epsilon, params.eta, params.M, params.T);
    b.lmse_min_lower =
        LmseMinimalLower(params.epsilon, params.eta, params.M, params.T);
    b.gap = GapOfSnr(b.snr_star, params.M, params.T);
    b.snr_prime = SnrPrime(b.snr_star, params.M, params.T);
  }
  b.baseline_independent =
      BaselineIndependentLmse(params.epsilon, params.eta, params.M, params.N);
  return b;
}

}  // namespace dpmul
