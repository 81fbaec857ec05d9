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

#include "dpmul/privacy_auditor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpmul/errors.hpp"

namespace dpmul {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Number of geometric steps below the peak at |x|.
double Steps(double x, double gamma) {
  const double ax = std::fabs(x);
  const double k = std::floor(ax);
  return (ax - k) < gamma ? k : k + 1.0;
}

std::vector<double> Linspace(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = lo + (hi - lo) * i / (count - 1);
  }
  return v;
}

}  // namespace

ColluderView BuildColluderView(const EvaluationGrid& grid,
                               const std::vector<int>& subset, int t) {
  if (t < 2) {
    throw UsageError("T>=2", "T = 1 has no colluder matrix; use the scalar path");
  }
  if (static_cast<int>(subset.size()) != t) {
    throw ParameterError("|subset|==T", "subset must hold exactly T nodes");
  }
  ColluderView v;
  v.subset = subset;
  v.Gbar.resize(t, t);
  for (int j = 0; j < t; ++j) {
    const int idx = subset[j];
    if (idx < 0 || idx >= grid.size()) {
      throw ParameterError("subset-in-range", "subset index out of range");
    }
    const double x = grid.points[idx];
    v.points.push_back(x);
    v.Gbar(j, 0) = std::pow(x, t);
    double p = 1.0;
    for (int k = 1; k < t; ++k) {
      p *= x;
      v.Gbar(j, k) = p;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v.Gbar);
  if (!lu.isInvertible()) {
    throw ParameterError("Gbar-invertible",
                         "colluder matrix is singular (repeated or zero point)");
  }
  v.Gbar_inv = lu.inverse();
  v.gprime_dot_one = v.Gbar_inv * Eigen::VectorXd::Ones(t);
  return v;
}

ViewDecomposition DecomposeView(const ColluderView& view, double zeta1,
                                double zeta2) {
  if (!(zeta1 > 0.0 && zeta2 > 0.0)) {
    throw ParameterError("zeta>0", "scaling factors must be positive");
  }
  const int t = static_cast<int>(view.gprime_dot_one.size());
  const Eigen::VectorXd& u = view.gprime_dot_one;
  const double u1 = u(0);
  if (u1 == 0.0) {
    throw NumericError("g1'1!=0", "first colluder coefficient vanished");
  }
  // Q maps Gbar^{-1} Z = (A+R) u + (zeta1 R, zeta2 S) to Z'.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(t, t);
  q(0, 0) = 1.0 / u1;
  ViewDecomposition d;
  d.r_multiplier = 1.0 + zeta1 / u1;
  for (int j = 1; j < t; ++j) {
    if (u(j) == 0.0) {
      q(j, j) = 1.0 / zeta2;
      d.laplace_coef.push_back(0.0);
      d.pure_noise.push_back(true);
      continue;
    }
    const double scale = (u1 + zeta1) / (u(j) * zeta1);
    q(j, j) = scale;
    q(j, 0) = -scale * u(j) / (u1 + zeta1);
    d.laplace_coef.push_back(zeta2 * (u1 + zeta1) / (zeta1 * u(j)));
    d.pure_noise.push_back(false);
  }
  d.P_inv = q * view.Gbar_inv;
  d.P = d.P_inv.fullPivLu().inverse();
  return d;
}

double DefaultEpsBarBar(const NoiseCalibration& calibration) {
  return 0.5 * (calibration.eps_bar + calibration.target_epsilon);
}

BudgetReport BudgetAccount(const ColluderView& view, double zeta1,
                           double zeta2, double eps_bar_bar,
                           const NoiseCalibration& calibration) {
  const ViewDecomposition d = DecomposeView(view, zeta1, zeta2);
  BudgetReport r;
  r.eps_bar_bar = eps_bar_bar;
  r.target = calibration.target_epsilon;
  r.eps_total = eps_bar_bar;
  const Eigen::VectorXd& u = view.gprime_dot_one;
  for (std::size_t j = 0; j < d.laplace_coef.size(); ++j) {
    // Unit-variance Laplace has scale 1/sqrt2; sensitivity 1 over |coef|.
    // u1 + zeta1 == 0 gives an infinite term, matching Z'_1 = A.
    const double term =
        d.pure_noise[j]
            ? 0.0
            : kSqrt2 * zeta1 * std::fabs(u(j + 1)) /
                  (zeta2 * std::fabs(u(0) + zeta1));
    r.laplace_terms.push_back(term);
    r.eps_total += term;
  }
  r.within_target = r.eps_total <= r.target;
  r.z1_multiplier = d.r_multiplier;
  r.z1_exact_eps = AuditScaledStaircase(calibration.spec(), d.r_multiplier);
  return r;
}

BudgetReport BudgetAccountScalar(double grid_point, double zeta1,
                                 double eps_bar_bar,
                                 const NoiseCalibration& calibration) {
  BudgetReport r;
  r.eps_bar_bar = eps_bar_bar;
  r.target = calibration.target_epsilon;
  r.eps_total = eps_bar_bar;
  r.within_target = r.eps_total <= r.target;
  r.z1_multiplier = 1.0 + zeta1 * grid_point;
  r.z1_exact_eps = AuditScaledStaircase(calibration.spec(), r.z1_multiplier);
  return r;
}

double AuditScaledStaircase(const StaircaseSpec& spec, double multiplier) {
  if (!std::isfinite(multiplier)) {
    throw ParameterError("multiplier-finite", "noise multiplier must be finite");
  }
  // R cancels completely: the coordinate reveals A.
  if (multiplier == 0.0) return std::numeric_limits<double>::infinity();
  const double shift = 1.0 / std::fabs(multiplier);
  const double g = spec.gamma();
  const int reach = static_cast<int>(std::ceil(shift)) + 3;

  std::vector<double> xs = Linspace(-(reach + 1.0), reach + 1.0, 4001);
  constexpr double kTiny = 1e-9;
  for (int k = 0; k <= reach; ++k) {
    for (double p : {k + g, -(k + g)}) {
      for (double base : {p, p - shift, p + shift}) {
        xs.push_back(base - kTiny);
        xs.push_back(base + kTiny);
      }
    }
  }
  std::vector<double> ts = Linspace(-shift, shift, 201);

  double best = 0.0;
  for (double x : xs) {
    const double sx = Steps(x, g);
    for (double t : ts) {
      best = std::max(best, (Steps(x + t, g) - sx) * spec.epsilon());
    }
  }
  return best;
}

double AuditMarginal(const NoiseCalibration& calibration, double zeta1,
                     double grid_point, int t) {
  if (!(zeta1 >= 0.0)) throw ParameterError("zeta1>=0", "zeta1 must be >= 0");
  return AuditScaledStaircase(calibration.spec(),
                              1.0 + zeta1 * std::pow(grid_point, t));
}

double HistogramAudit(const StaircaseSpec& spec, double multiplier,
                      std::int64_t samples, std::uint64_t seed, int bins) {
  if (samples < 1000 || bins < 10) {
    throw ParameterError("samples>=1000", "histogram audit needs more data");
  }
  const double c = std::fabs(multiplier);
  const double half_width = 2.0 + 3.0 * c / spec.epsilon();
  const double w = 2.0 * half_width / bins;
  std::vector<std::int64_t> h0(bins, 0), h1(bins, 0);
  Rng rng(seed);
  auto bin_of = [&](double y) {
    return static_cast<int>(std::floor((y + half_width) / w));
  };
  for (std::int64_t i = 0; i < samples; ++i) {
    const int b0 = bin_of(c * StaircaseSample(spec, rng));
    const int b1 = bin_of(1.0 + c * StaircaseSample(spec, rng));
    if (b0 >= 0 && b0 < bins) ++h0[b0];
    if (b1 >= 0 && b1 < bins) ++h1[b1];
  }
  // Only well-populated bins; the estimate is noisy by design.
  const std::int64_t floor_count = std::max<std::int64_t>(200, samples / 5000);
  double best = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (h0[b] < floor_count || h1[b] < floor_count) continue;
    best = std::max(best, std::fabs(std::log(static_cast<double>(h0[b]) /
                                             static_cast<double>(h1[b]))));
  }
  return best;
}

BudgetReport WorstSubsetBudget(const SchemeParams& params,
                               const EvaluationGrid& grid,
                               const NoiseCalibration& calibration, int n,
                               std::optional<double> beta1,
                               std::optional<double> eps_bar_bar) {
  const ScalingSchedule s = MakeSchedule(n, params.T, beta1);
  const double ebb = eps_bar_bar.value_or(DefaultEpsBarBar(calibration));
  const int count = std::min(grid.size(), params.N);
  std::optional<BudgetReport> worst;
  auto consider = [&](BudgetReport r) {
    if (!worst || r.eps_total > worst->eps_total ||
        (r.eps_total == worst->eps_total &&
         r.z1_exact_eps > worst->z1_exact_eps)) {
      worst = std::move(r);
    }
  };
  if (params.T == 1) {
    for (int j = 0; j < count; ++j) {
      consider(BudgetAccountScalar(grid.points[j], s.zeta1, ebb, calibration));
    }
    return *worst;
  }
  std::vector<bool> mask(count, false);
  std::fill(mask.begin(), mask.begin() + params.T, true);
  do {
    std::vector<int> subset;
    for (int j = 0; j < count; ++j) {
      if (mask[j]) subset.push_back(j);
    }
    const ColluderView view = BuildColluderView(grid, subset, params.T);
    consider(BudgetAccount(view, s.zeta1, *s.zeta2, ebb, calibration));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return *worst;
}

ThresholdReport FindBudgetThreshold(const SchemeParams& params,
                                    const EvaluationGrid& grid,
                                    const NoiseCalibration& calibration,
                                    std::optional<double> beta1,
                                    std::optional<double> eps_bar_bar,
                                    int max_n) {
  auto ok = [&](int n) {
    return WorstSubsetBudget(params, grid, calibration, n, beta1, eps_bar_bar)
        .within_target;
  };
  ThresholdReport out;
  int lo = 2;
  if (ok(lo)) {
    out.n0 = lo;
  } else {
    long long hi = 4;
    while (hi <= max_n && !ok(static_cast<int>(hi))) {
      lo = static_cast<int>(hi);
      hi *= 2;
    }
    if (hi > max_n) return out;
    int h = static_cast<int>(hi);
    while (h - lo > 1) {
      const int mid = lo + (h - lo) / 2;
      if (ok(mid)) {
        h = mid;
      } else {
        lo = mid;
      }
    }
    out.n0 = h;
  }
  out.at_n0 =
      WorstSubsetBudget(params, grid, calibration, *out.n0, beta1, eps_bar_bar);
  return out;
}

}  // namespace dpmul
