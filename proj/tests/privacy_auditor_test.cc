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

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dpmul/errors.hpp"
#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/rng.hpp"
#include "dpmul/scheme_encoder.hpp"
#include "gtest/gtest.h"

namespace dpmul {
namespace {

TEST(ColluderViewTest, TwoPointMatrix) {
  const ColluderView v = BuildColluderView(DefaultGrid(5), {0, 1}, 2);
  Eigen::Matrix2d expected;
  expected << 1, 1, 4, 2;
  EXPECT_NEAR((v.Gbar - expected).norm(), 0.0, 0.0);
  EXPECT_NEAR(v.Gbar.determinant(), -2.0, 1e-14);
  EXPECT_NEAR(v.gprime_dot_one(0), -0.5, 1e-14);
  EXPECT_NEAR(v.gprime_dot_one(1), 1.5, 1e-14);
}

TEST(ColluderViewTest, ClosedFormForTwoColluders) {
  const EvaluationGrid grid = DefaultGrid(5);
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      const ColluderView v = BuildColluderView(grid, {a, b}, 2);
      const double x1 = grid.points[a], x2 = grid.points[b];
      EXPECT_NEAR(v.gprime_dot_one(0), -1.0 / (x1 * x2), 1e-13);
      EXPECT_NEAR(v.gprime_dot_one(1), (x1 + x2) / (x1 * x2), 1e-13);
    }
  }
}

TEST(ColluderViewTest, Rejections) {
  EXPECT_THROW(BuildColluderView(DefaultGrid(3), {0}, 1), UsageError);
  EXPECT_THROW(BuildColluderView(DefaultGrid(3), {0, 1, 2}, 2), ParameterError);
  EXPECT_THROW(BuildColluderView(DefaultGrid(3), {0, 7}, 2), ParameterError);
  const EvaluationGrid with_zero = EvaluationGrid::Create({0.0, 1.0, 2.0});
  EXPECT_THROW(BuildColluderView(with_zero, {0, 1}, 2), ParameterError);
}

TEST(DecomposeViewTest, RoundTripsObservations) {
  const EvaluationGrid grid = DefaultGrid(5);
  const double zeta1 = 1.0 / 64, zeta2 = 1.0 / 16;
  for (int t : {2, 3}) {
    std::vector<int> subset;
    for (int j = 0; j < t; ++j) subset.push_back(j + 1);
    const ColluderView v = BuildColluderView(grid, subset, t);
    const ViewDecomposition d = DecomposeView(v, zeta1, zeta2);
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const double a = rng.Sign();
      const double r = rng.StandardNormal();
      std::vector<double> s(t - 1);
      for (double& x : s) x = LaplaceUnitSample(rng);
      Eigen::VectorXd z(t);
      for (int j = 0; j < t; ++j) {
        const double x = v.points[j];
        double val = a + r + zeta1 * r * std::pow(x, t);
        for (int k = 1; k < t; ++k) val += zeta2 * s[k - 1] * std::pow(x, k);
        z(j) = val;
      }
      const Eigen::VectorXd zp = d.P_inv * z;
      EXPECT_NEAR(zp(0), a + d.r_multiplier * r, 1e-10);
      for (int k = 1; k < t; ++k) {
        EXPECT_NEAR(zp(k), a + d.laplace_coef[k - 1] * s[k - 1], 1e-9);
      }
      EXPECT_NEAR((d.P * zp - z).norm(), 0.0, 1e-9);
    }
  }
}

TEST(DecomposeViewTest, LimitsAsNGrows) {
  const EvaluationGrid grid = DefaultGrid(5);
  const ColluderView v = BuildColluderView(grid, {3, 4}, 2);
  double prev_coef = 0.0;
  for (int n = 16; n <= 1 << 14; n *= 4) {
    const ScalingSchedule s = MakeSchedule(n, 2);
    const ViewDecomposition d = DecomposeView(v, s.zeta1, *s.zeta2);
    EXPECT_NEAR(d.r_multiplier, 1.0, 25.0 * s.zeta1);
    EXPECT_GT(std::fabs(d.laplace_coef[0]), prev_coef);
    prev_coef = std::fabs(d.laplace_coef[0]);
  }
}

TEST(DecomposeViewTest, PureNoiseCoordinate) {
  // u2 = (x1 + x2)/(x1 x2) vanishes for symmetric points.
  const EvaluationGrid grid = EvaluationGrid::Create({-1.0, 1.0, 2.0});
  const ColluderView v = BuildColluderView(grid, {0, 1}, 2);
  const ViewDecomposition d = DecomposeView(v, 0.01, 0.1);
  ASSERT_EQ(d.pure_noise.size(), 1u);
  EXPECT_TRUE(d.pure_noise[0]);
  EXPECT_EQ(d.laplace_coef[0], 0.0);
}

TEST(DecomposeViewTest, Rejections) {
  const ColluderView v = BuildColluderView(DefaultGrid(3), {0, 1}, 2);
  EXPECT_THROW(DecomposeView(v, 0.0, 0.1), ParameterError);
  EXPECT_THROW(DecomposeView(v, 0.1, -1.0), ParameterError);
}

TEST(BudgetAccountTest, WorstLaplaceTerm) {
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const ColluderView v = BuildColluderView(DefaultGrid(5), {3, 4}, 2);
  for (int n : {1024, 1 << 16}) {
    const ScalingSchedule s = MakeSchedule(n, 2);
    const BudgetReport r =
        BudgetAccount(v, s.zeta1, *s.zeta2, DefaultEpsBarBar(cal), cal);
    ASSERT_EQ(r.laplace_terms.size(), 1u);
    const double expected =
        std::sqrt(2.0) * s.zeta1 * 0.45 / (*s.zeta2 * std::fabs(-0.05 + s.zeta1));
    EXPECT_NEAR(r.laplace_terms[0], expected, 1e-12 * expected);
    EXPECT_NEAR(r.laplace_terms[0] * std::sqrt(n), 9.0 * std::sqrt(2.0),
                9.0 * std::sqrt(2.0) * 40.0 * s.zeta1);
    EXPECT_NEAR(r.eps_total, DefaultEpsBarBar(cal) + r.laplace_terms[0], 1e-15);
  }
}

TEST(BudgetAccountTest, DefaultMidpoint) {
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  EXPECT_NEAR(DefaultEpsBarBar(cal), 0.995, 1e-15);
  EXPECT_GT(DefaultEpsBarBar(cal), cal.eps_bar);
  EXPECT_LT(DefaultEpsBarBar(cal), cal.target_epsilon);
}

TEST(WorstSubsetTest, MonotoneInN) {
  const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 16; n <= 1024; n *= 2) {
    const BudgetReport r = WorstSubsetBudget(p, DefaultGrid(5), cal, n);
    EXPECT_LT(r.eps_total, prev) << n;
    prev = r.eps_total;
  }
  EXPECT_GT(prev, 1.0);
}

TEST(WorstSubsetTest, ZeroMultiplierLeaksInput) {
  // Subset {2, 4} has u1 = -1/8 = -zeta1 at n = 4.
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const ColluderView v = BuildColluderView(DefaultGrid(5), {1, 3}, 2);
  const ScalingSchedule s = MakeSchedule(4, 2);
  ASSERT_DOUBLE_EQ(s.zeta1, 0.125);
  const BudgetReport r = BudgetAccount(v, s.zeta1, *s.zeta2, 0.995, cal);
  EXPECT_EQ(r.z1_multiplier, 0.0);
  EXPECT_TRUE(std::isinf(r.z1_exact_eps));
  EXPECT_FALSE(r.within_target);
}

TEST(ThresholdTest, TwoColludersAtUnitEpsilon) {
  const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const ThresholdReport t = FindBudgetThreshold(p, DefaultGrid(5), cal);
  ASSERT_TRUE(t.n0.has_value());
  EXPECT_EQ(*t.n0, 6480001);
  EXPECT_TRUE(t.at_n0.within_target);
  EXPECT_FALSE(WorstSubsetBudget(p, DefaultGrid(5), cal, *t.n0 - 1).within_target);
}

TEST(ThresholdTest, ScalarPathMeetsTargetImmediately) {
  const SchemeParams p = SchemeParams::Create(3, 2, 1, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const ThresholdReport t = FindBudgetThreshold(p, DefaultGrid(2), cal);
  ASSERT_TRUE(t.n0.has_value());
  EXPECT_EQ(*t.n0, 2);
  EXPECT_TRUE(t.at_n0.laplace_terms.empty());
}

TEST(ThresholdTest, UnreachableWithinCap) {
  const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const ThresholdReport t =
      FindBudgetThreshold(p, DefaultGrid(5), cal, std::nullopt, std::nullopt, 4096);
  EXPECT_FALSE(t.n0.has_value());
}

TEST(AuditScaledStaircaseTest, UnitMultiplierIsEpsilon) {
  const StaircaseSpec spec = StaircaseSpec::Create(1.0, OptimalGamma(1.0));
  EXPECT_NEAR(AuditScaledStaircase(spec, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(AuditScaledStaircase(spec, -1.0), 1.0, 1e-9);
}

TEST(AuditScaledStaircaseTest, LargeMultiplierStillHitsFullStep) {
  // A sub-step shift can still straddle a step edge.
  const StaircaseSpec spec = StaircaseSpec::Create(0.99, OptimalGamma(0.99));
  for (double c : {1.001, 1.1, 3.0}) {
    EXPECT_NEAR(AuditScaledStaircase(spec, c), 0.99, 1e-9) << c;
  }
}

TEST(AuditScaledStaircaseTest, SmallMultiplierSpansSeveralSteps) {
  const StaircaseSpec spec = StaircaseSpec::Create(1.0, OptimalGamma(1.0));
  EXPECT_NEAR(AuditScaledStaircase(spec, 0.5), 2.0, 1e-9);
  EXPECT_NEAR(AuditScaledStaircase(spec, 0.3), 4.0, 1e-9);
  EXPECT_TRUE(std::isinf(AuditScaledStaircase(spec, 0.0)));
  EXPECT_THROW(AuditScaledStaircase(spec, std::nan("")), ParameterError);
}

TEST(AuditMarginalTest, ScalarSchemeTracksCalibratedEpsilon) {
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  for (int n = 16; n <= 1024; n *= 2) {
    for (double x : {1.0, 2.0}) {
      const double e = AuditMarginal(cal, 1.0 / n, x);
      EXPECT_NEAR(e, cal.eps_bar, 1e-9);
      EXPECT_LE(e, cal.target_epsilon);
    }
  }
  EXPECT_THROW(AuditMarginal(cal, -0.1, 1.0), ParameterError);
}

TEST(HistogramAuditTest, AgreesWithExactWithinNoise) {
  const StaircaseSpec spec = StaircaseSpec::Create(1.0, OptimalGamma(1.0));
  const double h = HistogramAudit(spec, 1.0, 2000000, 5, 100);
  EXPECT_LE(h, 1.0 + 0.15);
  EXPECT_GT(h, 0.8);
  EXPECT_THROW(HistogramAudit(spec, 1.0, 10, 5), ParameterError);
}

}  // namespace
}  // namespace dpmul
