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

// Acceptance suite: one PASS/FAIL line per criterion, diagnostics indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dpmul/errors.hpp"
#include "dpmul/mc_oracle.hpp"
#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/privacy_auditor.hpp"
#include "dpmul/product_decoder.hpp"
#include "dpmul/rng.hpp"
#include "dpmul/scheme_encoder.hpp"
#include "dpmul/theory_bounds.hpp"

namespace dpmul {
namespace {

int g_threads = 1;

struct Outcome {
  bool pass = false;
  std::string summary;
};

struct Criterion {
  std::string id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

std::string Fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void Note(const std::string& line) { std::printf("    %s\n", line.c_str()); }

struct Setup {
  SchemeParams params;
  NoiseCalibration cal;
  ScalingSchedule schedule;
  EvaluationGrid grid;
  LinearDecoder decoder;
};

Setup MakeSetup(int m, int n_nodes, int t, double eps, int n) {
  Setup s{SchemeParams::Create(m, n_nodes, t, 1.0, eps), CalibrateRNoise(eps),
          MakeSchedule(n, t), DefaultGrid(n_nodes), {}};
  s.decoder = MakeDecoder(s.params, s.cal, s.schedule, s.grid);
  return s;
}

McOptions Options(std::int64_t samples, std::uint64_t seed = 42) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  o.threads = g_threads;
  return o;
}

McResult Mc(const Setup& s, std::int64_t samples,
            InputModel inputs = InputModel{}) {
  return MonteCarloLmse(s.params, s.cal, s.schedule, s.grid, inputs, s.decoder,
                        Options(samples));
}

double Prod(const std::vector<double>& v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

Outcome StaircaseConsistency() {
  bool ok = true;
  double worst_min = 0.0, worst_var = 0.0;
  for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    // Dense scan over gamma, independent of the library's 1-D optimizer.
    double best = std::numeric_limits<double>::infinity();
    const int steps = 20000;
    for (int i = 1; i <= steps; ++i) {
      const double g = static_cast<double>(i) / steps;
      best = std::min(best, StaircaseVariance(StaircaseSpec::Create(eps, g)));
    }
    const double closed = OptimalVariance(eps);
    const double rel_min = std::fabs(best - closed) / closed;

    const StaircaseSpec spec = StaircaseSpec::Create(eps, OptimalGamma(eps));
    Rng rng(DeriveSeed(7, static_cast<std::uint64_t>(eps * 100)));
    double sum = 0.0, sum2 = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const double x = StaircaseSample(spec, rng);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / draws;
    const double var = sum2 / draws - mean * mean;
    const double rel_var = std::fabs(var - closed) / closed;
    Note("eps=" + Fmt(eps) + " closed=" + Fmt(closed) + " scan_min=" +
         Fmt(best) + " rel=" + Fmt(rel_min) + " sampler_var=" + Fmt(var) +
         " rel=" + Fmt(rel_var));
    ok = ok && rel_min <= 1e-3 && rel_var <= 1e-2;
    worst_min = std::max(worst_min, rel_min);
    worst_var = std::max(worst_var, rel_var);
  }
  return {ok, "max rel(min) " + Fmt(worst_min) + " <= 0.001, max rel(var) " +
                  Fmt(worst_var) + " <= 0.01"};
}

Outcome AlgebraicIdentities() {
  Rng rng(2024);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const StaircaseSpec spec = cal.spec();
  const double alpha = ComputeMmseAlpha(1.0, cal.sigma_sq).alpha;
  double worst_alt = 0.0, worst_rt = 0.0, worst_map = 0.0;
  for (int m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(m), r(m), z(m), c(m), d(m);
      for (int i = 0; i < m; ++i) {
        a[i] = rng.Sign();
        r[i] = StaircaseSample(spec, rng);
        z[i] = alpha * (a[i] + r[i]) - a[i];
      }
      double scale = std::fabs(Prod(a)) + std::fabs(Prod(z));
      for (int k = 0; k < m; ++k) {
        c[k] = DirectCk(a, r, k);
        d[k] = DirectDk(a, z, k);
        scale += std::fabs(d[k]);
      }
      const double sign = (m % 2 == 1) ? 1.0 : -1.0;
      worst_alt = std::max(
          worst_alt, std::fabs(FinalEstimate(d, m) - (Prod(a) + sign * Prod(z))) /
                         scale);
      const auto back = CkFromDk(DkFromCk(c, alpha), alpha);
      const auto mapped = DkFromCk(c, alpha);
      for (int k = 0; k < m; ++k) {
        worst_rt = std::max(worst_rt,
                            std::fabs(back[k] - c[k]) / (1.0 + std::fabs(c[k])));
        worst_map = std::max(
            worst_map, std::fabs(mapped[k] - d[k]) / (1.0 + std::fabs(d[k])));
      }
    }
  }
  const bool ok = worst_alt <= 1e-12 && worst_rt <= 1e-10 && worst_map <= 1e-10;
  return {ok, "alternating " + Fmt(worst_alt) + " <= 1e-12, round trip " +
                  Fmt(worst_rt) + " <= 1e-10, map " + Fmt(worst_map) +
                  " <= 1e-10"};
}

Outcome OptimalTradeoff() {
  const Setup s = MakeSetup(3, 5, 2, 2.0, 256);
  const McResult r = Mc(s, 1000000);
  const double target = LmseOptimal(2.0, 1.0, 3);
  const double rel = std::fabs(r.estimate - target) / target;
  Note("literal target 0.1041 (printed sigma* form): rel " +
       Fmt(std::fabs(r.estimate - 0.1041) / 0.1041));
  for (int n : {1024, 4096, 16384}) {
    const McResult big = Mc(MakeSetup(3, 5, 2, 2.0, n), 200000);
    Note("diagnostic n=" + std::to_string(n) + " mc=" + Fmt(big.estimate) +
         " +- " + Fmt(big.std_error) + " rel=" +
         Fmt(std::fabs(big.estimate - target) / target));
  }
  return {rel <= 0.10, "n=256 mc=" + Fmt(r.estimate) + " +- " +
                           Fmt(r.std_error) + " target=" + Fmt(target) +
                           " rel " + Fmt(rel) + " <= 0.1"};
}

Outcome ConverseFloor() {
  bool ok = true;
  std::string worst;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const Setup s = MakeSetup(3, 5, 2, eps, 256);
    const SchemeSampler sampler =
        LayeredSampler(s.params, s.cal, s.schedule, s.grid, InputModel{});
    const OptimalLinearResult fit = McOptimalLinear(sampler, Options(1000000));
    const double floor = LmseOptimal(eps, 1.0, 3);
    const double margin =
        (fit.held_out.estimate - (floor - 3.0 * fit.held_out.std_error));
    Note("eps=" + Fmt(eps) + " optimal_linear=" + Fmt(fit.held_out.estimate) +
         " +- " + Fmt(fit.held_out.std_error) + " floor=" + Fmt(floor) +
         (fit.ridge ? " (ridge)" : ""));
    ok = ok && margin >= 0.0;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst = "eps=" + Fmt(eps);
    }
  }
  return {ok, "min margin over floor-3se " + Fmt(worst_margin) + " at " + worst};
}

Outcome BaselineOrdering() {
  bool ok = true;
  double worst_ratio = 0.0;
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const McResult r = Mc(MakeSetup(3, 5, 2, eps, 256), 1000000);
    const double base = BaselineIndependentLmse(eps, 1.0, 3, 5);
    Note("eps=" + Fmt(eps) + " layered=" + Fmt(r.estimate) + " +- " +
         Fmt(r.std_error) + " baseline=" + Fmt(base));
    ok = ok && r.estimate < base;
    worst_ratio = std::max(worst_ratio, r.estimate / base);
  }
  return {ok, "max layered/baseline " + Fmt(worst_ratio) + " < 1"};
}

Outcome MinimalSandwich() {
  bool ok = true;
  std::string summary;
  for (double eps : {1.0, 2.0}) {
    const McResult r = Mc(MakeSetup(4, 2, 1, eps, 256), 1000000);
    const double lo = LmseMinimalLower(eps, 1.0, 4, 1);
    const double up = LmseMinimalUpper(eps, 1.0, 4, 1);
    const double lo_b = lo - 3.0 * r.std_error;
    const double up_b = up + 3.0 * r.std_error + 0.05 * up;
    Note("eps=" + Fmt(eps) + " mc=" + Fmt(r.estimate) + " +- " +
         Fmt(r.std_error) + " in [" + Fmt(lo_b) + ", " + Fmt(up_b) + "]");
    ok = ok && r.estimate >= lo_b && r.estimate <= up_b;
    summary += (summary.empty() ? "" : ", ") + std::string("eps=") + Fmt(eps) +
               " mc/upper=" + Fmt(r.estimate / up);
  }
  return {ok, summary};
}

double GapSecondOrder(int m, int t) {
  auto binom = [](int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  double u[3], l[3];
  for (int k = 0; k <= 2; ++k) {
    u[k] = binom(m, k) - (k == m - 1 ? m : 0) - (k == m ? 1 : 0);
    l[k] = binom(m - t, k) - (k == m - t ? 1 : 0);
  }
  const double g0 = u[0] / l[0];
  const double g1 = (u[1] - l[1] * g0) / l[0];
  return (u[2] - l[1] * g1 - l[2] * g0) / l[0];
}

Outcome GapExpansion() {
  bool ok = true;
  for (auto [m, t] : {std::pair{3, 1}, {4, 1}, {5, 1}, {5, 2}, {6, 3}}) {
    std::vector<double> cs;
    for (double s : {0.05, 0.02, 0.01}) {
      cs.push_back(std::fabs(GapOfSnr(s, m, t) - (1.0 + t * s)) / (s * s));
    }
    const double c2 = std::fabs(GapSecondOrder(m, t));
    bool stable = cs[2] <= 1.25 * cs[0];
    if (c2 > 0) stable = stable && std::fabs(cs[2] - c2) <= 0.25 * c2;
    Note("M=" + std::to_string(m) + " T=" + std::to_string(t) + " C(0.05)=" +
         Fmt(cs[0]) + " C(0.02)=" + Fmt(cs[1]) + " C(0.01)=" + Fmt(cs[2]) +
         " exact|c2|=" + Fmt(c2));
    ok = ok && stable;
  }
  return {ok, "fitted C bounded and consistent with the series coefficient"};
}

Outcome PrivacyAccounting() {
  bool ok = true;
  std::string summary;
  for (double eps : {1.0, 2.0}) {
    const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, eps);
    const NoiseCalibration cal = CalibrateRNoise(eps);
    const EvaluationGrid grid = DefaultGrid(5);
    const ThresholdReport th = FindBudgetThreshold(p, grid, cal);
    if (!th.n0) {
      Note("eps=" + Fmt(eps) + " no n0 found");
      ok = false;
      continue;
    }
    bool within = true;
    for (int mult : {1, 2, 4}) {
      const BudgetReport r = WorstSubsetBudget(p, grid, cal, *th.n0 * mult);
      within = within && r.within_target;
    }
    const BudgetReport at1024 = WorstSubsetBudget(p, grid, cal, 1024);
    Note("T=2 eps=" + Fmt(eps) + " n0=" + std::to_string(*th.n0) +
         " eps_total(n0)=" + Fmt(th.at_n0.eps_total) + " eps_total(1024)=" +
         Fmt(at1024.eps_total) + " z1_exact_eps(n0)=" +
         Fmt(th.at_n0.z1_exact_eps));

    double eps_hat = 0.0;
    const ScalingSchedule s1 = MakeSchedule(1024, 1);
    for (double x : DefaultGrid(2).points) {
      eps_hat = std::max(eps_hat, AuditMarginal(cal, s1.zeta1, x));
    }
    Note("T=1 eps=" + Fmt(eps) + " n=1024 eps_hat=" + Fmt(eps_hat));
    ok = ok && within && eps_hat <= eps;
    summary += (summary.empty() ? "" : ", ") + std::string("eps=") + Fmt(eps) +
               " n0=" + std::to_string(*th.n0) + " eps_hat=" + Fmt(eps_hat);
  }
  return {ok, summary};
}

Outcome CoefficientRecovery() {
  const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const EvaluationGrid grid = DefaultGrid(5);
  auto monotone = [&](std::uint64_t seed, bool verbose) {
    Rng rng(seed);
    std::vector<double> a(3), r(3), s(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = rng.Sign();
      r[i] = StaircaseSample(cal.spec(), rng);
      s[i] = LaplaceUnitSample(rng);
    }
    std::vector<double> prev(3, std::numeric_limits<double>::infinity());
    bool ok = true;
    for (int n : {16, 32, 64, 128}) {
      const ScalingSchedule sch = MakeSchedule(n, 2);
      const ShareTable t = EncodeWithNoise(p, sch, grid, a, r, s);
      const auto chat = ExtractSymmetricSums(p, sch, NodeProducts(t), grid);
      std::string line = "n=" + std::to_string(n);
      for (int l = 0; l < 3; ++l) {
        const double err = std::fabs(chat[l] - DirectCk(a, r, l));
        ok = ok && err < prev[l];
        prev[l] = err;
        line += " |dC" + std::to_string(l) + "|=" + Fmt(err);
      }
      if (verbose) Note(line);
    }
    return ok;
  };
  const bool ok = monotone(42, true);
  int passing = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) passing += monotone(seed, false);
  Note("diagnostic: monotone for " + std::to_string(passing) + "/100 other seeds");

  // Root-mean-square error over a fixed batch of draws, for context only.
  std::string rms_line = "diagnostic rms over 1000 draws:";
  for (int n : {16, 32, 64, 128, 1024, 8192}) {
    const ScalingSchedule sch = MakeSchedule(n, 2);
    Rng rng(42);
    std::vector<double> sq(3, 0.0);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(3), r(3), s(3);
      for (int i = 0; i < 3; ++i) {
        a[i] = rng.Sign();
        r[i] = StaircaseSample(cal.spec(), rng);
        s[i] = LaplaceUnitSample(rng);
      }
      const ShareTable t = EncodeWithNoise(p, sch, grid, a, r, s);
      const auto chat = ExtractSymmetricSums(p, sch, NodeProducts(t), grid);
      for (int l = 0; l < 3; ++l) {
        const double e = chat[l] - DirectCk(a, r, l);
        sq[l] += e * e / 1000.0;
      }
    }
    rms_line += " n=" + std::to_string(n) + "(" + Fmt(std::sqrt(sq[0])) + "," +
                Fmt(std::sqrt(sq[1])) + "," + Fmt(std::sqrt(sq[2])) + ")";
  }
  Note(rms_line);
  return {ok, std::string("seed 42 errors ") +
                  (ok ? "strictly decrease" : "do not decrease") +
                  " for every l as n doubles"};
}

Outcome DistributionInvariance() {
  const Setup s = MakeSetup(3, 5, 2, 2.0, 256);
  std::vector<McResult> rs;
  for (InputKind k :
       {InputKind::kRademacher, InputKind::kUniform, InputKind::kGaussian}) {
    rs.push_back(Mc(s, 1000000, {k, 1.0}));
    Note(InputKindName(k) + " mc=" + Fmt(rs.back().estimate) + " +- " +
         Fmt(rs.back().std_error));
  }
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double z = std::fabs(rs[i].estimate - rs[j].estimate) /
                       std::hypot(rs[i].std_error, rs[j].std_error);
      worst = std::max(worst, z);
    }
  }
  return {worst <= 3.0, "max pairwise |diff|/combined_se " + Fmt(worst) + " <= 3"};
}

}  // namespace
}  // namespace dpmul

int main(int argc, char** argv) {
  using namespace dpmul;
  CLI::App app{"dpmul acceptance suite"};
  std::vector<std::string> only;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--only", only, "Criterion ids to run (e.g. AC3)")->delimiter(',');
  app.add_option("--threads", threads, "Monte Carlo worker threads")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  g_threads = threads;

  const std::vector<Criterion> all = {
      {"AC1", "staircase consistency", 30, StaircaseConsistency},
      {"AC2", "algebraic identities", 10, AlgebraicIdentities},
      {"AC3", "optimal-regime trade-off", 300, OptimalTradeoff},
      {"AC4", "converse floor", 600, ConverseFloor},
      {"AC5", "ordering against independent noise", 600, BaselineOrdering},
      {"AC6", "minimal-regime sandwich", 300, MinimalSandwich},
      {"AC7", "gap expansion", 1, GapExpansion},
      {"AC8", "privacy accounting", 60, PrivacyAccounting},
      {"AC9", "coefficient recovery", 60, CoefficientRecovery},
      {"AC10", "input distribution invariance", 600, DistributionInvariance},
  };
  int failed = 0, ran = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
      continue;
    }
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    std::printf("%s %s  %s: %s [%.2fs < %.0fs]\n", c.id.c_str(),
                pass ? "PASS" : "FAIL", c.title.c_str(), o.summary.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched --only\n");
    return 2;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
