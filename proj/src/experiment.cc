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

#include "dpmul/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "dpmul/kernels/kernels.hpp"
#include "dpmul/mc_oracle.hpp"
#include "dpmul/noise_mechanisms.hpp"
#include "dpmul/privacy_auditor.hpp"
#include "dpmul/product_decoder.hpp"
#include "dpmul/scheme_encoder.hpp"
#include "dpmul/theory_bounds.hpp"

namespace dpmul {

using nlohmann::json;

namespace {

struct Setup {
  SchemeParams params;
  NoiseCalibration calibration;
  ScalingSchedule schedule;
  EvaluationGrid grid;
};

EvaluationGrid GridFor(const ExperimentConfig& c) {
  if (c.grid) return EvaluationGrid::Create(*c.grid);
  return DefaultGrid(c.N);
}

Setup MakeSetup(const ExperimentConfig& c, double epsilon, int n) {
  Setup s{SchemeParams::Create(c.M, c.N, c.T, c.eta, epsilon),
          CalibrateRNoise(epsilon, c.priv_slack), MakeSchedule(n, c.T, c.beta1),
          GridFor(c)};
  s.params.RequireSupported();
  return s;
}

InputModel ModelFor(const ExperimentConfig& c) {
  return InputModel{ParseInputKind(c.input_model), c.eta};
}

McOptions OptionsFor(const ExperimentConfig& c) {
  McOptions o;
  o.samples = c.samples;
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

template <typename T>
void Read(const json& doc, const char* key, T& out) {
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("type:") + key,
                      std::string("config key '") + key + "': " + e.what());
  }
}

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json ToJson(const BudgetReport& r) {
  return {{"eps_bar_bar", r.eps_bar_bar},   {"laplace_terms", r.laplace_terms},
          {"eps_total", r.eps_total},       {"target", r.target},
          {"within_target", r.within_target},
          {"z1_multiplier", r.z1_multiplier},
          {"z1_exact_eps", r.z1_exact_eps}};
}

json ToJson(const McResult& r) {
  return {{"estimate", r.estimate}, {"stderr", r.std_error},
          {"samples", r.samples},   {"seed", r.seed},
          {"isa", r.isa}};
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<double> ExperimentConfig::Epsilons() const {
  return eps_grid.empty() ? std::vector<double>{epsilon} : eps_grid;
}

std::vector<int> ExperimentConfig::Schedule() const {
  return n_schedule.empty() ? std::vector<int>{n} : n_schedule;
}

void ApplyJson(const json& doc, ExperimentConfig& c) {
  if (!doc.is_object()) {
    throw ConfigError("object", "config must be a JSON object");
  }
  static const std::set<std::string> known = {
      "M",       "N",       "T",           "eta",     "epsilon",
      "n",       "beta1",   "grid",        "priv_slack", "eps_grid",
      "n_schedule", "samples", "seed",     "input_model", "schemes",
      "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) {
      throw ConfigError("known-key", "unknown config key '" + key + "'");
    }
  }
  if (doc.contains("M")) Read(doc, "M", c.M);
  if (doc.contains("N")) Read(doc, "N", c.N);
  if (doc.contains("T")) Read(doc, "T", c.T);
  if (doc.contains("eta")) Read(doc, "eta", c.eta);
  if (doc.contains("epsilon")) Read(doc, "epsilon", c.epsilon);
  if (doc.contains("n")) Read(doc, "n", c.n);
  if (doc.contains("beta1")) {
    if (doc["beta1"].is_null()) {
      c.beta1.reset();
    } else {
      double b = 0.0;
      Read(doc, "beta1", b);
      c.beta1 = b;
    }
  }
  if (doc.contains("grid")) {
    if (doc["grid"].is_null()) {
      c.grid.reset();
    } else {
      std::vector<double> g;
      Read(doc, "grid", g);
      c.grid = g;
    }
  }
  if (doc.contains("priv_slack")) Read(doc, "priv_slack", c.priv_slack);
  if (doc.contains("eps_grid")) Read(doc, "eps_grid", c.eps_grid);
  if (doc.contains("n_schedule")) Read(doc, "n_schedule", c.n_schedule);
  if (doc.contains("samples")) Read(doc, "samples", c.samples);
  if (doc.contains("seed")) Read(doc, "seed", c.seed);
  if (doc.contains("input_model")) Read(doc, "input_model", c.input_model);
  if (doc.contains("schemes")) Read(doc, "schemes", c.schemes);
  if (doc.contains("threads")) Read(doc, "threads", c.threads);
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("readable", "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("json", path + ": " + e.what());
  }
  ExperimentConfig c;
  ApplyJson(doc, c);
  return c;
}

void ValidateConfig(const ExperimentConfig& c) {
  auto fail = [](const std::string& inv, const std::string& msg) {
    throw ConfigError(inv, msg);
  };
  if (c.samples < 1000) fail("samples>=1000", "samples must be at least 1000");
  if (c.threads < 1) fail("threads>=1", "threads must be at least 1");
  if (!(c.priv_slack > 0.0 && c.priv_slack < 1.0)) {
    fail("0<priv_slack<1", "priv_slack must lie in (0, 1)");
  }
  try {
    ParseInputKind(c.input_model);
  } catch (const Error& e) {
    fail(e.invariant(), e.what());
  }
  bool layered = false;
  for (const auto& s : c.schemes) {
    if (s == "layered") {
      layered = true;
    } else if (s != "independent_baseline") {
      fail("schemes", "unknown scheme '" + s + "'");
    }
  }
  if (!layered) fail("schemes", "schemes must include 'layered'");
  if (c.grid) {
    if (static_cast<int>(c.grid->size()) != c.N) {
      fail("|grid|==N", "grid must list exactly N points");
    }
    if (c.T >= 2) {
      for (double x : *c.grid) {
        if (x == 0.0) fail("grid!=0", "T >= 2 needs non-zero grid points");
      }
    }
  }
  for (double eps : c.Epsilons()) {
    for (int n : c.Schedule()) {
      try {
        MakeSetup(c, eps, n);
      } catch (const Error& e) {
        fail(e.invariant(),
             "epsilon=" + Fmt(eps) + " n=" + std::to_string(n) + ": " + e.what());
      }
    }
  }
}

json ResolvedJson(const ExperimentConfig& c) {
  json j = {{"M", c.M},
            {"N", c.N},
            {"T", c.T},
            {"eta", c.eta},
            {"epsilon", c.epsilon},
            {"n", c.n},
            {"beta1", Optional(c.beta1)},
            {"grid", c.grid ? json(*c.grid) : json(nullptr)},
            {"priv_slack", c.priv_slack},
            {"eps_grid", c.Epsilons()},
            {"n_schedule", c.Schedule()},
            {"samples", c.samples},
            {"seed", c.seed},
            {"input_model", c.input_model},
            {"schemes", c.schemes},
            {"threads", c.threads}};
  return j;
}

json ErrorJson(const Error& error, const std::string& kind) {
  return {{"error", kind},
          {"invariant", error.invariant()},
          {"message", error.what()}};
}

SweepResult RunSweep(const ExperimentConfig& c) {
  ValidateConfig(c);
  const bool with_baseline_mc =
      std::find(c.schemes.begin(), c.schemes.end(), "independent_baseline") !=
      c.schemes.end();
  const InputModel model = ModelFor(c);
  SweepResult out;
  out.extras = json::array();
  for (int n : c.Schedule()) {
    for (double eps : c.Epsilons()) {
      try {
        const Setup s = MakeSetup(c, eps, n);
        const BoundSet b = ComputeBounds(s.params);
        const LinearDecoder dec =
            MakeDecoder(s.params, s.calibration, s.schedule, s.grid);
        const McResult mc = MonteCarloLmse(s.params, s.calibration, s.schedule,
                                           s.grid, model, dec, OptionsFor(c));
        TradeoffPoint p;
        p.epsilon = eps;
        p.snr_star = b.snr_star;
        if (s.params.regime == Regime::kOptimal) {
          p.lmse_theory = b.lmse_opt;
          p.bound_lower = b.lmse_opt;
          p.bound_upper = b.lmse_opt;
        } else {
          p.lmse_theory = *b.lmse_min_upper;
          p.bound_lower = *b.lmse_min_lower;
          p.bound_upper = *b.lmse_min_upper;
        }
        p.lmse_mc = mc.estimate;
        p.lmse_mc_stderr = mc.std_error;
        p.baseline_lmse = b.baseline_independent;
        p.M = c.M;
        p.N = c.N;
        p.T = c.T;
        p.eta = c.eta;
        p.n = n;
        p.samples = mc.samples;
        p.seed = c.seed;
        out.points.push_back(p);

        json extra = {{"epsilon", eps},
                      {"n", n},
                      {"regime", RegimeName(s.params.regime)},
                      {"isa", mc.isa}};
        if (with_baseline_mc) {
          const LmmseResult bd =
              BaselineIndependentDecoder(eps, c.eta, c.M, c.N);
          McOptions o = OptionsFor(c);
          o.seed = DeriveSeed(c.seed, 1);
          const std::vector<double> w(bd.weights.data(),
                                      bd.weights.data() + bd.weights.size());
          extra["baseline_mc"] =
              ToJson(McFixedLinear(IndependentBaselineSampler(s.params, model),
                                   w, o));
        }
        out.extras.push_back(extra);
      } catch (const Error& e) {
        throw NumericError(e.invariant(), "sweep point epsilon=" + Fmt(eps) +
                                              " n=" + std::to_string(n) +
                                              ": " + e.what());
      }
    }
  }
  return out;
}

void WriteCsv(const std::vector<TradeoffPoint>& points, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const TradeoffPoint& p : points) {
    out << Fmt(p.epsilon) << ',' << Fmt(p.snr_star) << ',' << Fmt(p.lmse_theory)
        << ',' << Fmt(p.lmse_mc) << ',' << Fmt(p.lmse_mc_stderr) << ','
        << Fmt(p.bound_lower) << ',' << Fmt(p.bound_upper) << ','
        << Fmt(p.baseline_lmse) << ',' << p.M << ',' << p.N << ',' << p.T << ','
        << Fmt(p.eta) << ',' << p.n << ',' << p.samples << ',' << p.seed
        << '\n';
  }
}

void EmitCsv(const std::vector<TradeoffPoint>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericError("writable", "cannot write CSV to " + path);
  WriteCsv(points, out);
  out.flush();
  if (!out) throw NumericError("writable", "write failed for " + path);
}

std::string SidecarPath(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".config.json");
  return p.string();
}

json Simulate(const ExperimentConfig& c) {
  ValidateConfig(c);
  const Setup s = MakeSetup(c, c.epsilon, c.n);
  const InputModel model = ModelFor(c);
  Rng rng(c.seed);
  std::vector<double> a(c.M);
  for (double& x : a) x = model.Draw(rng);
  const ShareTable table =
      Encode(s.params, s.calibration, s.schedule, s.grid, a, rng);
  const std::vector<double> y = NodeProducts(table);
  const DecodedEstimate d =
      Decode(s.params, s.calibration, s.schedule, y, s.grid);

  const double alpha = ComputeMmseAlpha(c.eta, s.calibration.sigma_sq).alpha;
  std::vector<double> z(c.M), direct_c(c.M);
  double prod_a = 1.0, prod_z = 1.0;
  for (int i = 0; i < c.M; ++i) {
    z[i] = alpha * (a[i] + table.noise_r[i]) - a[i];
    prod_a *= a[i];
    prod_z *= z[i];
  }
  for (int k = 0; k < c.M; ++k) direct_c[k] = DirectCk(a, table.noise_r, k);

  std::vector<std::vector<double>> shares(c.N);
  for (int j = 0; j < c.N; ++j) {
    for (int i = 0; i < c.M; ++i) shares[j].push_back(table.share(j, i));
  }
  json j = {
      {"config", ResolvedJson(c)},
      {"regime", RegimeName(s.params.regime)},
      {"calibration",
       {{"eps_bar", s.calibration.eps_bar},
        {"gamma_star", s.calibration.gamma_star},
        {"sigma_sq", s.calibration.sigma_sq}}},
      {"schedule",
       {{"n", s.schedule.n},
        {"zeta1", s.schedule.zeta1},
        {"zeta2", Optional(s.schedule.zeta2)},
        {"beta1", s.schedule.beta1}}},
      {"grid", s.grid.points},
      {"inputs", a},
      {"noise_r", table.noise_r},
      {"noise_s", table.noise_s},
      {"shares", shares},
      {"node_outputs", y},
      {"decoded",
       {{"C", d.C},
        {"D", d.D},
        {"alpha", d.alpha},
        {"observations", d.observations},
        {"weights", d.weights},
        {"estimate", d.estimate}}},
      {"oracle",
       {{"prod_A", prod_a},
        {"prod_Z", prod_z},
        {"direct_C", direct_c},
        {"estimate_error", d.estimate - prod_a}}}};
  const LinearDecoder dec =
      MakeDecoder(s.params, s.calibration, s.schedule, s.grid);
  j["mc"] = ToJson(MonteCarloLmse(s.params, s.calibration, s.schedule, s.grid,
                                  model, dec, OptionsFor(c)));
  return j;
}

json Audit(const ExperimentConfig& c) {
  ValidateConfig(c);
  const Setup s = MakeSetup(c, c.epsilon, c.n);
  json j = {{"config", ResolvedJson(c)},
            {"eps_bar", s.calibration.eps_bar},
            {"budget", ToJson(WorstSubsetBudget(s.params, s.grid, s.calibration,
                                                c.n, c.beta1))}};
  const ThresholdReport th =
      FindBudgetThreshold(s.params, s.grid, s.calibration, c.beta1);
  j["threshold"] = {{"n0", th.n0 ? json(*th.n0) : json(nullptr)},
                    {"budget", th.n0 ? ToJson(th.at_n0) : json(nullptr)}};
  json table = json::array();
  for (int k = 4; k <= 10; ++k) {
    const int n = 1 << k;
    const BudgetReport r =
        WorstSubsetBudget(s.params, s.grid, s.calibration, n, c.beta1);
    json row = {{"n", n},
                {"eps_total", r.eps_total},
                {"z1_exact_eps", r.z1_exact_eps}};
    if (c.T == 1) {
      const ScalingSchedule sch = MakeSchedule(n, 1);
      double worst = 0.0;
      for (double x : s.grid.points) {
        worst = std::max(worst, AuditMarginal(s.calibration, sch.zeta1, x));
      }
      row["eps_hat"] = worst;
    }
    table.push_back(row);
  }
  j["schedule_table"] = table;
  return j;
}

json Bounds(const ExperimentConfig& c) {
  ValidateConfig(c);
  const Setup s = MakeSetup(c, c.epsilon, c.n);
  const BoundSet b = ComputeBounds(s.params);
  return {{"config", ResolvedJson(c)},
          {"regime", RegimeName(s.params.regime)},
          {"sigma_star_sq", OptimalVariance(c.epsilon)},
          {"snr_star", b.snr_star},
          {"lmse_opt", b.lmse_opt},
          {"lmse_min_upper", Optional(b.lmse_min_upper)},
          {"lmse_min_lower", Optional(b.lmse_min_lower)},
          {"gap", Optional(b.gap)},
          {"snr_prime", Optional(b.snr_prime)},
          {"baseline_independent", b.baseline_independent}};
}


// Self-test fixtures.

namespace {

struct Draw {
  std::vector<double> a, r, z;
};

Draw RandomDraw(int m, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  Draw d;
  const StaircaseSpec spec = StaircaseSpec::Create(1.0, OptimalGamma(1.0));
  for (int i = 0; i < m; ++i) {
    d.a.push_back(rng.Sign());
    d.r.push_back(StaircaseSample(spec, rng));
  }
  for (int i = 0; i < m; ++i) d.z.push_back(alpha * (d.a[i] + d.r[i]) - d.a[i]);
  return d;
}

double Prod(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 1.0, std::multiplies<>());
}

// Encodes a fixed draw and compares the decode to prod(A) + sign prod(Z).
// The product has degree MT but only (M-1)T+1 points are used, so the top
// coefficient aliases in at O(zeta1); the error must shrink like 1/n.
FixtureResult WorkedExample(const std::string& name, int m, int n_nodes,
                            int t) {
  const SchemeParams p = SchemeParams::Create(m, n_nodes, t, 1.0, 1.0);
  const NoiseCalibration cal = CalibrateRNoise(1.0);
  const EvaluationGrid grid = DefaultGrid(n_nodes);
  const double alpha = ComputeMmseAlpha(1.0, cal.sigma_sq).alpha;
  const Draw d = RandomDraw(m, alpha, 7);
  std::vector<double> s(static_cast<std::size_t>(m) * (t - 1), 0.0);
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  const double expect = Prod(d.a) + sign * Prod(d.z);
  std::vector<double> err;
  for (int n : {256, 4096}) {
    const ScalingSchedule sch = MakeSchedule(n, t);
    const ShareTable tab = EncodeWithNoise(p, sch, grid, d.a, d.r, s);
    err.push_back(
        std::fabs(Decode(p, cal, sch, NodeProducts(tab), grid).estimate - expect));
  }
  const bool ok = err[1] < err[0] / 8.0 && err[1] < 1e-3;
  return {name, ok, "|err| n=256:" + Fmt(err[0]) + " n=4096:" + Fmt(err[1])};
}

}  // namespace

std::vector<FixtureResult> RunSelftest(const SelftestOptions& options) {
  std::vector<FixtureResult> out;
  auto guarded = [&](const std::string& name, auto fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };

  guarded("staircase_closed_form", [] {
    double worst = 0.0;
    for (double eps : {0.5, 1.0, 2.0}) {
      const double v =
          StaircaseVariance(StaircaseSpec::Create(eps, OptimalGamma(eps)));
      worst = std::max(worst, std::fabs(v / OptimalVariance(eps) - 1.0));
    }
    return FixtureResult{"staircase_closed_form", worst < 1e-3,
                         "max rel err " + Fmt(worst)};
  });

  guarded("staircase_sampler_variance", [] {
    const StaircaseSpec spec = StaircaseSpec::Create(1.0, OptimalGamma(1.0));
    Rng rng(11);
    kernels::Moments m;
    for (int i = 0; i < 200000; ++i) {
      const double x = StaircaseSample(spec, rng);
      m.Merge(kernels::Moments{1, x * x, 0.0});
    }
    const double rel = std::fabs(m.mean / StaircaseVariance(spec) - 1.0);
    return FixtureResult{"staircase_sampler_variance", rel < 0.02,
                         "rel err " + Fmt(rel)};
  });

  guarded("two_node_rectangle", [] {
    return WorkedExample("two_node_rectangle", 2, 2, 1);
  });
  guarded("three_node_t1", [] {
    return WorkedExample("three_node_t1", 3, 3, 1);
  });

  guarded("triple_extraction", [] {
    const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
    const EvaluationGrid grid = DefaultGrid(5);
    const Draw d = RandomDraw(3, 0.5, 9);
    const std::vector<double> s = {0.3, -0.7, 1.1};
    std::vector<double> c0_err, c2_err;
    for (int n : {64, 1024}) {
      const ScalingSchedule sch = MakeSchedule(n, 2);
      const ShareTable tab = EncodeWithNoise(p, sch, grid, d.a, d.r, s);
      const auto c = ExtractSymmetricSums(p, sch, NodeProducts(tab), grid);
      c0_err.push_back(std::fabs(c[0] - DirectCk(d.a, d.r, 0)));
      c2_err.push_back(std::fabs(c[2] - DirectCk(d.a, d.r, 2)));
    }
    const bool ok = c0_err[1] < c0_err[0] && c2_err[1] < c2_err[0];
    return FixtureResult{"triple_extraction", ok,
                         "|dC0| n=64:" + Fmt(c0_err[0]) + " n=1024:" +
                             Fmt(c0_err[1]) + " |dC2| n=64:" +
                             Fmt(c2_err[0]) + " n=1024:" + Fmt(c2_err[1])};
  });

  guarded("alternating_sum", [&] {
    const NoiseCalibration cal = CalibrateRNoise(1.0);
    const double alpha = ComputeMmseAlpha(1.0, cal.sigma_sq).alpha;
    const double used = alpha * (1.0 + options.alpha_perturbation);
    double worst = 0.0;
    for (int m = 2; m <= 6; ++m) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Draw d = RandomDraw(m, alpha, 100 + seed);
        std::vector<double> c(m);
        for (int k = 0; k < m; ++k) c[k] = DirectCk(d.a, d.r, k);
        const auto dk = DkFromCk(c, used);
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        const double expect = Prod(d.a) + sign * Prod(d.z);
        double scale = 1.0;
        for (double v : dk) scale += std::fabs(v);
        worst = std::max(worst,
                         std::fabs(FinalEstimate(dk, m) - expect) / scale);
      }
    }
    return FixtureResult{"alternating_sum", worst < 1e-10,
                         "max scaled err " + Fmt(worst)};
  });

  guarded("cd_round_trip", [] {
    double worst = 0.0;
    for (double alpha : {0.2, 0.5, 0.8}) {
      const std::vector<double> c = {1.5, -0.25, 2.0, 0.75, -1.0};
      const auto back = CkFromDk(DkFromCk(c, alpha), alpha);
      for (std::size_t k = 0; k < c.size(); ++k) {
        worst = std::max(worst, std::fabs(back[k] - c[k]) / std::fabs(c[k]));
      }
    }
    return FixtureResult{"cd_round_trip", worst < 1e-10,
                         "max rel err " + Fmt(worst)};
  });

  guarded("bound_ordering", [] {
    bool ok = true;
    for (auto [m, t] : {std::pair{3, 1}, {4, 1}, {5, 2}}) {
      for (double eps : {0.5, 1.0, 2.0}) {
        const double lo = LmseMinimalLower(eps, 1.0, m, t);
        const double up = LmseMinimalUpper(eps, 1.0, m, t);
        ok = ok && LmseOptimal(eps, 1.0, m) <= lo && lo <= up &&
             Gap(eps, 1.0, m, t) >= 1.0;
      }
    }
    for (double eps : {0.5, 1.0, 2.0, 4.0}) {
      ok = ok && LmseOptimal(eps, 1.0, 3) <= BaselineIndependentLmse(eps, 1.0, 3, 5);
    }
    return FixtureResult{"bound_ordering", ok, "opt <= lower <= upper, gap >= 1"};
  });

  guarded("privacy_t1_n1024", [] {
    const SchemeParams p = SchemeParams::Create(3, 3, 1, 1.0, 1.0);
    const NoiseCalibration cal = CalibrateRNoise(1.0);
    const EvaluationGrid grid = DefaultGrid(3);
    const BudgetReport r = WorstSubsetBudget(p, grid, cal, 1024);
    double eps_hat = 0.0;
    for (double x : grid.points) {
      eps_hat = std::max(eps_hat, AuditMarginal(cal, 1.0 / 1024, x));
    }
    return FixtureResult{"privacy_t1_n1024",
                         r.within_target && eps_hat <= cal.target_epsilon,
                         "eps_total=" + Fmt(r.eps_total) +
                             " eps_hat=" + Fmt(eps_hat)};
  });

  guarded("privacy_t2_threshold", [] {
    const SchemeParams p = SchemeParams::Create(3, 5, 2, 1.0, 1.0);
    const NoiseCalibration cal = CalibrateRNoise(1.0);
    const EvaluationGrid grid = DefaultGrid(5);
    const ThresholdReport th = FindBudgetThreshold(p, grid, cal);
    const BudgetReport at1024 = WorstSubsetBudget(p, grid, cal, 1024);
    const bool ok = th.n0 && th.at_n0.within_target &&
                    at1024.eps_total >= th.at_n0.eps_total;
    return FixtureResult{
        "privacy_t2_threshold", ok,
        "n0=" + (th.n0 ? std::to_string(*th.n0) : std::string("none")) +
            " eps_total(n0)=" + Fmt(th.at_n0.eps_total) +
            " eps_total(1024)=" + Fmt(at1024.eps_total)};
  });

  return out;
}

void PrintSelftest(const std::vector<FixtureResult>& results,
                   std::ostream& out) {
  for (const auto& r : results) {
    out << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  " << r.detail << '\n';
  }
}

}  // namespace dpmul
