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

// Command-line front end: sweep, simulate, audit, bounds, selftest.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpmul/errors.hpp"
#include "dpmul/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitSelftest = 4;

struct Overrides {
  std::string config_path;
  std::string out_path;
  int M = 0, N = 0, T = 0, n = 0, threads = 0;
  double eta = 0, epsilon = 0, beta1 = 0, priv_slack = 0;
  std::vector<double> grid, eps_grid;
  std::vector<int> n_schedule;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::string input_model;
  std::vector<std::string> schemes;
  double alpha_perturbation = 0.0;
};

void AddConfigFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--M", o.M, "number of multiplicands");
  cmd->add_option("--N", o.N, "number of nodes");
  cmd->add_option("--T", o.T, "collusion threshold");
  cmd->add_option("--eta", o.eta, "input variance");
  cmd->add_option("--epsilon", o.epsilon, "privacy budget");
  cmd->add_option("--n", o.n, "schedule index");
  cmd->add_option("--beta1", o.beta1, "zeta1 exponent (T >= 2)");
  cmd->add_option("--grid", o.grid, "evaluation points")->delimiter(',');
  cmd->add_option("--priv_slack,--priv-slack", o.priv_slack, "calibration slack");
  cmd->add_option("--eps_grid,--eps-grid", o.eps_grid, "sweep epsilons")
      ->delimiter(',');
  cmd->add_option("--n_schedule,--n-schedule", o.n_schedule, "sweep n values")
      ->delimiter(',');
  cmd->add_option("--samples", o.samples, "Monte Carlo samples");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--input_model,--input-model", o.input_model,
                  "rademacher | uniform | gaussian");
  cmd->add_option("--schemes", o.schemes, "layered[,independent_baseline]")
      ->delimiter(',');
}

dpmul::ExperimentConfig Resolve(const CLI::App* cmd, const Overrides& o) {
  dpmul::ExperimentConfig c;
  if (!o.config_path.empty()) c = dpmul::LoadConfigFile(o.config_path);
  nlohmann::json j = nlohmann::json::object();
  auto set = [&](const char* flag, const char* key, const auto& value) {
    if (cmd->count(flag) > 0) j[key] = value;
  };
  set("--M", "M", o.M);
  set("--N", "N", o.N);
  set("--T", "T", o.T);
  set("--eta", "eta", o.eta);
  set("--epsilon", "epsilon", o.epsilon);
  set("--n", "n", o.n);
  set("--beta1", "beta1", o.beta1);
  set("--grid", "grid", o.grid);
  set("--priv_slack", "priv_slack", o.priv_slack);
  set("--eps_grid", "eps_grid", o.eps_grid);
  set("--n_schedule", "n_schedule", o.n_schedule);
  set("--samples", "samples", o.samples);
  set("--seed", "seed", o.seed);
  set("--threads", "threads", o.threads);
  set("--input_model", "input_model", o.input_model);
  set("--schemes", "schemes", o.schemes);
  dpmul::ApplyJson(j, c);
  dpmul::ValidateConfig(c);
  return c;
}

void WriteJson(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw dpmul::NumericError("writable", "cannot write " + path);
  }
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private one-round multiplication toolkit"};
  app.require_subcommand(1);
  Overrides o;

  auto* sweep = app.add_subcommand("sweep", "epsilon/n sweep to CSV");
  auto* simulate = app.add_subcommand("simulate", "single run, per-stage dump");
  auto* audit = app.add_subcommand("audit", "privacy budget report");
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds");
  auto* selftest = app.add_subcommand("selftest", "embedded fixture suite");
  for (auto* cmd : {sweep, simulate, audit, bounds}) AddConfigFlags(cmd, o);
  for (auto* cmd : {sweep, simulate, audit, bounds}) {
    cmd->add_option("--out", o.out_path, "output path");
  }
  selftest->add_option("--alpha_perturbation,--alpha-perturbation",
                       o.alpha_perturbation,
                       "relative error injected into alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (selftest->parsed()) {
    const auto results = dpmul::RunSelftest({o.alpha_perturbation});
    dpmul::PrintSelftest(results, std::cout);
    for (const auto& r : results) {
      if (!r.pass) return kExitSelftest;
    }
    return kExitOk;
  }

  CLI::App* cmd = sweep->parsed()      ? sweep
                  : simulate->parsed() ? simulate
                  : audit->parsed()    ? audit
                                       : bounds;
  dpmul::ExperimentConfig config;
  try {
    config = Resolve(cmd, o);
  } catch (const dpmul::Error& e) {
    std::cerr << dpmul::ErrorJson(e, "config").dump() << '\n';
    return kExitConfig;
  }

  try {
    if (cmd == sweep) {
      const dpmul::SweepResult r = dpmul::RunSweep(config);
      const std::string out = o.out_path.empty() ? "sweep.csv" : o.out_path;
      dpmul::EmitCsv(r.points, out);
      nlohmann::json side = {{"config", dpmul::ResolvedJson(config)},
                             {"points", r.extras}};
      WriteJson(side, dpmul::SidecarPath(out));
      std::cerr << "wrote " << out << " (" << r.points.size() << " rows)\n";
    } else if (cmd == simulate) {
      WriteJson(dpmul::Simulate(config), o.out_path);
    } else if (cmd == audit) {
      WriteJson(dpmul::Audit(config), o.out_path);
    } else {
      WriteJson(dpmul::Bounds(config), o.out_path);
    }
  } catch (const dpmul::Error& e) {
    std::cerr << dpmul::ErrorJson(e, "numeric").dump() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"numeric\",\"message\":\"" << e.what() << "\"}\n";
    return kExitNumeric;
  }
  return kExitOk;
}
