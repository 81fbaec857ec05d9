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

#ifndef DPMUL_EXPERIMENT_HPP_
#define DPMUL_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dpmul/errors.hpp"
#include "json.hpp"

namespace dpmul {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  int M = 3;
  int N = 5;
  int T = 2;
  double eta = 1.0;
  double epsilon = 1.0;
  int n = 256;
  std::optional<double> beta1;
  std::optional<std::vector<double>> grid;
  double priv_slack = 0.01;

  // Sweep axes; empty means {epsilon} and {n}.
  std::vector<double> eps_grid;
  std::vector<int> n_schedule;
  std::int64_t samples = 100000;
  std::uint64_t seed = 42;
  std::string input_model = "rademacher";
  std::vector<std::string> schemes = {"layered"};
  int threads = 1;

  std::vector<double> Epsilons() const;
  std::vector<int> Schedule() const;
};

// Unknown keys and type mismatches raise ConfigError.
void ApplyJson(const nlohmann::json& doc, ExperimentConfig& config);
ExperimentConfig LoadConfigFile(const std::string& path);

// Checks every (epsilon, n) combination resolves to a supported scheme.
void ValidateConfig(const ExperimentConfig& config);

nlohmann::json ResolvedJson(const ExperimentConfig& config);
nlohmann::json ErrorJson(const Error& error, const std::string& kind);

struct TradeoffPoint {
  double epsilon = 0.0;
  double snr_star = 0.0;
  double lmse_theory = 0.0;
  double lmse_mc = 0.0;
  double lmse_mc_stderr = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double baseline_lmse = 0.0;
  int M = 0;
  int N = 0;
  int T = 0;
  double eta = 0.0;
  int n = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<TradeoffPoint> points;
  nlohmann::json extras;  // per-point baseline MC and regime info
};

SweepResult RunSweep(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "epsilon,snr_star,lmse_theory,lmse_mc,lmse_mc_stderr,bound_lower,"
    "bound_upper,baseline_lmse,M,N,T,eta,n,samples,seed";

void WriteCsv(const std::vector<TradeoffPoint>& points, std::ostream& out);
void EmitCsv(const std::vector<TradeoffPoint>& points, const std::string& path);

// Sidecar path for a CSV: results.csv -> results.config.json.
std::string SidecarPath(const std::string& csv_path);

nlohmann::json Simulate(const ExperimentConfig& config);
nlohmann::json Audit(const ExperimentConfig& config);
nlohmann::json Bounds(const ExperimentConfig& config);

struct SelftestOptions {
  // Relative error injected into alpha for the alternating-sum fixture.
  double alpha_perturbation = 0.0;
};

struct FixtureResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<FixtureResult> RunSelftest(const SelftestOptions& options = {});
void PrintSelftest(const std::vector<FixtureResult>& results, std::ostream& out);

}  // namespace dpmul

#endif  // DPMUL_EXPERIMENT_HPP_
