// Copyright 2026 The multiphonon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiphonon/dynamics.hpp"

namespace mph {

/// Raised for malformed or schema-violating configs (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed scenario configuration (schema_version 1). Unknown keys are
/// rejected at every level.
struct ScenarioConfig {
  std::string scenario;      // spectrum | rates | fock | cat | correlations | drift | device
  std::string output_name;   // subdirectory under the output root
  std::uint64_t seed = 1;
  int cutoff_override = 0;   // 0: use the default cutoff rule
  IntegratorOptions integrator;
  nlohmann::json params;     // scenario-specific block
  nlohmann::json checks;     // array of embedded assertions
  std::string origin;        // file path, for error messages
};

ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig parse_scenario_config(const nlohmann::json& j, const std::string& origin);

struct CheckOutcome {
  std::string description;
  double observed = 0.0;
  bool pass = false;
};

struct ScenarioResult {
  std::string scenario;
  std::map<std::string, double> results;
  std::vector<std::string> warnings;
  std::vector<CheckOutcome> checks;
  std::vector<std::string> files_written;

  bool checks_pass() const;
};

struct RunOptions {
  std::string out_dir;       // resolved output directory for data files
  int threads = 1;
  bool run_checks = false;
  bool write_outputs = true;
};

/// Executes a scenario: writes CSV/JSON outputs (deterministic byte-for-byte
/// for identical config and seed) plus a summary.json, and evaluates the
/// config's embedded checks when requested.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt);

/// Output root resolution: --out flag beats MULTIPHONON_OUT beats "./out".
std::string resolve_output_root(const std::string& cli_out);

/// Human-readable description of the accepted config schema.
std::string config_schema_text();

}  // namespace mph
