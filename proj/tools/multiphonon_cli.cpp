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

#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "multiphonon/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run_command(const std::string& config_path, const std::string& out_flag, int threads,
                bool check) {
  using namespace mph;
  try {
    ScenarioConfig cfg = load_scenario_config(config_path);
    RunOptions opt;
    opt.out_dir = (std::filesystem::path(resolve_output_root(out_flag)) /
                   cfg.output_name)
                      .string();
    opt.threads = threads;
    opt.run_checks = check;

    const ScenarioResult res = run_scenario(cfg, opt);

    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "scenario " << res.scenario << " -> " << opt.out_dir << "\n";
    if (cfg.scenario == "device") {
      // feasibility numbers go to stdout as well
      for (const auto& [k, v] : res.results)
        std::cout << "  " << k << " = " << v << "\n";
    }
    if (check) {
      bool ok = true;
      for (const auto& c : res.checks) {
        std::cout << (c.pass ? "  check PASS: " : "  check FAIL: ") << c.description
                  << "\n";
        ok = ok && c.pass;
      }
      if (!ok) {
        std::cerr << "error: embedded checks failed\n";
        return kExitNumerical;
      }
      std::cout << "  all " << res.checks.size() << " checks passed\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiphonon: sideband physics of a driven spin coupled to a "
               "mechanical mode"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  int threads = int(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  bool check = false;

  CLI::App* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "path to a scenario JSON config")->required();
  run->add_flag("--check", check, "evaluate the config's embedded assertions");
  run->add_option("--threads", threads, "worker cap for ensembles/sweeps/maps");
  run->add_option("--out", out_flag,
                  "output root (default: $MULTIPHONON_OUT, then ./out)");

  CLI::App* schema = app.add_subcommand("schema", "print the config schema");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::cout << mph::config_schema_text();
    return 0;
  }
  return run_command(config_path, out_flag, threads, check);
}
