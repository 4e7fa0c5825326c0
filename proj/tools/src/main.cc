// Copyright 2026 The llmsched Authors.
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

#include <iostream>

#include "CLI11.hpp"
#include "llmsched_cli/commands.h"

int main(int argc, char** argv) {
  using namespace llmsched::cli;
  CLI::App app{"Cost-aware LLM query scheduling simulator"};
  app.set_version_flag("--version", std::string(LLMSCHED_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim;
  bool print_defaults = false;
  uint64_t sim_seed = 0;
  int sim_reps = 0;
  auto* simulate = app.add_subcommand("simulate", "Run the simulator for one configuration");
  simulate->add_option("--config", sim.config, "Config or manifest file");
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Base seed (overrides the config)");
  auto* reps_opt = simulate->add_option("--reps", sim_reps, "Repetitions (overrides the config)")->check(CLI::PositiveNumber);
  simulate->add_option("--override", sim.overrides, "KEY=VALUE, repeatable")->allow_extra_args(false);
  simulate->add_option("--out", sim.out, "Parent directory for the run session");
  simulate->add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  SweepArgs sweep;
  int sweep_reps = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
  sweep_cmd->add_option("--config", sweep.config, "Config file")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "KEY=V1,V2,... (repeatable; tau, Q and w are shorthands)")
      ->allow_extra_args(false);
  auto* sweep_reps_opt = sweep_cmd->add_option("--reps", sweep_reps, "Repetitions per grid point")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--override", sweep.overrides, "KEY=VALUE applied before the grid")->allow_extra_args(false);
  sweep_cmd->add_option("--out", sweep.out, "Parent directory for the sweep session")->required();

  std::vector<std::filesystem::path> reports;
  auto* compare = app.add_subcommand("compare", "Compare reports against the first one");
  compare->add_option("reports", reports, "REF OTHER... (report.jsonl, aggregate.json or a run directory)")
      ->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-workload", "Write the synthetic workload a scenario describes");
  synth_cmd->add_option("--scenario", synth.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth.out, "Output JSONL path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*simulate) {
    if (print_defaults) return cmd_print_defaults(std::cout);
    if (sim.config.empty() || sim.out.empty()) {
      std::cerr << "simulate: --config and --out are required\n";
      return kUsage;
    }
    if (*seed_opt) sim.seed = sim_seed;
    if (*reps_opt) sim.repetitions = sim_reps;
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    if (*sweep_reps_opt) sweep.repetitions = sweep_reps;
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*compare) return cmd_compare(reports, std::cout, std::cerr);
  if (*synth_cmd) return cmd_synth_workload(synth, std::cout, std::cerr);
  return kUsage;
}
