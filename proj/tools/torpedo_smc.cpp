// Command-line driver: single runs and cross-controller comparisons.
//
//   torpedo_smc run --preset pid-smc1 --out trace.csv
//   torpedo_smc run --scenario scenarios/smc1.json --dt 0.0005 --out trace.csv
//   torpedo_smc compare --preset smc1 --preset smc2 --preset pid-smc1 --out summary.csv

#include "torpedo_smc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace torpedo_smc;

ControllerKind kind_or_throw(const std::string& name) {
  const auto kind = parse_controller_kind(name);
  if (!kind) throw ValidationError("preset", "unknown controller kind '" + name + "'");
  return *kind;
}

Scenario scenario_from_file(const std::string& path) {
  Scenario sc = load_scenario(path);
  sc.name = std::filesystem::path(path).stem().string();
  return sc;
}

void add_overrides(CLI::App* cmd, cli::Overrides& o) {
  cmd->add_option("--dt", o.dt, "integration step [s]");
  cmd->add_option("--duration", o.duration, "simulated time [s]");
  cmd->add_option("--amplitude", o.amplitude, "depth step amplitude [m]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mode depth control simulator for a torpedo plant"};
  app.require_subcommand(1);

  std::string run_scenario;
  std::string run_preset;
  std::string run_out;
  cli::Overrides run_overrides;
  auto* run = app.add_subcommand("run", "simulate one scenario and write its trace CSV");
  run->add_option("--scenario", run_scenario, "scenario JSON file");
  run->add_option("--preset", run_preset, "controller preset: smc1 | smc2 | pid-smc1");
  run->add_option("--out", run_out, "trace CSV path")->required();
  add_overrides(run, run_overrides);

  std::vector<std::string> cmp_presets;
  std::vector<std::string> cmp_scenarios;
  std::string cmp_out;
  cli::Overrides cmp_overrides;
  auto* compare = app.add_subcommand("compare", "run several scenarios and write one metrics row each");
  auto* preset_opt = compare->add_option("--preset", cmp_presets, "controller preset (repeatable)");
  auto* scenario_opt = compare->add_option("--scenario", cmp_scenarios, "scenario JSON file (repeatable)");
  compare->add_option("--out", cmp_out, "summary CSV path")->required();
  add_overrides(compare, cmp_overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kValidationError;
  }

  try {
    if (*run) {
      if (run_scenario.empty() && run_preset.empty()) {
        std::cerr << "run: give --scenario and/or --preset\n";
        return cli::kValidationError;
      }
      Scenario sc;
      if (!run_scenario.empty()) sc = scenario_from_file(run_scenario);
      if (!run_preset.empty()) {
        const auto kind = kind_or_throw(run_preset);
        sc.controller = ControllerConfig::preset(kind);
        sc.name = run_preset;
      }
      sc = cli::apply_overrides(std::move(sc), run_overrides);
      return cli::cmd_run(sc, run_out, std::cout, std::cerr);
    }

    // Interleaved --preset/--scenario values keep their command-line order.
    std::vector<Scenario> scenarios;
    std::map<const CLI::Option*, std::size_t> next;
    for (const CLI::Option* opt : compare->parse_order()) {
      const std::size_t i = next[opt]++;
      if (opt == preset_opt)
        scenarios.push_back(cli::preset_scenario(kind_or_throw(cmp_presets.at(i))));
      else if (opt == scenario_opt)
        scenarios.push_back(scenario_from_file(cmp_scenarios.at(i)));
    }
    for (auto& sc : scenarios) sc = cli::apply_overrides(std::move(sc), cmp_overrides);
    return cli::cmd_compare(scenarios, cmp_out, std::cerr);
  } catch (const ScenarioReadError& e) {
    std::cerr << e.what() << '\n';
    return cli::kIoError;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return cli::kValidationError;
  }
}
