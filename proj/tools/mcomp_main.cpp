#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcomp/report_io.hpp"
#include "mcomp/runner.hpp"
#include "mcomp/scenario.hpp"
#include "mcomp/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mcomp: certified comparison of finite-state Markov pairs"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out";
  int grid_steps = -1;
  std::int64_t paths = -1;
  std::int64_t seed = -1;
  CLI::App* run = app.add_subcommand("run", "run a scenario file and write reports");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--grid-steps", grid_steps, "override the scenario's grid steps");
  run->add_option("--paths", paths, "override the Monte Carlo path count");
  run->add_option("--seed", seed, "override the Monte Carlo seed");

  bool quick = false;
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in check battery");
  selftest->add_flag("--quick", quick, "trim the corpus sweep to 10 scenarios");

  CLI::App* schema = app.add_subcommand("schema", "print the scenario JSON schema");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::cout << mcomp::scenario_schema().dump(2) << '\n';
    return 0;
  }

  if (selftest->parsed()) {
    const mcomp::SelftestResult r = mcomp::run_selftest(quick, std::cout);
    if (r.passed) return 0;
    return r.soundness_violations > 0 ? mcomp::kExitSoundness : 1;
  }

  try {
    mcomp::Scenario scen = mcomp::load_scenario(scenario_path);
    if (grid_steps > 0) scen.grid_steps = grid_steps;
    if (paths >= 0) scen.mc.paths = static_cast<std::size_t>(paths);
    if (seed >= 0) scen.mc.seed = static_cast<std::uint64_t>(seed);
    const mcomp::RunOutput out = mcomp::run_scenario(scen);
    mcomp::write_run_outputs(out, out_dir);
    std::cout << out.summary << '\n';
    std::cout << "reports written to " << out_dir << '\n';
    return out.exit_code;
  } catch (const mcomp::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    for (const mcomp::Diagnostic& d : e.diagnostics)
      std::cerr << "  " << d.where << ": " << d.message << '\n';
    return mcomp::kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mcomp::kExitInvalidInput;
  }
}
