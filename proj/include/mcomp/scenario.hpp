#pragma once
// Scenario files: a pair of process specs over a shared state space plus the
// questions to ask (functions, horizons, theorems, optional cone sweep and
// Monte Carlo block). Schema "v1"; parse errors carry JSON pointers.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcomp/rate_model.hpp"
#include "mcomp/state_space.hpp"

namespace mcomp {

struct ScenarioError : std::runtime_error {
  ScenarioError(std::vector<Diagnostic> diags, const std::string& headline)
      : std::runtime_error(headline), diagnostics(std::move(diags)) {}
  std::vector<Diagnostic> diagnostics;
};

struct MonteCarloConfig {
  bool enabled = false;
  std::size_t paths = 100000;
  std::uint64_t seed = 20250814;
  std::vector<double> checkpoints;  // defaults to {0, T/2, T}
};

struct ConeRequest {
  std::string kind;  // "increasing", "all_bounded" or "custom"
  std::vector<TestFunction> generators;
};

struct Scenario {
  std::string name;
  double horizon = 1.0;
  int grid_steps = 512;
  StateSpace space;
  ProcessSpec x{RateModel::constant(Mat(1, 1), 1.0), {}, {1.0}};
  ProcessSpec y{RateModel::constant(Mat(1, 1), 1.0), {}, {1.0}};
  std::vector<TestFunction> functions;
  std::vector<double> horizons;        // target times t
  std::vector<std::string> theorems;   // subset of thm4/7/8/9/10
  std::optional<ConeRequest> cone;
  MonteCarloConfig mc;
};

// Throws ScenarioError with JSON-pointer diagnostics on malformed input.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

// Swap the two processes (the reversal probe).
Scenario swapped(Scenario s);

// JSON Schema for the scenario format (the `schema` subcommand).
nlohmann::json scenario_schema();

}  // namespace mcomp
