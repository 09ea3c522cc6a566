#pragma once
// Scenario execution: build the shared grid and both evolution systems, run
// every requested theorem checker for every function/horizon, optionally
// sweep a cone and run the Monte Carlo battery, and fold everything into one
// result with the process exit code.

#include <optional>
#include <string>
#include <vector>

#include "mcomp/comparison.hpp"
#include "mcomp/generators.hpp"
#include "mcomp/montecarlo.hpp"
#include "mcomp/scenario.hpp"

namespace mcomp {

struct GeneratorProbe {
  std::string label;
  GeneratorEstimate est;
};

struct McRun {
  bool enabled = false;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  MartingaleTestResult mart_x, mart_y;
  MartingaleTestResult spacetime_x;
  bool linking_ran = false;
  LinkingTestResult linking;
};

struct RunOutput {
  Scenario scenario;  // as executed (after CLI overrides)
  TimeGrid grid;
  EvolutionCert cert_x, cert_y;
  double ck_worst = 0.0;  // worst Chapman-Kolmogorov defect over probe triples
  std::vector<ComparisonReport> reports;
  std::optional<ClassSweepReport> sweep;
  ResidualCurve residuals;  // backward-equation curve: first function/horizon on X
  std::vector<GeneratorProbe> generator_probes;
  McRun mc;
  // 0 certified, 1 inconclusive, 2 soundness/numerics violation.
  int exit_code = 0;
  std::string summary;
};

// Exit codes shared with the CLI.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitInconclusive = 1;
inline constexpr int kExitSoundness = 2;
inline constexpr int kExitInvalidInput = 3;

RunOutput run_scenario(const Scenario& s, Exec exec = Exec::parallel);

}  // namespace mcomp
