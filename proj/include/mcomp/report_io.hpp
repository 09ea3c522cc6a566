#pragma once
// Output formatting: report.json plus the three CSV artifacts, all written
// atomically (temp file + rename). CSV numbers are shortest round-trip
// decimals with '.' separators.

#include <string>

#include <nlohmann/json.hpp>

#include "mcomp/runner.hpp"

namespace mcomp {

std::string format_double(double v);

void write_text_atomic(const std::string& path, const std::string& content);

nlohmann::json run_output_to_json(const RunOutput& out);

std::string linking_curve_csv(const LinkingCurve& lc);
std::string residuals_csv(const ResidualCurve& rc);
std::string generator_convergence_csv(const GeneratorEstimate& est);

// Writes report.json, linking_curve.csv, residuals.csv and
// generator_convergence.csv into out_dir (created if missing).
void write_run_outputs(const RunOutput& out, const std::string& out_dir);

}  // namespace mcomp
