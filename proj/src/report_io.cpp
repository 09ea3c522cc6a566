#include "mcomp/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mcomp {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

json witness_json(const Witness& w) {
  json j;
  j["time"] = w.time;
  j["knot"] = w.knot;
  if (w.state >= 0) j["state"] = w.state;
  j["value"] = w.value;
  j["what"] = w.what;
  return j;
}

json condition_json(const ConditionReport& c) {
  json j;
  j["name"] = c.name;
  j["checked"] = c.checked;
  j["passed"] = c.passed;
  j["margin"] = c.margin;
  if (c.witness) j["witness"] = witness_json(*c.witness);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json report_json(const ComparisonReport& r) {
  json j;
  j["theorem"] = r.theorem;
  j["function"] = r.function_name;
  j["time"] = r.time;
  j["verdict"] = to_string(r.verdict);
  j["conditions"] = json::array();
  for (const auto& c : r.conditions) j["conditions"].push_back(condition_json(c));
  j["e_x"] = r.e_x;
  j["e_y"] = r.e_y;
  j["oracle_margin"] = r.oracle_margin;
  j["oracle_consistent"] = r.oracle_consistent;
  j["soundness_violation"] = r.soundness_violation;
  j["witnesses"] = json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(witness_json(w));
  if (r.linking) {
    j["linking_curve"] = {{"s", r.linking->s}, {"g", r.linking->g}};
    j["linking_endpoint_gap"] = r.linking_endpoint_gap;
  }
  if (r.theorem == "thm4") j["representation_residual"] = r.representation_residual;
  return j;
}

json cert_json(const EvolutionCert& c) {
  return {{"max_row_sum_err", c.max_row_sum_err},
          {"min_entry", c.min_entry},
          {"max_ode_error", c.max_ode_error},
          {"max_substeps", c.max_substeps},
          {"ode_converged", c.ode_converged},
          {"stochastic_ok", c.stochastic_ok}};
}

json cells_json(const MartingaleTestResult& m) {
  json cells = json::array();
  for (const auto& c : m.cells) {
    json jc = {{"s", c.s},      {"t", c.t},   {"state", c.state}, {"count", c.count},
               {"mean", c.mean}, {"se", c.se}, {"z", std::isfinite(c.z) ? c.z : 1e308},
               {"skipped", c.skipped}};
    cells.push_back(std::move(jc));
  }
  return cells;
}

json mart_json(const MartingaleTestResult& m) {
  return {{"checkpoints", m.checkpoints},
          {"mode", m.mode == TestMode::two_sided ? "two_sided"
                   : m.mode == TestMode::upper   ? "upper"
                                                 : "lower"},
          {"z_max", m.z_max},
          {"worst_z", m.worst_z},
          {"tested_cells", m.tested_cells},
          {"skipped_cells", m.skipped_cells},
          {"passed", m.passed},
          {"cells", cells_json(m)}};
}

json probe_json(const GeneratorProbe& p) {
  json table = json::array();
  for (const auto& q : p.est.table) table.push_back({{"h", q.h}, {"gap", q.gap}});
  return {{"label", p.label},
          {"s", p.est.s},
          {"side", p.est.side == Side::right ? "right" : "left"},
          {"richardson_gap", p.est.richardson_gap},
          {"converged", p.est.converged},
          {"diverged", p.est.diverged},
          {"quotients", std::move(table)}};
}

}  // namespace

json run_output_to_json(const RunOutput& out) {
  json j;
  j["schema"] = "report-v1";
  j["scenario"] = {{"name", out.scenario.name},
                   {"horizon", out.scenario.horizon},
                   {"grid_steps", out.scenario.grid_steps},
                   {"knots", out.grid.size()}};
  j["certificates"] = {{"x", cert_json(out.cert_x)},
                       {"y", cert_json(out.cert_y)},
                       {"ck_residual", out.ck_worst}};
  j["results"] = json::array();
  for (const auto& r : out.reports) j["results"].push_back(report_json(r));
  if (out.sweep) {
    const auto& sw = *out.sweep;
    json js;
    js["propagation_ok"] = sw.propagation_ok;
    if (sw.propagation_witness)
      js["propagation_witness"] = witness_json(*sw.propagation_witness);
    if (!sw.propagation_note.empty()) js["note"] = sw.propagation_note;
    js["class_verdict"] = to_string(sw.class_verdict);
    js["worst_generator"] = sw.worst_name;
    js["worst_margin"] = sw.worst_margin;
    json gens = json::array();
    for (const auto& r : sw.per_generator)
      gens.push_back({{"function", r.function_name},
                      {"verdict", to_string(r.verdict)},
                      {"oracle_margin", r.oracle_margin}});
    js["per_generator"] = std::move(gens);
    j["sweep"] = std::move(js);
  }
  json probes = json::array();
  for (const auto& p : out.generator_probes) probes.push_back(probe_json(p));
  j["generator_probes"] = std::move(probes);
  if (out.mc.enabled) {
    json m;
    m["paths"] = out.mc.paths;
    m["seed"] = out.mc.seed;
    m["martingale_x"] = mart_json(out.mc.mart_x);
    m["martingale_y"] = mart_json(out.mc.mart_y);
    m["spacetime_x"] = mart_json(out.mc.spacetime_x);
    if (out.mc.linking_ran) {
      m["linking"] = {{"drift", mart_json(out.mc.linking.drift)},
                      {"endpoint_gap", out.mc.linking.endpoint_gap},
                      {"max_curve_z", out.mc.linking.max_curve_z},
                      {"curve_ok", out.mc.linking.curve_ok},
                      {"detected", out.mc.linking.detected},
                      {"passed", out.mc.linking.passed}};
    }
    j["montecarlo"] = std::move(m);
  }
  j["summary"] = out.summary;
  j["exit_code"] = out.exit_code;
  return j;
}

std::string linking_curve_csv(const LinkingCurve& lc) {
  std::string out = "s,g\n";
  for (std::size_t k = 0; k < lc.s.size(); ++k)
    out += format_double(lc.s[k]) + "," + format_double(lc.g[k]) + "\n";
  return out;
}

std::string residuals_csv(const ResidualCurve& rc) {
  std::string out = "s,residual_right,residual_left\n";
  for (std::size_t k = 0; k < rc.s.size(); ++k)
    out += format_double(rc.s[k]) + "," + format_double(rc.right[k]) + "," +
           format_double(rc.left[k]) + "\n";
  return out;
}

std::string generator_convergence_csv(const GeneratorEstimate& est) {
  std::string out = "h,gap\n";
  // Row per quotient refinement; the first has no predecessor to compare to.
  for (std::size_t k = 1; k < est.table.size(); ++k)
    out += format_double(est.table[k].h) + "," + format_double(est.table[k].gap) + "\n";
  return out;
}

void write_run_outputs(const RunOutput& out, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);

  write_text_atomic((dir / "report.json").string(), run_output_to_json(out).dump(2) + "\n");
  write_text_atomic((dir / "residuals.csv").string(), residuals_csv(out.residuals));

  const LinkingCurve* lc = nullptr;
  for (const auto& r : out.reports)
    if (r.linking) {
      lc = &*r.linking;
      break;
    }
  if (lc) write_text_atomic((dir / "linking_curve.csv").string(), linking_curve_csv(*lc));

  if (!out.generator_probes.empty())
    write_text_atomic((dir / "generator_convergence.csv").string(),
                      generator_convergence_csv(out.generator_probes.front().est));
}

}  // namespace mcomp
