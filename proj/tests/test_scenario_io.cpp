#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mcomp/corpus.hpp"
#include "mcomp/report_io.hpp"
#include "mcomp/runner.hpp"
#include "mcomp/scenario.hpp"

using namespace mcomp;
using nlohmann::json;

namespace {

json demo_json() { return scenario_to_json(demo_scenario(128)); }

// First diagnostic pointer produced for a mutated scenario document.
std::string first_pointer(json j) {
  try {
    parse_scenario(j);
  } catch (const ScenarioError& e) {
    REQUIRE_FALSE(e.diagnostics.empty());
    return e.diagnostics.front().where;
  }
  return "(no error)";
}

}  // namespace

TEST_CASE("scenario round-trips through json") {
  const Scenario s = demo_scenario(128);
  const Scenario r = parse_scenario(scenario_to_json(s));
  CHECK(r.name == s.name);
  CHECK(r.horizon == s.horizon);
  CHECK(r.grid_steps == s.grid_steps);
  CHECK(r.space.size() == s.space.size());
  CHECK(r.space.labels() == s.space.labels());
  CHECK(r.space.leq(0, 1));
  CHECK(r.x.rates.at(0.0) == s.x.rates.at(0.0));
  CHECK(r.y.rates.at(0.0) == s.y.rates.at(0.0));
  CHECK(r.x.initial == s.x.initial);
  REQUIRE(r.functions.size() == s.functions.size());
  CHECK(r.functions[0].values == s.functions[0].values);
  CHECK(r.horizons == s.horizons);
  CHECK(r.theorems == s.theorems);
  REQUIRE(r.cone.has_value());
  CHECK(r.cone->kind == "increasing");
  CHECK(r.mc.enabled == s.mc.enabled);
  CHECK(r.mc.paths == s.mc.paths);
  CHECK(r.mc.seed == s.mc.seed);
  CHECK(r.mc.checkpoints == s.mc.checkpoints);

  // Jump schedules survive the trip too.
  const Scenario pj = purejump_scenario(64);
  const Scenario pr = parse_scenario(scenario_to_json(pj));
  REQUIRE(pr.x.jumps.has_value());
  CHECK(pr.x.jumps->times == pj.x.jumps->times);
  CHECK(pr.x.jumps->kernels == pj.x.jumps->kernels);
}

TEST_CASE("swapped exchanges the processes") {
  const Scenario s = demo_scenario(128);
  const Scenario w = swapped(s);
  CHECK(w.x.rates.at(0.0) == s.y.rates.at(0.0));
  CHECK(w.y.rates.at(0.0) == s.x.rates.at(0.0));
  CHECK(w.x.initial == s.y.initial);
  CHECK(w.horizon == s.horizon);
}

TEST_CASE("parse errors carry json pointers") {
  CHECK(first_pointer([] { auto j = demo_json(); j.erase("horizon"); return j; }()) ==
        "/horizon");
  CHECK(first_pointer([] { auto j = demo_json(); j["version"] = "v2"; return j; }()) ==
        "/version");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["functions"][0]["values"] = {0.0, 1.0, 2.0};
          return j;
        }()) == "/functions/0/values");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["x"]["rates"]["q"][0][1] = -2.0;
          return j;
        }()) == "/x/rates/q");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["cone"]["kind"] = "mystery";
          return j;
        }()) == "/cone/kind");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["montecarlo"]["paths"] = 0;
          return j;
        }()) == "/montecarlo/paths");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["theorems"] = {"thm4", "thm11"};
          return j;
        }()) == "/theorems/1");
  CHECK(first_pointer([] {
          auto j = demo_json();
          j["horizons"] = {2.5};  // beyond the horizon
          return j;
        }()) == "/horizons/0");
}

TEST_CASE("load_scenario reports missing files as invalid input") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), ScenarioError);
}

TEST_CASE("schema is valid json and pins the version") {
  const json s = scenario_schema();
  CHECK(s.contains("properties"));
  CHECK(s["properties"]["version"]["const"] == "v1");
  CHECK(s["properties"]["grid_steps"]["type"] == "integer");
}

TEST_CASE("format_double produces shortest round-trip decimals") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.25) == "-0.25");
  const double v = 0.6334752877547661;
  CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()).empty());
}

TEST_CASE("write_text_atomic leaves no temporaries behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mcomp_io_test";
  fs::create_directories(dir);
  const fs::path file = dir / "payload.txt";

  write_text_atomic(file.string(), "first\n");
  write_text_atomic(file.string(), "second\n");
  std::ifstream in(file);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path() == file);
  }
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("csv artifacts have the pinned headers and separators") {
  Scenario s = demo_scenario(64);
  s.mc.enabled = false;
  const RunOutput out = run_scenario(s);

  REQUIRE(out.reports.size() >= 2);
  const auto* linked = [&]() -> const ComparisonReport* {
    for (const auto& r : out.reports)
      if (r.linking) return &r;
    return nullptr;
  }();
  REQUIRE(linked != nullptr);

  const std::string lc = linking_curve_csv(*linked->linking);
  CHECK(lc.rfind("s,g\n", 0) == 0);
  CHECK(lc.find(';') == std::string::npos);

  const std::string rc = residuals_csv(out.residuals);
  CHECK(rc.rfind("s,residual_right,residual_left\n", 0) == 0);
  // NaN cells (one-sided quotients at the ends) are empty fields.
  CHECK(rc.find("nan") == std::string::npos);
  const auto nl1 = rc.find('\n');
  const auto nl2 = rc.find('\n', nl1 + 1);
  const std::string row0 = rc.substr(nl1 + 1, nl2 - nl1 - 1);
  CHECK(row0.rfind("0,", 0) == 0);
  CHECK(row0.back() == ',');  // left quotient undefined at s=0

  REQUIRE_FALSE(out.generator_probes.empty());
  const std::string gc = generator_convergence_csv(out.generator_probes[0].est);
  CHECK(gc.rfind("h,gap\n", 0) == 0);
  // One row per refinement that has a predecessor: dt/2, dt/4, dt/8.
  CHECK(std::count(gc.begin(), gc.end(), '\n') == 4);
}

TEST_CASE("report json carries the full result tree") {
  Scenario s = purejump_scenario(64);
  s.mc.enabled = false;
  const RunOutput out = run_scenario(s);
  const json j = run_output_to_json(out);

  CHECK(j["scenario"]["name"] == s.name);
  CHECK(j["exit_code"] == out.exit_code);
  CHECK(j.contains("summary"));
  CHECK(j["certificates"]["x"]["stochastic_ok"] == true);
  CHECK(j["certificates"]["ck_residual"].get<double>() <= 1e-10);
  REQUIRE(j["results"].is_array());
  REQUIRE_FALSE(j["results"].empty());
  const auto& r0 = j["results"][0];
  CHECK(r0.contains("theorem"));
  CHECK(r0.contains("verdict"));
  CHECK(r0.contains("conditions"));
  CHECK(r0.contains("oracle_margin"));
  CHECK(r0.contains("soundness_violation"));
  for (const auto& res : j["results"])
    if (res["theorem"] == "thm10") {
      CHECK(res["verdict"] == "certified_geq");
      CHECK(std::abs(res["e_x"].get<double>() - 0.75) <= 1e-12);
      CHECK(std::abs(res["e_y"].get<double>() - 0.51) <= 1e-12);
    }
  CHECK_FALSE(j.contains("montecarlo"));  // disabled runs omit the block
}

TEST_CASE("write_run_outputs creates the four artifacts") {
  namespace fs = std::filesystem;
  Scenario s = demo_scenario(64);
  s.mc.enabled = false;
  const RunOutput out = run_scenario(s);
  const fs::path dir = fs::temp_directory_path() / "mcomp_outputs_test";
  fs::remove_all(dir);
  write_run_outputs(out, dir.string());
  for (const char* name : {"report.json", "linking_curve.csv", "residuals.csv",
                           "generator_convergence.csv"})
    CHECK(fs::exists(dir / name));
  // report.json parses back.
  std::ifstream in(dir / "report.json");
  const json j = json::parse(in);
  CHECK(j["scenario"]["name"].get<std::string>() == s.name);
  fs::remove_all(dir);
}

TEST_CASE("exit codes are pinned") {
  CHECK(kExitCertified == 0);
  CHECK(kExitInconclusive == 1);
  CHECK(kExitSoundness == 2);
  CHECK(kExitInvalidInput == 3);
}
