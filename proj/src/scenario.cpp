#include "mcomp/scenario.hpp"

#include <fstream>

namespace mcomp {

using nlohmann::json;

namespace {

struct Parser {
  std::vector<Diagnostic> diags;

  void err(const std::string& where, const std::string& msg) {
    diags.push_back({Diagnostic::Severity::error, where, msg});
  }

  [[noreturn]] void bail(const std::string& headline) {
    throw ScenarioError(std::move(diags), headline);
  }

  void finish() {
    if (!diags.empty()) bail("scenario is invalid");
  }

  const json* field(const json& j, const std::string& ptr, const std::string& key,
                    bool required) {
    if (!j.is_object()) {
      err(ptr, "expected an object");
      return nullptr;
    }
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) err(ptr + "/" + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  double num(const json& j, const std::string& ptr, double dflt = 0.0) {
    if (!j.is_number()) {
      err(ptr, "expected a number");
      return dflt;
    }
    return j.get<double>();
  }

  Vec vec(const json& j, const std::string& ptr) {
    Vec out;
    if (!j.is_array()) {
      err(ptr, "expected an array of numbers");
      return out;
    }
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(num(j[i], ptr + "/" + std::to_string(i)));
    return out;
  }

  Mat mat(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) {
      err(ptr, "expected a matrix (array of rows)");
      return Mat(1, 1);
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    if (j[0].is_array()) cols = j[0].size();
    if (cols == 0) {
      err(ptr + "/0", "expected a nonempty row");
      return Mat(1, 1);
    }
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string rp = ptr + "/" + std::to_string(i);
      if (!j[i].is_array() || j[i].size() != cols) {
        err(rp, "rows must have equal lengths");
        continue;
      }
      for (std::size_t c = 0; c < cols; ++c)
        m(i, c) = num(j[i][c], rp + "/" + std::to_string(c));
    }
    return m;
  }

  RateModel rates(const json& j, const std::string& ptr, double horizon) {
    const json* model = field(j, ptr, "model", true);
    const std::string kind = model && model->is_string() ? model->get<std::string>() : "";
    try {
      if (kind == "constant") {
        const json* q = field(j, ptr, "q", true);
        if (q) return RateModel::constant(mat(*q, ptr + "/q"), horizon);
      } else if (kind == "piecewise") {
        const json* b = field(j, ptr, "breakpoints", true);
        const json* p = field(j, ptr, "pieces", true);
        if (b && p && p->is_array()) {
          std::vector<Mat> pieces;
          for (std::size_t k = 0; k < p->size(); ++k)
            pieces.push_back(mat((*p)[k], ptr + "/pieces/" + std::to_string(k)));
          return RateModel::piecewise(vec(*b, ptr + "/breakpoints"), std::move(pieces),
                                      horizon);
        }
      } else if (kind == "affine") {
        const json* qa = field(j, ptr, "qa", true);
        const json* qb = field(j, ptr, "qb", true);
        if (qa && qb)
          return RateModel::affine(mat(*qa, ptr + "/qa"), mat(*qb, ptr + "/qb"), horizon);
      } else if (kind == "sampled") {
        const json* t = field(j, ptr, "times", true);
        const json* s = field(j, ptr, "samples", true);
        if (t && s && s->is_array()) {
          std::vector<Mat> samples;
          for (std::size_t k = 0; k < s->size(); ++k)
            samples.push_back(mat((*s)[k], ptr + "/samples/" + std::to_string(k)));
          return RateModel::sampled(vec(*t, ptr + "/times"), std::move(samples), horizon);
        }
      } else {
        err(ptr + "/model",
            "unknown rate model (expected constant|piecewise|affine|sampled)");
      }
    } catch (const std::invalid_argument& e) {
      err(ptr, e.what());
    }
    return RateModel::constant(Mat(1, 1), horizon);  // placeholder after errors
  }

  ProcessSpec process(const json& j, const std::string& ptr, double horizon) {
    ProcessSpec spec{RateModel::constant(Mat(1, 1), horizon), {}, {1.0}};
    const json* r = field(j, ptr, "rates", true);
    if (r) spec.rates = rates(*r, ptr + "/rates", horizon);
    const json* init = field(j, ptr, "initial", true);
    if (init) spec.initial = vec(*init, ptr + "/initial");
    if (const json* jj = field(j, ptr, "jumps", false)) {
      JumpSchedule js;
      const json* t = field(*jj, ptr + "/jumps", "times", true);
      const json* k = field(*jj, ptr + "/jumps", "kernels", true);
      if (t) js.times = vec(*t, ptr + "/jumps/times");
      if (k && k->is_array())
        for (std::size_t e = 0; e < k->size(); ++e)
          js.kernels.push_back(mat((*k)[e], ptr + "/jumps/kernels/" + std::to_string(e)));
      spec.jumps = std::move(js);
    }
    return spec;
  }
};

}  // namespace

Scenario parse_scenario(const json& j) {
  Parser p;
  Scenario s;
  if (!j.is_object()) p.bail("scenario must be a JSON object");

  if (const json* v = p.field(j, "", "version", true)) {
    if (!v->is_string() || v->get<std::string>() != "v1")
      p.err("/version", "unsupported scenario version (expected \"v1\")");
  }
  if (const json* v = p.field(j, "", "name", false))
    s.name = v->is_string() ? v->get<std::string>() : "";
  if (const json* v = p.field(j, "", "horizon", true)) {
    s.horizon = p.num(*v, "/horizon", 1.0);
    if (!(s.horizon > 0.0)) p.err("/horizon", "horizon must be positive");
  }
  if (const json* v = p.field(j, "", "grid_steps", false)) {
    if (!v->is_number_integer() || v->get<int>() < 1)
      p.err("/grid_steps", "grid_steps must be a positive integer");
    else
      s.grid_steps = v->get<int>();
  }
  if (!p.diags.empty()) p.bail("scenario is invalid");

  int n = 0;
  if (const json* ss = p.field(j, "", "state_space", true)) {
    const json* nn = p.field(*ss, "/state_space", "n", true);
    if (nn && nn->is_number_integer() && nn->get<int>() >= 1) {
      n = nn->get<int>();
      std::vector<std::string> labels;
      if (const json* lj = p.field(*ss, "/state_space", "labels", false)) {
        if (lj->is_array())
          for (const auto& l : *lj)
            labels.push_back(l.is_string() ? l.get<std::string>() : "");
      }
      std::vector<std::pair<int, int>> pairs;
      if (const json* oj = p.field(*ss, "/state_space", "order", false)) {
        if (!oj->is_array()) {
          p.err("/state_space/order", "expected an array of [i, j] pairs");
        } else {
          for (std::size_t k = 0; k < oj->size(); ++k) {
            const auto& pr = (*oj)[k];
            if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
                !pr[1].is_number_integer())
              p.err("/state_space/order/" + std::to_string(k), "expected [i, j]");
            else
              pairs.emplace_back(pr[0].get<int>(), pr[1].get<int>());
          }
        }
      }
      try {
        s.space = StateSpace::make(n, std::move(labels), std::move(pairs));
      } catch (const std::invalid_argument& e) {
        p.err("/state_space", e.what());
      }
    } else {
      p.err("/state_space/n", "n must be a positive integer");
    }
  }
  if (!p.diags.empty()) p.bail("scenario is invalid");

  if (const json* xj = p.field(j, "", "x", true)) s.x = p.process(*xj, "/x", s.horizon);
  if (const json* yj = p.field(j, "", "y", true)) s.y = p.process(*yj, "/y", s.horizon);

  if (const json* fj = p.field(j, "", "functions", true)) {
    if (!fj->is_array() || fj->empty()) {
      p.err("/functions", "need at least one test function");
    } else {
      for (std::size_t k = 0; k < fj->size(); ++k) {
        const std::string fp = "/functions/" + std::to_string(k);
        TestFunction f;
        if (const json* nmj = p.field((*fj)[k], fp, "name", false))
          f.name = nmj->is_string() ? nmj->get<std::string>() : "";
        if (f.name.empty()) f.name = "f" + std::to_string(k);
        if (const json* vj = p.field((*fj)[k], fp, "values", true))
          f.values = p.vec(*vj, fp + "/values");
        if (static_cast<int>(f.values.size()) != n)
          p.err(fp + "/values", "function length does not match state count");
        s.functions.push_back(std::move(f));
      }
    }
  }

  if (const json* hj = p.field(j, "", "horizons", false)) {
    s.horizons = p.vec(*hj, "/horizons");
    for (std::size_t k = 0; k < s.horizons.size(); ++k)
      if (s.horizons[k] < 0.0 || s.horizons[k] > s.horizon + 1e-12)
        p.err("/horizons/" + std::to_string(k), "target time outside [0, horizon]");
  }
  if (s.horizons.empty()) s.horizons.push_back(s.horizon);

  if (const json* tj = p.field(j, "", "theorems", false)) {
    if (!tj->is_array()) {
      p.err("/theorems", "expected an array of theorem names");
    } else {
      for (std::size_t k = 0; k < tj->size(); ++k) {
        const auto& v = (*tj)[k];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name != "thm4" && name != "thm7" && name != "thm8" && name != "thm9" &&
            name != "thm10")
          p.err("/theorems/" + std::to_string(k),
                "unknown theorem (expected thm4|thm7|thm8|thm9|thm10)");
        else
          s.theorems.push_back(name);
      }
    }
  }
  if (s.theorems.empty()) s.theorems = {"thm4", "thm7", "thm8", "thm9"};

  if (const json* cj = p.field(j, "", "cone", false)) {
    ConeRequest cr;
    if (const json* kj = p.field(*cj, "/cone", "kind", true))
      cr.kind = kj->is_string() ? kj->get<std::string>() : "";
    if (cr.kind != "increasing" && cr.kind != "all_bounded" && cr.kind != "custom")
      p.err("/cone/kind", "unknown cone kind (expected increasing|all_bounded|custom)");
    if (cr.kind == "custom") {
      if (const json* gj = p.field(*cj, "/cone", "generators", true)) {
        if (!gj->is_array() || gj->empty()) {
          p.err("/cone/generators", "custom cone needs generators");
        } else {
          for (std::size_t k = 0; k < gj->size(); ++k) {
            const std::string gp = "/cone/generators/" + std::to_string(k);
            TestFunction g;
            g.name = "g" + std::to_string(k);
            if (const json* nmj = p.field((*gj)[k], gp, "name", false))
              if (nmj->is_string()) g.name = nmj->get<std::string>();
            if (const json* vj = p.field((*gj)[k], gp, "values", true))
              g.values = p.vec(*vj, gp + "/values");
            if (static_cast<int>(g.values.size()) != n)
              p.err(gp + "/values", "generator length does not match state count");
            cr.generators.push_back(std::move(g));
          }
        }
      }
    }
    if (cr.kind == "increasing" && !s.space.has_order())
      p.err("/cone", "increasing cone needs a state-space order");
    s.cone = std::move(cr);
  }

  if (const json* mj = p.field(j, "", "montecarlo", false)) {
    s.mc.enabled = true;
    if (const json* pj = p.field(*mj, "/montecarlo", "paths", false)) {
      if (!pj->is_number_integer() || pj->get<long long>() < 1)
        p.err("/montecarlo/paths", "paths must be a positive integer");
      else
        s.mc.paths = static_cast<std::size_t>(pj->get<long long>());
    }
    if (const json* sj = p.field(*mj, "/montecarlo", "seed", false)) {
      if (!sj->is_number_integer())
        p.err("/montecarlo/seed", "seed must be an integer");
      else
        s.mc.seed = sj->get<std::uint64_t>();
    }
    if (const json* cj = p.field(*mj, "/montecarlo", "checkpoints", false)) {
      s.mc.checkpoints = p.vec(*cj, "/montecarlo/checkpoints");
      for (std::size_t k = 0; k < s.mc.checkpoints.size(); ++k)
        if (s.mc.checkpoints[k] < 0.0 || s.mc.checkpoints[k] > s.horizon + 1e-12)
          p.err("/montecarlo/checkpoints/" + std::to_string(k),
                "checkpoint outside [0, horizon]");
    }
  }
  if (s.mc.checkpoints.empty())
    s.mc.checkpoints = {0.0, 0.5 * s.horizon, s.horizon};

  // Structural validation of both processes, reported under their pointers.
  for (const auto& [spec, prefix] : {std::pair<const ProcessSpec*, const char*>{&s.x, "/x"},
                                     {&s.y, "/y"}}) {
    if (static_cast<int>(spec->initial.size()) == n && spec->rates.dim() != n)
      p.err(std::string(prefix) + "/rates", "rate matrix dimension does not match n");
    for (auto d : validate(*spec)) {
      d.where = prefix + d.where;
      p.diags.push_back(std::move(d));
    }
  }
  p.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioError({{Diagnostic::Severity::error, "", "cannot open file: " + path}},
                        "cannot open scenario file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ScenarioError({{Diagnostic::Severity::error, "", e.what()}},
                        "scenario is not valid JSON");
  }
  return parse_scenario(j);
}

namespace {

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json rates_to_json(const RateModel& r) {
  json j;
  switch (r.variant()) {
    case RateModel::Variant::constant:
      j["model"] = "constant";
      j["q"] = mat_to_json(r.pieces()[0]);
      break;
    case RateModel::Variant::piecewise: {
      j["model"] = "piecewise";
      j["breakpoints"] = r.kinks();
      json pieces = json::array();
      for (const auto& m : r.pieces()) pieces.push_back(mat_to_json(m));
      j["pieces"] = std::move(pieces);
      break;
    }
    case RateModel::Variant::affine:
      j["model"] = "affine";
      j["qa"] = mat_to_json(r.affine_a());
      j["qb"] = mat_to_json(r.affine_b());
      break;
    case RateModel::Variant::sampled: {
      j["model"] = "sampled";
      j["times"] = r.sample_times();
      json samples = json::array();
      for (const auto& m : r.pieces()) samples.push_back(mat_to_json(m));
      j["samples"] = std::move(samples);
      break;
    }
  }
  return j;
}

json process_to_json(const ProcessSpec& spec) {
  json j;
  j["rates"] = rates_to_json(spec.rates);
  j["initial"] = spec.initial;
  if (spec.jumps) {
    json js;
    js["times"] = spec.jumps->times;
    json kernels = json::array();
    for (const auto& k : spec.jumps->kernels) kernels.push_back(mat_to_json(k));
    js["kernels"] = std::move(kernels);
    j["jumps"] = std::move(js);
  }
  return j;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  json j;
  j["version"] = "v1";
  j["name"] = s.name;
  j["horizon"] = s.horizon;
  j["grid_steps"] = s.grid_steps;
  json ss;
  ss["n"] = s.space.size();
  if (!s.space.labels().empty()) ss["labels"] = s.space.labels();
  if (s.space.has_order()) {
    json pairs = json::array();
    for (int a = 0; a < s.space.size(); ++a)
      for (int b = 0; b < s.space.size(); ++b)
        if (a != b && s.space.leq(a, b)) pairs.push_back(json::array({a, b}));
    ss["order"] = std::move(pairs);
  }
  j["state_space"] = std::move(ss);
  j["x"] = process_to_json(s.x);
  j["y"] = process_to_json(s.y);
  json fns = json::array();
  for (const auto& f : s.functions) fns.push_back({{"name", f.name}, {"values", f.values}});
  j["functions"] = std::move(fns);
  j["horizons"] = s.horizons;
  j["theorems"] = s.theorems;
  if (s.cone) {
    json c;
    c["kind"] = s.cone->kind;
    if (s.cone->kind == "custom") {
      json gens = json::array();
      for (const auto& g : s.cone->generators)
        gens.push_back({{"name", g.name}, {"values", g.values}});
      c["generators"] = std::move(gens);
    }
    j["cone"] = std::move(c);
  }
  if (s.mc.enabled) {
    j["montecarlo"] = {{"paths", s.mc.paths},
                       {"seed", s.mc.seed},
                       {"checkpoints", s.mc.checkpoints}};
  }
  return j;
}

Scenario swapped(Scenario s) {
  std::swap(s.x, s.y);
  return s;
}

json scenario_schema() {
  // Hand-maintained JSON Schema for the v1 scenario format.
  static const char* text = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "comparison scenario (v1)",
  "type": "object",
  "required": ["version", "horizon", "state_space", "x", "y", "functions"],
  "properties": {
    "version": {"const": "v1"},
    "name": {"type": "string"},
    "horizon": {"type": "number", "exclusiveMinimum": 0},
    "grid_steps": {"type": "integer", "minimum": 1, "default": 512},
    "state_space": {
      "type": "object",
      "required": ["n"],
      "properties": {
        "n": {"type": "integer", "minimum": 1},
        "labels": {"type": "array", "items": {"type": "string"}},
        "order": {
          "type": "array",
          "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
          "description": "pairs [i, j] meaning state i precedes state j; closed transitively"
        }
      }
    },
    "x": {"$ref": "#/definitions/process"},
    "y": {"$ref": "#/definitions/process"},
    "functions": {
      "type": "array", "minItems": 1,
      "items": {
        "type": "object", "required": ["values"],
        "properties": {"name": {"type": "string"},
                        "values": {"type": "array", "items": {"type": "number"}}}
      }
    },
    "horizons": {"type": "array", "items": {"type": "number", "minimum": 0},
                  "description": "target times t; defaults to [horizon]"},
    "theorems": {"type": "array",
                  "items": {"enum": ["thm4", "thm7", "thm8", "thm9", "thm10"]},
                  "description": "defaults to [thm4, thm7, thm8, thm9]"},
    "cone": {
      "type": "object", "required": ["kind"],
      "properties": {
        "kind": {"enum": ["increasing", "all_bounded", "custom"]},
        "generators": {"type": "array", "items": {"type": "object",
          "required": ["values"],
          "properties": {"name": {"type": "string"},
                          "values": {"type": "array", "items": {"type": "number"}}}}}
      }
    },
    "montecarlo": {
      "type": "object",
      "properties": {
        "paths": {"type": "integer", "minimum": 1, "default": 100000},
        "seed": {"type": "integer", "default": 20250814},
        "checkpoints": {"type": "array", "items": {"type": "number", "minimum": 0},
                         "description": "defaults to [0, horizon/2, horizon]"}
      }
    }
  },
  "definitions": {
    "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "process": {
      "type": "object",
      "required": ["rates", "initial"],
      "properties": {
        "rates": {
          "type": "object",
          "required": ["model"],
          "oneOf": [
            {"properties": {"model": {"const": "constant"},
                             "q": {"$ref": "#/definitions/matrix"}},
              "required": ["model", "q"]},
            {"properties": {"model": {"const": "piecewise"},
                             "breakpoints": {"type": "array", "items": {"type": "number"}},
                             "pieces": {"type": "array", "items": {"$ref": "#/definitions/matrix"}}},
              "required": ["model", "breakpoints", "pieces"]},
            {"properties": {"model": {"const": "affine"},
                             "qa": {"$ref": "#/definitions/matrix"},
                             "qb": {"$ref": "#/definitions/matrix"}},
              "required": ["model", "qa", "qb"]},
            {"properties": {"model": {"const": "sampled"},
                             "times": {"type": "array", "items": {"type": "number"}},
                             "samples": {"type": "array", "items": {"$ref": "#/definitions/matrix"}}},
              "required": ["model", "times", "samples"]}
          ]
        },
        "initial": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "jumps": {
          "type": "object",
          "required": ["times", "kernels"],
          "properties": {
            "times": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            "kernels": {"type": "array", "items": {"$ref": "#/definitions/matrix"}}
          }
        }
      }
    }
  }
})json";
  return json::parse(text);
}

}  // namespace mcomp
