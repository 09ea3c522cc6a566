#include "mcomp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mcomp {

namespace {

ComparisonReport inapplicable(const std::string& theorem, const TestFunction& f,
                              double time, const std::string& why) {
  ComparisonReport rep;
  rep.theorem = theorem;
  rep.function_name = f.name;
  rep.time = time;
  rep.verdict = Verdict::inconclusive;
  rep.conditions.push_back({"applicable", false, false, 0.0, std::nullopt, why});
  rep.oracle_consistent = true;
  return rep;
}

ComparisonReport run_one(const std::string& theorem, const EvolutionSystem& evx,
                         const EvolutionSystem& evy, const TestFunction& f,
                         std::size_t t_knot) {
  if (theorem == "thm4") return check_theorem4(evx, evy, f, t_knot);
  if (theorem == "thm7") return check_theorem7(evx, evy, f, t_knot);
  if (theorem == "thm8") return check_theorem8(evx, evy, f, t_knot);
  if (theorem == "thm9") return check_theorem9(evx, evy, f, t_knot);
  if (theorem == "thm10") return check_theorem10(evx, evy, f, t_knot);
  throw std::invalid_argument("unknown theorem: " + theorem);
}

FunctionCone build_cone(const ConeRequest& req, const StateSpace& space) {
  if (req.kind == "increasing") return increasing_cone(space);
  if (req.kind == "all_bounded") return all_bounded_cone(space);
  return custom_cone(space, req.generators);
}

}  // namespace

RunOutput run_scenario(const Scenario& s, Exec exec) {
  RunOutput out;
  out.scenario = s;

  // One grid shared by both processes: uniform steps plus every kink, epoch,
  // requested horizon and Monte Carlo checkpoint.
  std::vector<double> checkpoints = s.mc.checkpoints;
  if (checkpoints.empty()) checkpoints = {0.0, 0.5 * s.horizon, s.horizon};
  std::vector<double> extra = s.horizons;
  if (s.mc.enabled)
    extra.insert(extra.end(), checkpoints.begin(), checkpoints.end());
  const ProcessSpec* specs[] = {&s.x, &s.y};
  out.grid = TimeGrid::make(s.horizon, s.grid_steps, specs, extra);

  const EvolutionSystem evx = build_evolution(s.x, out.grid, 1e-12, exec);
  const EvolutionSystem evy = build_evolution(s.y, out.grid, 1e-12, exec);
  out.cert_x = evx.cert();
  out.cert_y = evy.cert();

  // Chapman-Kolmogorov spot check over quartile triples.
  {
    const std::size_t last = out.grid.size() - 1;
    const std::set<std::size_t> probes{0, last / 4, last / 2, 3 * last / 4, last};
    std::vector<std::size_t> ks(probes.begin(), probes.end());
    for (std::size_t a = 0; a < ks.size(); ++a)
      for (std::size_t b = a + 1; b < ks.size(); ++b)
        for (std::size_t c = b + 1; c < ks.size(); ++c) {
          out.ck_worst = std::max(out.ck_worst, ck_residual(evx, ks[a], ks[b], ks[c]));
          out.ck_worst = std::max(out.ck_worst, ck_residual(evy, ks[a], ks[b], ks[c]));
        }
  }

  for (const TestFunction& f : s.functions)
    for (double t : s.horizons) {
      const std::size_t t_knot = out.grid.index_of(t);
      for (const std::string& thm : s.theorems) {
        try {
          out.reports.push_back(run_one(thm, evx, evy, f, t_knot));
        } catch (const std::invalid_argument& e) {
          out.reports.push_back(inapplicable(thm, f, t, e.what()));
        }
      }
    }

  if (s.cone) {
    const std::size_t t_knot = out.grid.index_of(s.horizons.front());
    try {
      out.sweep =
          sweep_function_class(evx, evy, build_cone(*s.cone, s.space), t_knot, {}, exec);
    } catch (const std::invalid_argument&) {
      out.sweep.reset();
    }
  }

  // Backward-equation residual curve for the first question, on X.
  out.residuals = check_backward_equation(evx, s.functions.front().values,
                                          out.grid.index_of(s.horizons.front()));

  // Generator probes: start, midpoint (both sides), each X-kink (both
  // sides), and the first epoch (left side diverges there by design).
  {
    auto probe = [&](std::size_t knot, Side side, const std::string& label) {
      if (side == Side::right && knot + 1 >= out.grid.size()) return;
      if (side == Side::left && knot == 0) return;
      out.generator_probes.push_back({label, estimate_generator(evx, knot, side)});
    };
    const std::size_t mid = out.grid.index_of(
        *std::min_element(out.grid.knots().begin(), out.grid.knots().end(),
                          [&](double a, double b) {
                            return std::abs(a - 0.5 * s.horizon) <
                                   std::abs(b - 0.5 * s.horizon);
                          }));
    probe(0, Side::right, "right@0");
    probe(mid, Side::right, "right@mid");
    probe(mid, Side::left, "left@mid");
    for (double kink : s.x.rates.kinks()) {
      std::ostringstream lab;
      lab << "kink@" << kink;
      probe(out.grid.index_of(kink), Side::right, "right_" + lab.str());
      probe(out.grid.index_of(kink), Side::left, "left_" + lab.str());
    }
    if (s.x.jumps && !s.x.jumps->times.empty()) {
      const double e0 = s.x.jumps->times.front();
      std::ostringstream lab;
      lab << "epoch@" << e0;
      probe(out.grid.index_of(e0), Side::left, "left_" + lab.str());
      probe(out.grid.index_of(e0), Side::right, "right_" + lab.str());
    }
  }

  if (s.mc.enabled) {
    out.mc.enabled = true;
    out.mc.paths = s.mc.paths;
    out.mc.seed = s.mc.seed;
    const auto paths_x = simulate(s.x, s.mc.paths, s.mc.seed, exec);
    const auto paths_y = simulate(s.y, s.mc.paths, s.mc.seed ^ 0x517cc1b727220a95ULL, exec);
    const Vec& f0 = s.functions.front().values;
    out.mc.mart_x = martingale_test(paths_x, s.x, f0, checkpoints);
    out.mc.mart_y = martingale_test(paths_y, s.y, f0, checkpoints);

    const std::size_t t_knot = out.grid.index_of(s.horizons.front());
    std::vector<std::size_t> cks;
    for (double c : checkpoints) {
      const std::size_t k = out.grid.index_of(c);
      if (k <= t_knot) cks.push_back(k);
    }
    std::sort(cks.begin(), cks.end());
    cks.erase(std::unique(cks.begin(), cks.end()), cks.end());
    if (cks.empty() || cks.back() != t_knot) cks.push_back(t_knot);

    {
      std::vector<Vec> u = evx.backward_solution(f0, t_knot);
      // (t, f)-indexed curve padded to the full grid for the space-time test.
      std::vector<Vec> u_full(out.grid.size(), Vec(s.x.dim(), 0.0));
      for (std::size_t k = 0; k <= t_knot; ++k) u_full[k] = u[k];
      for (std::size_t k = t_knot + 1; k < out.grid.size(); ++k) u_full[k] = f0;
      std::vector<std::size_t> st_knots(cks.begin(), cks.end());
      out.mc.spacetime_x = spacetime_martingale_test(paths_x, s.x, out.grid, u_full,
                                                     st_knots);
    }

    // Linking drift test in the certified direction, if any martingale-
    // machine verdict certifies the first question.
    Verdict dir = Verdict::inconclusive;
    for (const auto& r : out.reports)
      if ((r.theorem == "thm7" || r.theorem == "thm9" || r.theorem == "thm8") &&
          r.function_name == s.functions.front().name &&
          r.t_knot == t_knot && r.verdict != Verdict::inconclusive) {
        dir = r.verdict;
        break;
      }
    if (dir != Verdict::inconclusive) {
      const TestMode mode = dir == Verdict::certified_geq ? TestMode::upper
                            : dir == Verdict::certified_leq ? TestMode::lower
                                                            : TestMode::two_sided;
      out.mc.linking =
          linking_supermartingale_test(paths_y, evx, evy, f0, t_knot, cks, 4.0, mode);
      out.mc.linking_ran = true;
    }
  }

  // Exit code: numerics first, then certificates.
  bool soundness = !out.cert_x.stochastic_ok || !out.cert_y.stochastic_ok;
  for (const auto& r : out.reports) soundness = soundness || r.soundness_violation;
  if (out.mc.linking_ran && !out.mc.linking.passed) soundness = true;
  if (out.mc.enabled && (!out.mc.mart_x.passed || !out.mc.mart_y.passed))
    soundness = true;

  bool all_questions_certified = true;
  for (const TestFunction& f : s.functions)
    for (double t : s.horizons) {
      bool any = false;
      for (const auto& r : out.reports)
        if (r.function_name == f.name && std::abs(r.time - t) < 1e-12 &&
            r.verdict != Verdict::inconclusive)
          any = true;
      all_questions_certified = all_questions_certified && any;
    }

  if (soundness)
    out.exit_code = kExitSoundness;
  else
    out.exit_code = all_questions_certified ? kExitCertified : kExitInconclusive;

  std::ostringstream sum;
  int certified = 0, inconclusive = 0, violations = 0;
  for (const auto& r : out.reports) {
    if (r.verdict != Verdict::inconclusive) ++certified;
    else ++inconclusive;
    if (r.soundness_violation) ++violations;
  }
  sum << out.reports.size() << " checks: " << certified << " certified, "
      << inconclusive << " inconclusive, " << violations << " soundness violations";
  out.summary = sum.str();
  return out;
}

}  // namespace mcomp
