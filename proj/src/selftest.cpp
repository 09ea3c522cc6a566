#include "mcomp/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mcomp/comparison.hpp"
#include "mcomp/corpus.hpp"
#include "mcomp/generators.hpp"
#include "mcomp/runner.hpp"

namespace mcomp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Harness {
  SelftestResult& result;
  std::ostream& os;

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    SelftestCheck c;
    c.name = name;
    try {
      auto [ok, detail] = body();
      c.passed = ok;
      c.detail = std::move(detail);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("threw: ") + e.what();
    }
    os << (c.passed ? "[ ok ] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n' << std::flush;
    result.checks.push_back(std::move(c));
  }
};

struct DemoBuild {
  Scenario scen;
  TimeGrid grid;
  EvolutionSystem ev_x, ev_y;
};

DemoBuild build_demo(int grid_steps) {
  DemoBuild d;
  d.scen = demo_scenario(grid_steps);
  const ProcessSpec* specs[] = {&d.scen.x, &d.scen.y};
  d.grid = TimeGrid::make(d.scen.horizon, d.scen.grid_steps, specs);
  d.ev_x = build_evolution(d.scen.x, d.grid);
  d.ev_y = build_evolution(d.scen.y, d.grid);
  return d;
}

}  // namespace

SelftestResult run_selftest(bool quick, std::ostream& os) {
  SelftestResult result;
  Harness h{result, os};

  const DemoBuild demo = build_demo(1024);
  const DemoBuild demo_half = build_demo(512);
  const Vec& f = demo.scen.functions[0].values;
  const std::size_t t = demo.grid.size() - 1;

  h.check("demo_blocks_stochastic", [&] {
    const double worst = std::max(demo.ev_x.cert().max_row_sum_err,
                                  demo.ev_y.cert().max_row_sum_err);
    const bool ok = demo.ev_x.cert().stochastic_ok && demo.ev_y.cert().stochastic_ok;
    return std::pair{ok, "worst row-sum err " + fmt(worst)};
  });

  h.check("demo_chapman_kolmogorov", [&] {
    double worst = 0.0;
    const std::size_t q = t / 4;
    for (std::size_t mid : {q, 2 * q, 3 * q})
      worst = std::max(worst, ck_residual(demo.ev_x, 0, mid, t));
    return std::pair{worst <= 1e-12, "worst defect " + fmt(worst)};
  });

  h.check("demo_backward_residual_halving", [&] {
    const ResidualCurve fine = check_backward_equation(demo.ev_x, f, t);
    const ResidualCurve coarse =
        check_backward_equation(demo_half.ev_x, f, demo_half.grid.size() - 1);
    const double ratio = coarse.max_right / fine.max_right;
    return std::pair{ratio >= 1.8, "halving ratio " + fmt(ratio)};
  });

  h.check("demo_integral_representations", [&] {
    const IntegralResidual r = check_integral_representation(demo.ev_x, f, 0, t);
    const double worst = std::max(r.primal, r.dual);
    return std::pair{worst <= 1e-5,
                     "primal " + fmt(r.primal) + ", dual " + fmt(r.dual)};
  });

  ComparisonReport thm4_demo;
  h.check("demo_difference_curve_identity", [&] {
    thm4_demo = check_theorem4(demo.ev_x, demo.ev_y, demo.scen.functions[0], t);
    return std::pair{thm4_demo.representation_residual <= 1e-4,
                     "residual " + fmt(thm4_demo.representation_residual)};
  });

  h.check("demo_generator_richardson", [&] {
    const GeneratorEstimate est =
        estimate_generator(demo.ev_x, demo.grid.index_of(0.5), Side::right);
    const Mat& q = demo.scen.x.rates.at(0.5, Side::right);
    const double err = max_abs_diff(est.estimate, q);
    return std::pair{est.converged && err <= 1e-6,
                     "gap " + fmt(est.richardson_gap) + ", err vs Q " + fmt(err)};
  });

  h.check("piecewise_generator_sides", [&] {
    Scenario pw = demo_piecewise_scenario();
    const ProcessSpec* specs[] = {&pw.x, &pw.y};
    const TimeGrid grid = TimeGrid::make(pw.horizon, pw.grid_steps, specs);
    EvolutionSystem ev = build_evolution(pw.x, grid);
    const std::size_t kb = grid.index_of(0.5);
    const GeneratorEstimate right = estimate_generator(ev, kb, Side::right);
    const GeneratorEstimate left = estimate_generator(ev, kb, Side::left);
    const double err_r = max_abs_diff(right.estimate, pw.x.rates.at(0.5, Side::right));
    const double err_l = max_abs_diff(left.estimate, pw.x.rates.at(0.5, Side::left));
    const bool ok = right.converged && left.converged && err_r <= 1e-6 && err_l <= 1e-6;
    return std::pair{ok, "right err " + fmt(err_r) + ", left err " + fmt(err_l)};
  });

  Scenario pj = purejump_scenario();
  const ProcessSpec* pj_specs[] = {&pj.x, &pj.y};
  const TimeGrid pj_grid = TimeGrid::make(pj.horizon, pj.grid_steps, pj_specs);
  const EvolutionSystem pj_x = build_evolution(pj.x, pj_grid);
  const EvolutionSystem pj_y = build_evolution(pj.y, pj_grid);

  h.check("epoch_left_divergence", [&] {
    const GeneratorEstimate left =
        estimate_generator(pj_x, pj_grid.index_of(0.35), Side::left);
    return std::pair{left.diverged && !left.converged,
                     "gap " + fmt(left.richardson_gap)};
  });

  h.check("demo_expectations_closed_form", [&] {
    const double ex = oracle_expectation(demo.ev_x, f, t);
    const double ey = oracle_expectation(demo.ev_y, f, t);
    const double ex_true = (2.0 / 3.0) * (1.0 - std::exp(-3.0));
    const double ey_true = 0.5 * (1.0 - std::exp(-2.0));
    const double err = std::max(std::abs(ex - ex_true), std::abs(ey - ey_true));
    return std::pair{err <= 1e-9, "err " + fmt(err)};
  });

  h.check("purejump_expectations_closed_form", [&] {
    const std::size_t tj = pj_grid.size() - 1;
    const double ex = oracle_expectation(pj_x, pj.functions[0].values, tj);
    const double ey = oracle_expectation(pj_y, pj.functions[0].values, tj);
    const double err = std::max(std::abs(ex - 0.75), std::abs(ey - 0.51));
    return std::pair{err <= 1e-12, "err " + fmt(err)};
  });

  h.check("demo_verdicts", [&] {
    const auto& fn = demo.scen.functions[0];
    const Verdict v7 = check_theorem7(demo.ev_x, demo.ev_y, fn, t).verdict;
    const Verdict v8 = check_theorem8(demo.ev_x, demo.ev_y, fn, t).verdict;
    const Verdict v9 = check_theorem9(demo.ev_x, demo.ev_y, fn, t).verdict;
    const bool ok = thm4_demo.verdict == Verdict::certified_geq &&
                    v7 == Verdict::certified_geq && v8 == Verdict::certified_geq &&
                    v9 == Verdict::certified_geq;
    return std::pair{ok, std::string("thm4 ") + to_string(thm4_demo.verdict) +
                             ", thm7 " + to_string(v7) + ", thm8 " + to_string(v8) +
                             ", thm9 " + to_string(v9)};
  });

  h.check("purejump_verdicts", [&] {
    const std::size_t tj = pj_grid.size() - 1;
    const Verdict v7 = check_theorem7(pj_x, pj_y, pj.functions[0], tj).verdict;
    const Verdict v10 = check_theorem10(pj_x, pj_y, pj.functions[0], tj).verdict;
    const bool ok = v7 == Verdict::certified_geq && v10 == Verdict::certified_geq;
    return std::pair{ok, std::string("thm7 ") + to_string(v7) + ", thm10 " +
                             to_string(v10)};
  });

  h.check("demo_swap_mirror", [&] {
    // On the structurally ordered pairs both orientations carry full
    // hypotheses, so every verdict must mirror and every margin negate.
    const auto& fn = demo.scen.functions[0];
    std::string bad;
    for (auto* chk : {&check_theorem4, &check_theorem7, &check_theorem8, &check_theorem9}) {
      const ComparisonReport fwd = (*chk)(demo.ev_x, demo.ev_y, fn, t, {});
      const ComparisonReport rev = (*chk)(demo.ev_y, demo.ev_x, fn, t, {});
      if (rev.verdict != flip(fwd.verdict)) bad += " " + fwd.theorem + "[verdict]";
      if (rev.oracle_margin != -fwd.oracle_margin) bad += " " + fwd.theorem + "[margin]";
    }
    const std::size_t tj = pj_grid.size() - 1;
    const ComparisonReport fwd = check_theorem10(pj_x, pj_y, pj.functions[0], tj);
    const ComparisonReport rev = check_theorem10(pj_y, pj_x, pj.functions[0], tj);
    if (rev.verdict != flip(fwd.verdict)) bad += " thm10[verdict]";
    if (rev.oracle_margin != -fwd.oracle_margin) bad += " thm10[margin]";
    if (!bad.empty()) return std::pair{false, "mismatches:" + bad};
    return std::pair{true, std::string("5 checkers mirror exactly")};
  });

  h.check("demo_cone_sweep", [&] {
    const FunctionCone cone = increasing_cone(demo.scen.space);
    const ClassSweepReport sweep = sweep_function_class(demo.ev_x, demo.ev_y, cone, t);
    const bool ok = sweep.propagation_ok && sweep.class_verdict == Verdict::certified_geq;
    return std::pair{ok, std::string("class verdict ") + to_string(sweep.class_verdict) +
                             ", worst generator " + sweep.worst_name};
  });

  // Corpus sweep: every scenario must run without soundness flags, the swap
  // probe must negate every oracle margin exactly and mirror every verdict,
  // the two right-generator machines must agree, and the linking endpoint
  // identity must hold bitwise.
  const std::size_t corpus_n = quick ? 10 : 100;
  const std::vector<Scenario> corpus = soundness_corpus(corpus_n);
  std::vector<RunOutput> runs, swapped_runs;
  runs.reserve(corpus_n);
  swapped_runs.reserve(corpus_n);
  int certified = 0, inconclusive = 0, soundness = 0;
  std::string sound_names;
  for (const Scenario& s : corpus) {
    runs.push_back(run_scenario(s));
    swapped_runs.push_back(run_scenario(swapped(s)));
    const RunOutput& out = runs.back();
    if (out.exit_code == kExitSoundness) { ++soundness; sound_names += " " + s.name; }
    else if (out.exit_code == kExitCertified) ++certified;
    else ++inconclusive;
    if (swapped_runs.back().exit_code == kExitSoundness) {
      ++soundness;
      sound_names += " " + s.name + "(swapped)";
    }
  }
  result.soundness_violations = soundness;

  h.check("corpus_soundness", [&] {
    std::ostringstream d;
    d << corpus_n << " scenarios (+swapped): " << certified << " certified, "
      << inconclusive << " inconclusive, " << soundness << " soundness violations";
    if (soundness > 0) d << ";" << sound_names;
    return std::pair{soundness == 0, d.str()};
  });

  // Swap probe. Margins must negate exactly for every report pair. Verdicts
  // mirror whenever both orientations certify; a certificate present in only
  // one orientation is legitimate exactly when the other orientation lost a
  // hypothesis (the machines' hypothesis sets are orientation-dependent), so
  // the lopsided case must show a failed checked condition.
  h.check("corpus_swap_flip", [&] {
    std::size_t compared = 0;
    std::string bad;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& a = runs[i].reports;
      const auto& b = swapped_runs[i].reports;
      if (a.size() != b.size())
        return std::pair{false, "report count mismatch in " + corpus[i].name};
      for (std::size_t r = 0; r < a.size(); ++r) {
        ++compared;
        const std::string tag = " " + corpus[i].name + "/" + a[r].theorem;
        if (b[r].oracle_margin != -a[r].oracle_margin) bad += tag + "[margin]";
        const bool ca = a[r].verdict != Verdict::inconclusive;
        const bool cb = b[r].verdict != Verdict::inconclusive;
        if (ca && cb && b[r].verdict != flip(a[r].verdict))
          bad += tag + "[direction " + to_string(a[r].verdict) + "->" +
                 to_string(b[r].verdict) + "]";
        if (ca != cb) {
          const auto& weak = ca ? b[r] : a[r];
          bool hypothesis_failed = false;
          for (const auto& c : weak.conditions)
            hypothesis_failed = hypothesis_failed || (c.checked && !c.passed);
          if (!hypothesis_failed) bad += tag + "[lopsided without failed hypothesis]";
        }
      }
    }
    if (!bad.empty()) return std::pair{false, "mismatches:" + bad};
    return std::pair{true, std::to_string(compared) + " report pairs consistent"};
  });

  h.check("thm7_thm9_agreement", [&] {
    std::size_t compared = 0;
    for (const RunOutput& out : runs) {
      for (const ComparisonReport& r7 : out.reports) {
        if (r7.theorem != "thm7") continue;
        for (const ComparisonReport& r9 : out.reports) {
          if (r9.theorem != "thm9" || r9.function_name != r7.function_name ||
              r9.t_knot != r7.t_knot)
            continue;
          ++compared;
          if (r9.verdict != r7.verdict)
            return std::pair{false, "verdicts differ on " + out.scenario.name + "/" +
                                        r7.function_name};
        }
      }
    }
    return std::pair{true, std::to_string(compared) + " report pairs agree"};
  });

  h.check("linking_endpoint_identity", [&] {
    double worst = 0.0;
    std::size_t curves = 0;
    for (const RunOutput& out : runs)
      for (const ComparisonReport& r : out.reports)
        if (r.linking) {
          ++curves;
          worst = std::max(worst, r.linking_endpoint_gap);
        }
    return std::pair{worst == 0.0,
                     std::to_string(curves) + " curves, worst gap " + fmt(worst)};
  });

  result.passed = true;
  for (const SelftestCheck& c : result.checks) result.passed = result.passed && c.passed;
  os << (result.passed ? "selftest: all checks passed"
                       : "selftest: FAILURES present")
     << " (" << result.checks.size() << " checks)\n";
  return result;
}

}  // namespace mcomp
