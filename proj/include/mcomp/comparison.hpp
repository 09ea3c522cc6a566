#pragma once
// The two comparison machines. Each checker evaluates every hypothesis of its
// inequality as a numeric condition with margins and witnesses, derives a
// one-sided (or two-sided) certificate, and cross-checks the certified
// conclusion against exact expectations computed from the evolution system.

#include <optional>
#include <string>
#include <vector>

#include "mcomp/evolution.hpp"
#include "mcomp/state_space.hpp"

namespace mcomp {

enum class Verdict { certified_leq, certified_geq, certified_eq, inconclusive };
const char* to_string(Verdict v);

struct Witness {
  double time = 0.0;
  std::size_t knot = 0;
  int state = -1;  // -1: not state-specific
  double value = 0.0;
  std::string what;
};

// Margins are "distance to violation": a condition passes iff
// margin >= -tol. Boolean hypotheses report 0 when satisfied.
struct ConditionReport {
  std::string name;
  bool checked = true;  // false: recorded for information only
  bool passed = false;
  double margin = 0.0;
  std::optional<Witness> witness;
  std::string note;
};

struct LinkingCurve {
  std::vector<double> s;
  std::vector<double> g;  // g(s) = E[ T^X_{s,t} f (Y_s) ]
};

struct ComparisonOptions {
  double hypothesis_tol = 1e-9;  // slack on generator-inequality margins
  double support_eps = 1e-12;    // mass threshold defining supports
  double oracle_tol = 1e-9;      // certified conclusions must hold to this
};

struct ComparisonReport {
  std::string theorem;
  std::string function_name;
  double time = 0.0;
  std::size_t t_knot = 0;
  std::vector<ConditionReport> conditions;
  Verdict verdict = Verdict::inconclusive;
  double e_x = 0.0, e_y = 0.0;  // exact E[f(X_t)], E[f(Y_t)]
  double oracle_margin = 0.0;   // e_x - e_y
  bool oracle_consistent = true;
  bool soundness_violation = false;  // certificate contradicted by the oracle
  std::vector<Witness> witnesses;    // all condition failures
  std::optional<LinkingCurve> linking;
  double linking_endpoint_gap = 0.0;
  double representation_residual = 0.0;  // difference-curve identity (evolution machine)
};

// E[f at knot t] under the spec's own initial law: initial . T_{0,t} . f.
double oracle_expectation(const EvolutionSystem& ev, const Vec& f, std::size_t t);

// States carrying mass > eps at the knot.
std::vector<int> support_marginal(const EvolutionSystem& ev, std::size_t s,
                                  double eps = 1e-12);

// Evolution-system machine: generator inequality on the evolved function at
// every knot s <= t, no support or initial-law hypotheses; certifies the
// pointwise ordering of T_{s,t} f and checks it as a conclusion.
ComparisonReport check_theorem4(const EvolutionSystem& ev_x, const EvolutionSystem& ev_y,
                                const TestFunction& f, std::size_t t,
                                const ComparisonOptions& opts = {});

// Martingale machine: equal initial laws + support inclusion + generator
// inequality on the evolved function over the Y-support; produces the linking
// curve g(s) = E[T^X_{s,t}f(Y_s)] whose monotonicity realises the proof.
ComparisonReport check_theorem7(const EvolutionSystem& ev_x, const EvolutionSystem& ev_y,
                                const TestFunction& f, std::size_t t,
                                const ComparisonOptions& opts = {});

// Left-generator variant of the martingale machine.
ComparisonReport check_theorem8(const EvolutionSystem& ev_x, const EvolutionSystem& ev_y,
                                const TestFunction& f, std::size_t t,
                                const ComparisonOptions& opts = {});

// Extended-generator variant: adds an explicit boundedness certificate that
// discharges the class-DL hypothesis on a finite space.
ComparisonReport check_theorem9(const EvolutionSystem& ev_x, const EvolutionSystem& ev_y,
                                const TestFunction& f, std::size_t t,
                                const ComparisonOptions& opts = {});

// Fixed-jump-time machine: rate inequality at every knot plus kernel
// inequality at every shared epoch, both applied to f itself; conclusion
// checked at every knot up to t. A shared epoch schedule is a precondition
// (mismatch throws); equal initial laws is checked as a hypothesis.
ComparisonReport check_theorem10(const EvolutionSystem& ev_x,
                                 const EvolutionSystem& ev_y, const TestFunction& f,
                                 std::size_t t, const ComparisonOptions& opts = {});

struct ClassSweepReport {
  bool propagation_ok = true;  // cone closed under X-evolution on all knot pairs
  std::optional<Witness> propagation_witness;
  std::string propagation_note;
  std::vector<ComparisonReport> per_generator;
  Verdict class_verdict = Verdict::inconclusive;
  int worst_generator = -1;     // generator with the smallest margin
  double worst_margin = 0.0;
  std::string worst_name;
};

// Sweeps the martingale machine over every cone generator and combines the
// per-generator verdicts into an ordering statement for the whole class.
ClassSweepReport sweep_function_class(const EvolutionSystem& ev_x,
                                      const EvolutionSystem& ev_y,
                                      const FunctionCone& cone, std::size_t t,
                                      const ComparisonOptions& opts = {},
                                      Exec exec = Exec::parallel);

// Shared consistency rule: does the exact margin agree with the verdict?
bool verdict_consistent(Verdict v, double oracle_margin, double tol);
// Mirror of a verdict under swapping the two processes.
Verdict flip(Verdict v);

}  // namespace mcomp
