#pragma once
// Built-in verification battery: analytic checks on the bundled demo pairs
// (closed-form expectations, residual orders, generator recovery) plus a
// soundness sweep over the generated corpus, including the swap probe. No
// Monte Carlo here; the battery is meant to run in seconds.

#include <iosfwd>
#include <string>
#include <vector>

namespace mcomp {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;
  int soundness_violations = 0;  // corpus scenarios whose run flagged soundness
  bool passed = false;
};

// Runs all checks, streaming one line per check to `os`. `quick` trims the
// corpus sweep to 10 scenarios (full: 100).
SelftestResult run_selftest(bool quick, std::ostream& os);

}  // namespace mcomp
