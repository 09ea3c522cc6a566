#pragma once
// One-sided generator estimation from the evolution system (difference
// quotients + Richardson extrapolation) and direct generator application,
// including the kernel atoms of fixed jump epochs.

#include <span>
#include <vector>

#include "mcomp/evolution.hpp"

namespace mcomp {

struct QuotientSample {
  double h = 0.0;
  Mat quotient;      // (T over the h-window - I) / h
  double gap = 0.0;  // max-abs distance to the previous (coarser) quotient
};

struct GeneratorEstimate {
  double s = 0.0;
  Side side = Side::right;
  Mat estimate;                       // finest Richardson extrapolant
  std::vector<QuotientSample> table;  // h = dt, dt/2, dt/4, dt/8
  double richardson_gap = 0.0;        // between the two finest extrapolants
  bool converged = false;             // gap <= threshold and gaps non-increasing
  bool diverged = false;              // quotient gaps strictly increasing
};

// Estimates A(s) one-sidedly at a grid knot. Windows are re-solved flows at a
// tight tolerance (never interpolated); windows that cross a jump epoch keep
// its kernel factor, which is what makes the left estimate at an epoch
// diverge (flagged, not thrown).
GeneratorEstimate estimate_generator(const EvolutionSystem& ev, std::size_t knot,
                                     Side side, double threshold = 1e-6);

// (A_s f): the rate part Q(s, side) f, or the jump atom (K_e - I) f when s is
// a scheduled epoch (side-independent by construction).
Vec apply_generator(const ProcessSpec& spec, double s, Side side, const Vec& f);

// Space-time action at a knot: one-sided time quotient of the knot-indexed
// curve F plus the rate part, ((d/dt + A) F)(knot). The curve must cover the
// neighbour knot on the requested side.
Vec spacetime_apply(const ProcessSpec& spec, const TimeGrid& grid, std::size_t knot,
                    Side side, std::span<const Vec> f_curve);

}  // namespace mcomp
