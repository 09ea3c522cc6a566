#pragma once
// Path simulation by uniformization/thinning with counter-based per-path RNG
// streams, and stratified z-tests for the martingale characterisations.

#include <cstdint>
#include <span>
#include <vector>

#include "mcomp/evolution.hpp"
#include "mcomp/rate_model.hpp"
#include "mcomp/time_grid.hpp"

namespace mcomp {

// xoshiro256++ seeded through splitmix64; one independent stream per path,
// derived from (seed, path index) only, so results are identical for any
// thread count.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  static Rng for_path(std::uint64_t seed, std::uint64_t path_index);
  std::uint64_t next();
  double uniform();  // [0, 1)
  double exponential(double rate);

private:
  std::uint64_t s_[4];
};

struct Path {
  int initial_state = 0;
  std::uint64_t seed = 0;          // the stream seed this path was drawn from
  std::vector<double> times;       // strictly increasing event times
  std::vector<int> states;         // post-event states (epochs may self-loop)
  int state_at(double t) const;    // right-continuous
};

// Thinning against the uniformization bound; every scheduled epoch is
// recorded as an event (possibly a self-transition). A thinning candidate
// that ties an epoch time exactly is dropped.
std::vector<Path> simulate(const ProcessSpec& spec, std::size_t n_paths,
                           std::uint64_t seed, Exec exec = Exec::parallel);

enum class TestMode { two_sided, upper, lower };  // drift: =0, <=0, >=0

struct CellStat {
  double s = 0.0, t = 0.0;  // checkpoint pair
  int state = -1;           // conditioning state at s; -1 = all paths
  std::size_t count = 0;
  double mean = 0.0, se = 0.0, z = 0.0;
  bool skipped = false;     // empty or below the minimum cell size
};

struct MartingaleTestResult {
  std::vector<double> checkpoints;
  std::vector<CellStat> cells;
  TestMode mode = TestMode::two_sided;
  double z_max = 4.0;
  double worst_z = 0.0;       // most extreme tested z for the mode
  std::size_t tested_cells = 0, skipped_cells = 0;
  bool passed = true;
};

// Compensated-drift z-test for M_t = f(X_t) - f(X_0) - int (Q_s f)(X_s) ds
// - sum of jump atoms (K_e - I)f(X_{e-}). Increments between all checkpoint
// pairs, stratified by the state at the earlier checkpoint plus an
// all-paths stratum. `spec` provides the compensator; passing a different
// spec than the one that generated the paths is the intended way to probe
// test power. Cells needing fewer than `min_cell` samples are skipped and
// reported.
MartingaleTestResult martingale_test(std::span<const Path> paths,
                                     const ProcessSpec& spec, const Vec& f,
                                     std::span<const double> checkpoints,
                                     double z_max = 4.0,
                                     TestMode mode = TestMode::two_sided,
                                     std::size_t min_cell = 8);

// Space-time variant on a knot curve u: M_c = u_c(X_c) - u_0(X_0) - sum_k
// int h_k(X_s) ds with h_k the one-sided space-time quotient of u on interval
// k. Exact for the true evolution up to an O(grid step) compensator bias.
MartingaleTestResult spacetime_martingale_test(std::span<const Path> paths,
                                               const ProcessSpec& spec,
                                               const TimeGrid& grid,
                                               std::span<const Vec> u_curve,
                                               std::span<const std::size_t> knots,
                                               double z_max = 4.0,
                                               TestMode mode = TestMode::two_sided,
                                               std::size_t min_cell = 8);

struct LinkingTestResult {
  MartingaleTestResult drift;      // one-sided increment test on L
  double endpoint_gap = 0.0;       // mean L at t vs empirical mean f(Y_t)
  double max_curve_z = 0.0;        // empirical mean of L vs exact g, per knot
  bool curve_ok = true;
  bool passed = false;
  const char* detected = "";       // "super", "sub", "martingale" or "none"
};

// Evaluates the linking process L_s = (T^X_{s,t} f)(Y_s) on simulated Y-paths
// and tests the one-sided drift the certificate predicts; also compares the
// empirical curve with the exact g(s) and the endpoint identity L_t = f(Y_t).
LinkingTestResult linking_supermartingale_test(std::span<const Path> paths_y,
                                               const EvolutionSystem& ev_x,
                                               const EvolutionSystem& ev_y, const Vec& f,
                                               std::size_t t_knot,
                                               std::span<const std::size_t> knots,
                                               double z_max = 4.0,
                                               TestMode direction = TestMode::upper);

}  // namespace mcomp
