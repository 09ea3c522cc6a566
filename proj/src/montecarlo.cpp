#include "mcomp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcomp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::for_path(std::uint64_t seed, std::uint64_t path_index) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (path_index + 1));
  return Rng(splitmix64(x));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return (next() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

int Path::state_at(double t) const {
  // Right-continuous: last event with time <= t.
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return initial_state;
  return states[static_cast<std::size_t>(it - times.begin()) - 1];
}

namespace {

int sample_index(const Vec& weights, double total, double u, int skip = -1) {
  // Inverse-CDF over weights (optionally skipping one index).
  double acc = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (static_cast<int>(j) == skip) continue;
    const double w = weights[j];
    if (w <= 0.0) continue;
    acc += w;
    last = static_cast<int>(j);
    if (u * total < acc) return last;
  }
  return last >= 0 ? last : (skip == 0 && weights.size() > 1 ? 1 : 0);
}

Path simulate_one(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t idx,
                  double lambda) {
  Rng rng = Rng::for_path(seed, idx);
  const double horizon = spec.horizon();
  Path p;
  p.seed = seed;

  // Initial state by inverse CDF on the initial law.
  {
    const double u = rng.uniform();
    double acc = 0.0;
    p.initial_state = static_cast<int>(spec.initial.size()) - 1;
    for (std::size_t i = 0; i < spec.initial.size(); ++i) {
      acc += spec.initial[i];
      if (u < acc) {
        p.initial_state = static_cast<int>(i);
        break;
      }
    }
  }

  int x = p.initial_state;
  double t = 0.0;
  std::size_t ei = 0;
  const std::size_t n_epochs = spec.jumps ? spec.jumps->times.size() : 0;

  for (;;) {
    const double t_cand =
        lambda > 0.0 ? t + rng.exponential(lambda)
                     : std::numeric_limits<double>::infinity();
    bool cand_is_epoch = false;
    while (ei < n_epochs && spec.jumps->times[ei] <= t_cand &&
           spec.jumps->times[ei] <= horizon) {
      const double te = spec.jumps->times[ei];
      const Mat& k = spec.jumps->kernels[ei];
      Vec row(k.row(x).begin(), k.row(x).end());
      const int j = sample_index(row, 1.0, rng.uniform());
      p.times.push_back(te);
      p.states.push_back(j);
      x = j;
      if (te == t_cand) cand_is_epoch = true;
      ++ei;
    }
    if (t_cand > horizon) break;
    if (cand_is_epoch) {  // exact tie: the epoch wins, the candidate is dropped
      t = t_cand;
      continue;
    }
    const Mat q = spec.rates.at(t_cand, Side::right);
    const double exit_rate = -q(x, x);
    const double u = rng.uniform();
    if (u * lambda < exit_rate) {
      Vec row(q.row(x).begin(), q.row(x).end());
      row[x] = 0.0;
      const int j = sample_index(row, exit_rate, rng.uniform(), x);
      p.times.push_back(t_cand);
      p.states.push_back(j);
      x = j;
    }
    t = t_cand;
  }
  return p;
}

}  // namespace

std::vector<Path> simulate(const ProcessSpec& spec, std::size_t n_paths,
                           std::uint64_t seed, Exec exec) {
  {
    auto diags = validate(spec);
    for (const auto& d : diags)
      if (d.severity == Diagnostic::Severity::error)
        throw std::invalid_argument("invalid spec at " + d.where + ": " + d.message);
  }
  const double lambda = spec.rates.uniformization_bound();
  std::vector<Path> paths(n_paths);
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long p = 0; p < static_cast<long long>(n_paths); ++p)
      paths[p] = simulate_one(spec, seed, static_cast<std::uint64_t>(p), lambda);
  } else {
    for (std::size_t p = 0; p < n_paths; ++p)
      paths[p] = simulate_one(spec, seed, p, lambda);
  }
  return paths;
}

namespace {

// Shared stratified z machinery: V[p][c] are per-path values at checkpoints,
// cond[p][c] the conditioning state at checkpoint c. Cells are all ordered
// checkpoint pairs x (each state + all-paths stratum).
MartingaleTestResult compute_cells(const std::vector<Vec>& v,
                                   const std::vector<std::vector<int>>& cond,
                                   std::span<const double> checkpoints, int n_states,
                                   double z_max, TestMode mode, std::size_t min_cell) {
  MartingaleTestResult res;
  res.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  res.mode = mode;
  res.z_max = z_max;
  const std::size_t nc = checkpoints.size();

  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = a + 1; b < nc; ++b)
      for (int s = -1; s < n_states; ++s) {
        CellStat cell;
        cell.s = checkpoints[a];
        cell.t = checkpoints[b];
        cell.state = s;
        double sum = 0.0, sumsq = 0.0, amax = 0.0;
        std::size_t cnt = 0;
        for (std::size_t p = 0; p < v.size(); ++p) {
          if (s >= 0 && cond[p][a] != s) continue;
          const double inc = v[p][b] - v[p][a];
          sum += inc;
          sumsq += inc * inc;
          amax = std::max(amax, std::abs(inc));
          ++cnt;
        }
        cell.count = cnt;
        if (cnt < std::max<std::size_t>(min_cell, 2)) {
          cell.skipped = true;
          ++res.skipped_cells;
          res.cells.push_back(cell);
          continue;
        }
        cell.mean = sum / cnt;
        const double var = std::max(0.0, (sumsq - sum * sum / cnt) / (cnt - 1));
        cell.se = std::sqrt(var / cnt);
        if (cell.se == 0.0) {
          // Degenerate cell: every increment is the same double, so the only
          // deviation the mean can show is summation roundoff.
          cell.z = std::abs(cell.mean) <= 1e-12 * std::max(1.0, amax)
                       ? 0.0
                       : std::copysign(std::numeric_limits<double>::infinity(),
                                       cell.mean);
        } else {
          cell.z = cell.mean / cell.se;
        }
        ++res.tested_cells;
        double offending = 0.0;
        switch (mode) {
          case TestMode::two_sided: offending = std::abs(cell.z); break;
          case TestMode::upper: offending = cell.z; break;          // drift <= 0
          case TestMode::lower: offending = -cell.z; break;         // drift >= 0
        }
        if (offending > res.worst_z) res.worst_z = offending;
        if (offending > z_max) res.passed = false;
        res.cells.push_back(cell);
      }
  return res;
}

}  // namespace

MartingaleTestResult martingale_test(std::span<const Path> paths,
                                     const ProcessSpec& spec, const Vec& f,
                                     std::span<const double> checkpoints, double z_max,
                                     TestMode mode, std::size_t min_cell) {
  const int n = spec.dim();
  if (static_cast<int>(f.size()) != n)
    throw std::invalid_argument("function length does not match state count");
  std::vector<double> cps(checkpoints.begin(), checkpoints.end());
  if (cps.empty()) throw std::invalid_argument("need at least one checkpoint");
  if (!std::is_sorted(cps.begin(), cps.end()))
    throw std::invalid_argument("checkpoints must be sorted");
  if (cps.back() > spec.horizon() + 1e-12)
    throw std::invalid_argument("checkpoint beyond the horizon");

  const CompensatorTable table(spec.rates, f);
  // Kernel atoms (K_e - I) f per epoch.
  std::vector<Vec> kdelta;
  if (spec.jumps)
    for (const Mat& k : spec.jumps->kernels) {
      Vec d = mat_vec(k, f);
      for (int i = 0; i < n; ++i) d[i] -= f[i];
      kdelta.push_back(std::move(d));
    }

  const std::size_t np = paths.size();
  std::vector<Vec> v(np, Vec(cps.size(), 0.0));
  std::vector<std::vector<int>> cond(np, std::vector<int>(cps.size(), 0));

  auto walk = [&](std::size_t p) {
    const Path& path = paths[p];
    double comp = 0.0;
    double prev = 0.0;
    int x = path.initial_state;
    std::size_t evi = 0, ei = 0;
    const double f0 = f[path.initial_state];
    for (std::size_t c = 0; c < cps.size(); ++c) {
      const double tc = cps[c];
      while (evi < path.times.size() && path.times[evi] <= tc) {
        const double te = path.times[evi];
        comp += table.integrate(x, prev, te);
        // Scheduled epochs carry their kernel atom; epoch events hold the
        // exact scheduled time, so pointer-matching is exact.
        if (spec.jumps) {
          while (ei < spec.jumps->times.size() && spec.jumps->times[ei] < te) ++ei;
          if (ei < spec.jumps->times.size() && spec.jumps->times[ei] == te) {
            comp += kdelta[ei][x];
            ++ei;
          }
        }
        x = path.states[evi];
        prev = te;
        ++evi;
      }
      comp += table.integrate(x, prev, tc);
      prev = tc;
      v[p][c] = f[x] - f0 - comp;
      cond[p][c] = x;
    }
  };
  for (std::size_t p = 0; p < np; ++p) walk(p);

  return compute_cells(v, cond, cps, n, z_max, mode, min_cell);
}

MartingaleTestResult spacetime_martingale_test(std::span<const Path> paths,
                                               const ProcessSpec& spec,
                                               const TimeGrid& grid,
                                               std::span<const Vec> u_curve,
                                               std::span<const std::size_t> knots,
                                               double z_max, TestMode mode,
                                               std::size_t min_cell) {
  const int n = spec.dim();
  if (u_curve.size() != grid.size())
    throw std::invalid_argument("curve must cover every grid knot");
  std::vector<std::size_t> cks(knots.begin(), knots.end());
  if (cks.empty()) throw std::invalid_argument("need at least one checkpoint knot");
  if (!std::is_sorted(cks.begin(), cks.end()))
    throw std::invalid_argument("checkpoint knots must be sorted");
  if (cks.back() >= grid.size()) throw std::invalid_argument("knot out of range");

  // One-sided space-time quotient field per interval; constant in time there.
  const std::size_t last = cks.back();
  std::vector<Vec> h(last);
  for (std::size_t k = 0; k < last; ++k) {
    const double dt = grid.spacing(k);
    const Vec qf = mat_vec(spec.rates.at(grid[k], Side::right), u_curve[k]);
    h[k].resize(n);
    for (int i = 0; i < n; ++i)
      h[k][i] = (u_curve[k + 1][i] - u_curve[k][i]) / dt + qf[i];
  }

  std::vector<double> cps(cks.size());
  for (std::size_t c = 0; c < cks.size(); ++c) cps[c] = grid[cks[c]];

  const std::size_t np = paths.size();
  std::vector<Vec> v(np, Vec(cks.size(), 0.0));
  std::vector<std::vector<int>> cond(np, std::vector<int>(cks.size(), 0));

  for (std::size_t p = 0; p < np; ++p) {
    const Path& path = paths[p];
    double comp = 0.0;
    int x = path.initial_state;
    std::size_t evi = 0, c = 0;
    const double u00 = u_curve[0][path.initial_state];
    // Checkpoint knot 0, if requested, reads the initial state directly.
    while (c < cks.size() && cks[c] == 0) {
      v[p][c] = 0.0;
      cond[p][c] = x;
      ++c;
    }
    for (std::size_t k = 0; k < last && c < cks.size(); ++k) {
      const double lo = grid[k], hi = grid[k + 1];
      double seg = lo;
      while (evi < path.times.size() && path.times[evi] <= hi) {
        if (path.times[evi] > lo) {
          comp += h[k][x] * (path.times[evi] - seg);
          seg = path.times[evi];
        }
        x = path.states[evi];
        ++evi;
      }
      comp += h[k][x] * (hi - seg);
      while (c < cks.size() && cks[c] == k + 1) {
        v[p][c] = u_curve[k + 1][x] - u00 - comp;
        cond[p][c] = x;
        ++c;
      }
    }
  }

  return compute_cells(v, cond, cps, n, z_max, mode, min_cell);
}

LinkingTestResult linking_supermartingale_test(std::span<const Path> paths_y,
                                               const EvolutionSystem& ev_x,
                                               const EvolutionSystem& ev_y, const Vec& f,
                                               std::size_t t_knot,
                                               std::span<const std::size_t> knots,
                                               double z_max, TestMode direction) {
  const auto& grid = ev_x.grid();
  std::vector<std::size_t> cks(knots.begin(), knots.end());
  if (cks.empty()) throw std::invalid_argument("need at least one checkpoint knot");
  if (!std::is_sorted(cks.begin(), cks.end()))
    throw std::invalid_argument("checkpoint knots must be sorted");
  if (cks.back() > t_knot)
    throw std::invalid_argument("checkpoints must not pass the target knot");

  const std::vector<Vec> u = ev_x.backward_solution(f, t_knot);
  const int n = ev_x.spec().dim();

  const std::size_t np = paths_y.size();
  std::vector<Vec> v(np, Vec(cks.size(), 0.0));
  std::vector<std::vector<int>> cond(np, std::vector<int>(cks.size(), 0));
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t c = 0; c < cks.size(); ++c) {
      const int x = paths_y[p].state_at(grid[cks[c]]);
      v[p][c] = u[cks[c]][x];
      cond[p][c] = x;
    }
  }
  std::vector<double> cps(cks.size());
  for (std::size_t c = 0; c < cks.size(); ++c) cps[c] = grid[cks[c]];

  LinkingTestResult res;
  res.drift = compute_cells(v, cond, cps, n, z_max, direction, 8);

  // Exact curve comparison: E[L_c] = g(c) state by construction.
  const std::vector<Vec> nuy = ev_y.forward_marginals(t_knot);
  for (std::size_t c = 0; c < cks.size(); ++c) {
    const double g = dot(nuy[cks[c]], u[cks[c]]);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      sum += v[p][c];
      sumsq += v[p][c] * v[p][c];
    }
    const double mean = sum / np;
    const double var = std::max(0.0, (sumsq - sum * sum / np) / (np - 1));
    const double se = std::sqrt(var / np);
    // se == 0 means all samples are one double (deterministic marginal, e.g.
    // a point initial law); allow the mean its summation roundoff.
    const double zc = se > 0.0 ? std::abs(mean - g) / se
                     : std::abs(mean - g) <= 1e-12 * std::max(1.0, std::abs(g))
                         ? 0.0
                         : 1e300;
    res.max_curve_z = std::max(res.max_curve_z, zc);
  }
  res.curve_ok = res.max_curve_z <= z_max;

  // Endpoint identity: when the last checkpoint is t, L there is f(Y_t)
  // evaluated path by path, so the means agree exactly.
  if (cks.back() == t_knot) {
    double mean_l = 0.0, mean_f = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      mean_l += v[p].back();
      mean_f += f[paths_y[p].state_at(grid[t_knot])];
    }
    res.endpoint_gap = std::abs(mean_l - mean_f) / np;
  }

  // Detected drift direction from the tested cells.
  bool sup_ok = true, sub_ok = true;
  for (const auto& cell : res.drift.cells) {
    if (cell.skipped) continue;
    if (cell.z > z_max) sup_ok = false;
    if (cell.z < -z_max) sub_ok = false;
  }
  res.detected = sup_ok && sub_ok ? "martingale"
                 : sup_ok         ? "super"
                 : sub_ok         ? "sub"
                                  : "none";
  res.passed = res.drift.passed && res.curve_ok && res.endpoint_gap <= 1e-12;
  return res;
}

}  // namespace mcomp
