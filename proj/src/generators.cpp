#include "mcomp/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace mcomp {

namespace {
constexpr double kWindowTol = 1e-13;  // re-solve tolerance for quotient windows
}

GeneratorEstimate estimate_generator(const EvolutionSystem& ev, std::size_t knot,
                                     Side side, double threshold) {
  const auto& grid = ev.grid();
  if (knot >= grid.size()) throw std::invalid_argument("knot index out of range");
  if (side == Side::right && knot + 1 >= grid.size())
    throw std::invalid_argument("right generator needs a knot before the horizon");
  if (side == Side::left && knot == 0)
    throw std::invalid_argument("left generator needs a knot after 0");

  const double s = grid[knot];
  const double dt = side == Side::right ? grid.spacing(knot) : grid.spacing(knot - 1);
  const int n = ev.spec().dim();
  const Mat id = Mat::identity(n);

  GeneratorEstimate est;
  est.s = s;
  est.side = side;
  est.table.reserve(4);
  for (int j = 0; j < 4; ++j) {
    const double h = dt / (1 << j);
    const Mat window = side == Side::right
                           ? ev_interval(ev.spec(), s, s + h, kWindowTol)
                           : ev_interval(ev.spec(), s - h, s, kWindowTol);
    QuotientSample q;
    q.h = h;
    q.quotient = (window - id) * (1.0 / h);
    if (j > 0) q.gap = max_abs_diff(q.quotient, est.table.back().quotient);
    est.table.push_back(std::move(q));
  }

  // First-order Richardson on successive quotient pairs.
  std::vector<Mat> extrap;
  for (int j = 0; j < 3; ++j)
    extrap.push_back(est.table[j + 1].quotient * 2.0 - est.table[j].quotient);
  est.estimate = extrap.back();
  est.richardson_gap = max_abs_diff(extrap[2], extrap[1]);

  const double g1 = est.table[1].gap, g2 = est.table[2].gap, g3 = est.table[3].gap;
  const bool gaps_shrink = g2 <= g1 + 1e-15 && g3 <= g2 + 1e-15;
  est.converged = gaps_shrink && est.richardson_gap <= threshold;
  est.diverged = g2 > g1 && g3 > g2;
  return est;
}

Vec apply_generator(const ProcessSpec& spec, double s, Side side, const Vec& f) {
  if (static_cast<int>(f.size()) != spec.dim())
    throw std::invalid_argument("function length does not match state count");
  const int e = spec.epoch_at(s);
  if (e >= 0) {
    // Generator atom of the scheduled jump: (K - I) f.
    const Mat& k = spec.jumps->kernels[e];
    Vec out = mat_vec(k, f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= f[i];
    return out;
  }
  return mat_vec(spec.rates.at(s, side), f);
}

Vec spacetime_apply(const ProcessSpec& spec, const TimeGrid& grid, std::size_t knot,
                    Side side, std::span<const Vec> f_curve) {
  if (f_curve.size() != grid.size())
    throw std::invalid_argument("curve must cover every grid knot");
  if (side == Side::right && knot + 1 >= grid.size())
    throw std::invalid_argument("right space-time quotient needs a next knot");
  if (side == Side::left && knot == 0)
    throw std::invalid_argument("left space-time quotient needs a previous knot");

  const int n = spec.dim();
  Vec out(n, 0.0);
  if (side == Side::right) {
    const double dt = grid.spacing(knot);
    const Vec qf = mat_vec(spec.rates.at(grid[knot], Side::right), f_curve[knot]);
    for (int i = 0; i < n; ++i)
      out[i] = (f_curve[knot + 1][i] - f_curve[knot][i]) / dt + qf[i];
  } else {
    const double dt = grid.spacing(knot - 1);
    const Vec qf = mat_vec(spec.rates.at(grid[knot], Side::left), f_curve[knot]);
    for (int i = 0; i < n; ++i)
      out[i] = (f_curve[knot][i] - f_curve[knot - 1][i]) / dt + qf[i];
  }
  return out;
}

}  // namespace mcomp
