#include "mcomp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcomp {

namespace {

constexpr double kBlockTolDefault = 1e-10;  // stochasticity certificate slack

void merge_info(FlowResult* into, const FlowResult& piece) {
  if (!into) return;
  into->error_estimate = std::max(into->error_estimate, piece.error_estimate);
  into->substeps = std::max(into->substeps, piece.substeps);
  into->converged = into->converged && piece.converged;
}

}  // namespace

Mat flow_interval(const ProcessSpec& spec, double a, double b, double tol,
                  FlowResult* info) {
  if (b < a) throw std::invalid_argument("flow interval must have a <= b");
  const int n = spec.dim();
  Mat total = Mat::identity(n);
  if (b == a) return total;

  std::vector<double> cuts = spec.rates.kinks_in(a, b);
  cuts.push_back(b);
  double lo = a;
  for (double hi : cuts) {
    if (hi <= lo) continue;
    Mat piece;
    const bool constant_piece =
        spec.rates.variant() == RateModel::Variant::constant ||
        spec.rates.variant() == RateModel::Variant::piecewise;
    if (constant_piece) {
      piece = expm(spec.rates.at(lo, Side::right) * (hi - lo));
      if (info) merge_info(info, FlowResult{{}, 0.0, 1, true});
    } else {
      FlowResult r = rk4_flow(lo, hi, tol,
                              [&](double t) { return spec.rates.at(t, Side::right); });
      piece = std::move(r.m);
      merge_info(info, r);
    }
    total = total * piece;
    lo = hi;
  }
  return total;
}

Mat ev_interval(const ProcessSpec& spec, double a, double b, double tol,
                FlowResult* info) {
  if (!spec.jumps) return flow_interval(spec, a, b, tol, info);
  Mat total = Mat::identity(spec.dim());
  double lo = a;
  for (std::size_t e = 0; e < spec.jumps->times.size(); ++e) {
    const double te = spec.jumps->times[e];
    if (te <= a || te > b) continue;  // kernel belongs to (a, b]
    total = total * flow_interval(spec, lo, te, tol, info);
    total = total * spec.jumps->kernels[e];
    lo = te;
  }
  if (lo < b) total = total * flow_interval(spec, lo, b, tol, info);
  return total;
}

EvolutionSystem build_evolution(const ProcessSpec& spec, const TimeGrid& grid,
                                double block_tol, Exec exec) {
  {
    auto diags = validate(spec);
    for (const auto& d : diags)
      if (d.severity == Diagnostic::Severity::error)
        throw std::invalid_argument("invalid spec at " + d.where + ": " + d.message);
  }
  if (spec.jumps)
    for (double e : spec.jumps->times)
      if (!grid.has(e))
        throw std::invalid_argument("jump epoch is not a grid knot");
  for (double k : spec.rates.kinks())
    if (!grid.has(k))
      throw std::invalid_argument("rate kink is not a grid knot");

  EvolutionSystem ev;
  ev.spec_ = spec;
  ev.grid_ = grid;
  const std::size_t nblocks = grid.size() - 1;
  ev.blocks_.assign(nblocks, Mat());
  std::vector<FlowResult> infos(nblocks);

  // Blocks are independent solves over disjoint intervals; the parallel and
  // serial drivers produce bitwise-identical results.
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long k = 0; k < static_cast<long long>(nblocks); ++k)
      ev.blocks_[k] = ev_interval(spec, grid[k], grid[k + 1], block_tol, &infos[k]);
  } else {
    for (std::size_t k = 0; k < nblocks; ++k)
      ev.blocks_[k] = ev_interval(spec, grid[k], grid[k + 1], block_tol, &infos[k]);
  }

  EvolutionCert& c = ev.cert_;
  for (std::size_t k = 0; k < nblocks; ++k) {
    const Mat& b = ev.blocks_[k];
    for (std::size_t i = 0; i < b.rows(); ++i) {
      double sum = 0.0;
      for (double v : b.row(i)) {
        sum += v;
        c.min_entry = std::min(c.min_entry, v);
      }
      c.max_row_sum_err = std::max(c.max_row_sum_err, std::abs(sum - 1.0));
    }
    c.max_ode_error = std::max(c.max_ode_error, infos[k].error_estimate);
    c.max_substeps = std::max(c.max_substeps, infos[k].substeps);
    c.ode_converged = c.ode_converged && infos[k].converged;
  }
  c.stochastic_ok = c.max_row_sum_err <= kBlockTolDefault &&
                    c.min_entry >= -kBlockTolDefault && c.ode_converged;
  return ev;
}

Mat EvolutionSystem::transition(std::size_t s, std::size_t t) const {
  if (s > t || t >= grid_.size())
    throw std::invalid_argument("transition needs knot indices s <= t on the grid");
  Mat p = Mat::identity(spec_.dim());
  for (std::size_t k = s; k < t; ++k) p = p * blocks_[k];
  return p;
}

Vec EvolutionSystem::apply(std::size_t s, std::size_t t, const Vec& f) const {
  if (s > t || t >= grid_.size())
    throw std::invalid_argument("apply needs knot indices s <= t on the grid");
  Vec w = f;
  for (std::size_t k = t; k-- > s;) w = mat_vec(blocks_[k], w);
  return w;
}

Vec EvolutionSystem::marginal(std::size_t t) const {
  if (t >= grid_.size()) throw std::invalid_argument("knot index out of range");
  Vec nu = spec_.initial;
  for (std::size_t k = 0; k < t; ++k) nu = vec_mat(nu, blocks_[k]);
  return nu;
}

std::vector<Vec> EvolutionSystem::backward_solution(const Vec& f, std::size_t t) const {
  if (t >= grid_.size()) throw std::invalid_argument("knot index out of range");
  if (static_cast<int>(f.size()) != spec_.dim())
    throw std::invalid_argument("function length does not match state count");
  std::vector<Vec> u(t + 1);
  u[t] = f;
  for (std::size_t k = t; k-- > 0;) u[k] = mat_vec(blocks_[k], u[k + 1]);
  return u;
}

std::vector<Vec> EvolutionSystem::forward_marginals(std::size_t t) const {
  if (t >= grid_.size()) throw std::invalid_argument("knot index out of range");
  std::vector<Vec> nu(t + 1);
  nu[0] = spec_.initial;
  for (std::size_t k = 0; k < t; ++k) nu[k + 1] = vec_mat(nu[k], blocks_[k]);
  return nu;
}

double ck_residual(const EvolutionSystem& ev, std::size_t s, std::size_t u,
                   std::size_t t) {
  if (!(s <= u && u <= t)) throw std::invalid_argument("need s <= u <= t");
  return max_abs_diff(ev.transition(s, u) * ev.transition(u, t), ev.transition(s, t));
}

ResidualCurve check_backward_equation(const EvolutionSystem& ev, const Vec& f,
                                      std::size_t t) {
  const auto& grid = ev.grid();
  const std::vector<Vec> u = ev.backward_solution(f, t);
  ResidualCurve rc;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rc.s.resize(t + 1);
  rc.right.assign(t + 1, nan);
  rc.left.assign(t + 1, nan);
  for (std::size_t k = 0; k <= t; ++k) rc.s[k] = grid[k];
  // Residual of the right quotient (u_{k+1}-u_k)/dt against -Q(t_k+)u_k, i.e.
  // (quotient + Q u) should vanish; same on the left with Q(t_k-).
  for (std::size_t k = 0; k < t; ++k) {
    const double dt = grid.spacing(k);
    const Vec qu = mat_vec(ev.spec().rates.at(grid[k], Side::right), u[k]);
    double m = 0.0;
    for (std::size_t i = 0; i < qu.size(); ++i)
      m = std::max(m, std::abs((u[k + 1][i] - u[k][i]) / dt + qu[i]));
    rc.right[k] = m;
    rc.max_right = std::max(rc.max_right, m);
  }
  for (std::size_t k = 1; k <= t; ++k) {
    const double dt = grid.spacing(k - 1);
    const Vec qu = mat_vec(ev.spec().rates.at(grid[k], Side::left), u[k]);
    double m = 0.0;
    for (std::size_t i = 0; i < qu.size(); ++i)
      m = std::max(m, std::abs((u[k][i] - u[k - 1][i]) / dt + qu[i]));
    rc.left[k] = m;
    rc.max_left = std::max(rc.max_left, m);
  }
  return rc;
}

IntegralResidual check_integral_representation(const EvolutionSystem& ev, const Vec& f,
                                               std::size_t s, std::size_t t) {
  const auto& grid = ev.grid();
  if (s > t || t >= grid.size()) throw std::invalid_argument("need knots s <= t");
  if (ev.spec().jumps)
    for (double e : ev.spec().jumps->times)
      if (e > grid[s] && e <= grid[t])
        throw std::invalid_argument(
            "integral representation assumes no jump epoch inside (s, t]");

  const auto& rates = ev.spec().rates;
  const std::vector<Vec> u = ev.backward_solution(f, t);
  const int n = ev.spec().dim();

  // lhs = T_{s,t} f - f.
  Vec lhs = u[s];
  for (int i = 0; i < n; ++i) lhs[i] -= f[i];

  // Side-aware trapezoid on each knot interval: values taken from the right
  // at the left end and from the left at the right end, exact across kinks.
  Vec primal(n, 0.0), dual(n, 0.0);
  Mat l = Mat::identity(n);  // T_{s, t_k}
  Vec g_right = mat_vec(rates.at(grid[s], Side::right), f);  // Q f at knot s+
  for (std::size_t k = s; k < t; ++k) {
    const double dt = grid.spacing(k);
    const Vec dual_right = mat_vec(rates.at(grid[k], Side::right), u[k]);
    const Vec dual_left = mat_vec(rates.at(grid[k + 1], Side::left), u[k + 1]);
    const Vec pri_lo = mat_vec(l, g_right);
    l = l * ev.blocks()[k];
    const Vec g_left = mat_vec(rates.at(grid[k + 1], Side::left), f);
    const Vec pri_hi = mat_vec(l, g_left);
    for (int i = 0; i < n; ++i) {
      dual[i] += 0.5 * dt * (dual_right[i] + dual_left[i]);
      primal[i] += 0.5 * dt * (pri_lo[i] + pri_hi[i]);
    }
    if (k + 1 < t) g_right = mat_vec(rates.at(grid[k + 1], Side::right), f);
  }

  IntegralResidual r;
  for (int i = 0; i < n; ++i) {
    r.primal = std::max(r.primal, std::abs(lhs[i] - primal[i]));
    r.dual = std::max(r.dual, std::abs(lhs[i] - dual[i]));
  }
  return r;
}

double check_inhomogeneous_representation(const EvolutionSystem& ev,
                                          std::span<const Vec> f_curve,
                                          std::span<const Vec> g_curve, std::size_t s,
                                          std::size_t t) {
  const auto& grid = ev.grid();
  if (s > t || t >= grid.size()) throw std::invalid_argument("need knots s <= t");
  if (f_curve.size() < t + 1 || g_curve.size() < t + 1)
    throw std::invalid_argument("curves must cover knots 0..t");
  if (ev.spec().jumps)
    for (double e : ev.spec().jumps->times)
      if (e > grid[s] && e <= grid[t])
        throw std::invalid_argument(
            "inhomogeneous representation assumes no jump epoch inside (s, t]");
  const int n = ev.spec().dim();

  Vec integral(n, 0.0);
  Mat l = Mat::identity(n);  // T_{s, t_k}
  for (std::size_t k = s; k < t; ++k) {
    const double dt = grid.spacing(k);
    const Vec lo = mat_vec(l, g_curve[k]);
    l = l * ev.blocks()[k];
    const Vec hi = mat_vec(l, g_curve[k + 1]);
    for (int i = 0; i < n; ++i) integral[i] += 0.5 * dt * (lo[i] + hi[i]);
  }
  // l is now T_{s,t}.
  const Vec endv = mat_vec(l, f_curve[t]);
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    res = std::max(res, std::abs(f_curve[s][i] - (endv[i] - integral[i])));
  return res;
}

}  // namespace mcomp
