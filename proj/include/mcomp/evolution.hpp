#pragma once
// Certified evolution systems: per-interval transition blocks T_{t_k, t_{k+1}}
// built from the rate model (matrix exponentials on constant pieces, adaptive
// RK4 otherwise) with jump kernels folded in as right-continuous factors.

#include <span>
#include <vector>

#include "mcomp/rate_model.hpp"
#include "mcomp/time_grid.hpp"

namespace mcomp {

enum class Exec { serial, parallel };

struct EvolutionCert {
  double max_row_sum_err = 0.0;  // worst |row sum - 1| across blocks
  double min_entry = 1.0;        // most negative entry across blocks
  double max_ode_error = 0.0;    // worst Richardson gap of an accepted solve
  int max_substeps = 1;
  bool ode_converged = true;     // false if any solve hit the substep cap
  bool stochastic_ok = true;     // row sums and entries within block_tol
};

class EvolutionSystem {
public:
  const ProcessSpec& spec() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }
  const EvolutionCert& cert() const { return cert_; }
  const std::vector<Mat>& blocks() const { return blocks_; }

  // T_{t_s, t_t} as a matrix product of blocks (s <= t; equal gives identity).
  Mat transition(std::size_t s, std::size_t t) const;
  // T_{t_s, t_t} f without forming the product matrix.
  Vec apply(std::size_t s, std::size_t t, const Vec& f) const;
  // Law of the process at knot t (row vector), right-continuous at epochs.
  Vec marginal(std::size_t t) const;
  // u_k = T_{t_k, t_t} f for k = 0..t (u_t = f).
  std::vector<Vec> backward_solution(const Vec& f, std::size_t t) const;
  // nu_k = law at knot k for k = 0..t.
  std::vector<Vec> forward_marginals(std::size_t t) const;

  friend EvolutionSystem build_evolution(const ProcessSpec&, const TimeGrid&, double,
                                         Exec);

private:
  ProcessSpec spec_{RateModel::constant(Mat::identity(1) - Mat::identity(1), 1.0), {}, {1.0}};
  TimeGrid grid_;
  std::vector<Mat> blocks_;  // blocks_[k] = T over (knot k, knot k+1], kernel included
  EvolutionCert cert_;
};

// Continuous-part flow over [a, b]: solves T' = T Q(t) splitting at rate
// kinks; exact matrix exponentials on constant pieces.
Mat flow_interval(const ProcessSpec& spec, double a, double b, double tol,
                  FlowResult* info = nullptr);

// Full evolution factor over (a, b]: flow interleaved with the jump kernels
// of every epoch in (a, b].
Mat ev_interval(const ProcessSpec& spec, double a, double b, double tol,
                FlowResult* info = nullptr);

// Builds all blocks (independent solves; `exec` picks the OpenMP or serial
// driver — results are bitwise identical). Requires every epoch to be a knot.
EvolutionSystem build_evolution(const ProcessSpec& spec, const TimeGrid& grid,
                                double block_tol = 1e-12, Exec exec = Exec::parallel);

// max-abs Chapman-Kolmogorov defect of T_{s,u} T_{u,t} vs T_{s,t}.
double ck_residual(const EvolutionSystem& ev, std::size_t s, std::size_t u, std::size_t t);

struct ResidualCurve {
  std::vector<double> s;      // knots 0..t
  std::vector<double> right;  // right-quotient residual (NaN at the last knot)
  std::vector<double> left;   // left-quotient residual (NaN at knot 0)
  double max_right = 0.0;
  double max_left = 0.0;
};

// Residuals of the one-sided backward equations d/ds T_{s,t}f = -Q_s T_{s,t}f
// along the grid, u = backward solution of f from knot t.
ResidualCurve check_backward_equation(const EvolutionSystem& ev, const Vec& f,
                                      std::size_t t);

struct IntegralResidual {
  double primal = 0.0;  // T_{s,t}f - f = int T_{s,u} Q_u f du
  double dual = 0.0;    // T_{s,t}f - f = int Q_u T_{u,t} f du
};

// Trapezoid-on-knots residuals of the two integral forms over [s, t]; throws
// std::invalid_argument if a jump epoch lies inside (the forms assume a
// continuous evolution there).
IntegralResidual check_integral_representation(const EvolutionSystem& ev, const Vec& f,
                                               std::size_t s, std::size_t t);

// Residual at knot s of F(s) = T_{s,t}F(t) - int_s^t T_{s,r} G(r) dr for
// knot-indexed curves F, G (sizes >= t+1).
double check_inhomogeneous_representation(const EvolutionSystem& ev,
                                          std::span<const Vec> f_curve,
                                          std::span<const Vec> g_curve, std::size_t s,
                                          std::size_t t);

}  // namespace mcomp
