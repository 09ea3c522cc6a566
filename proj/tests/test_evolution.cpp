#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mcomp/corpus.hpp"
#include "mcomp/evolution.hpp"

using namespace mcomp;

namespace {

Mat q2(double a, double b) {
  Mat q(2, 2);
  q(0, 0) = -a; q(0, 1) = a;
  q(1, 0) = b;  q(1, 1) = -b;
  return q;
}

// Two-state chain started in 0 with rates a (up) and b (down):
// P(X_t = 1 | X_0 = 0) = a/(a+b) (1 - e^{-(a+b)t}).
double p01(double a, double b, double t) {
  return a / (a + b) * (1.0 - std::exp(-(a + b) * t));
}

EvolutionSystem demo_x(int steps) {
  const Scenario scen = demo_scenario(steps);
  const TimeGrid grid = TimeGrid::make(scen.x, steps);
  return build_evolution(scen.x, grid);
}

}  // namespace

TEST_CASE("transition matches the two-state closed form") {
  const auto ev = demo_x(1024);
  const std::size_t last = ev.grid().size() - 1;
  const Mat t01 = ev.transition(0, last);
  CHECK(std::abs(t01(0, 1) - p01(2.0, 1.0, 1.0)) <= 1e-12);
  CHECK(std::abs(t01(1, 0) - p01(1.0, 2.0, 1.0)) <= 1e-12);
  // apply() is the same operator in action form (associativity differs only
  // at roundoff level).
  const Vec u = ev.apply(0, last, {0.0, 1.0});
  CHECK(std::abs(u[0] - t01(0, 1)) <= 1e-13);
  // Identity at coincident knots.
  CHECK(ev.transition(7, 7) == Mat::identity(2));
}

TEST_CASE("blocks are certified stochastic") {
  const auto ev = demo_x(256);
  CHECK(ev.cert().stochastic_ok);
  CHECK(ev.cert().max_row_sum_err <= 1e-10);
  CHECK(ev.cert().min_entry >= -1e-10);
  CHECK(ev.cert().ode_converged);
}

TEST_CASE("chapman-kolmogorov composition holds on the grid") {
  const auto ev = demo_x(128);
  const std::size_t last = ev.grid().size() - 1;
  for (std::size_t u = 0; u <= last; u += 16)
    CHECK(ck_residual(ev, 0, u, last) <= 1e-12);
  CHECK(ck_residual(ev, 32, 48, 96) <= 1e-12);
}

TEST_CASE("marginal propagates the initial law") {
  const auto ev = demo_x(512);
  const std::size_t last = ev.grid().size() - 1;
  const Vec nu = ev.marginal(last);
  CHECK(std::abs(nu[1] - p01(2.0, 1.0, 1.0)) <= 1e-12);
  CHECK(nu[0] + nu[1] == doctest::Approx(1.0).epsilon(1e-14));
  const auto all = ev.forward_marginals(last);
  REQUIRE(all.size() == last + 1);
  CHECK(all[0] == Vec{1.0, 0.0});
  CHECK(all[last] == nu);
}

TEST_CASE("backward residuals decay at first order in the step") {
  const Vec f{0.0, 1.0};
  const auto ev512 = demo_x(512);
  const auto ev1024 = demo_x(1024);
  const auto r512 = check_backward_equation(ev512, f, ev512.grid().size() - 1);
  const auto r1024 = check_backward_equation(ev1024, f, ev1024.grid().size() - 1);
  // The difference quotient carries an O(step) bias; for this pair the
  // curvature bound gives ~3*step, i.e. ~5.9e-3 at 512 steps.
  CHECK(r512.max_right <= 6e-3);
  CHECK(r512.max_right >= 4e-3);
  CHECK(r512.max_right / r1024.max_right >= 1.8);
  CHECK(r512.max_right / r1024.max_right <= 2.2);
  // Curve layout: NaN exactly where no quotient exists.
  REQUIRE(r512.s.size() == ev512.grid().size());
  CHECK(std::isnan(r512.right.back()));
  CHECK(std::isnan(r512.left.front()));
  CHECK_FALSE(std::isnan(r512.right.front()));
}

TEST_CASE("integral representations hold to quadrature accuracy") {
  const Vec f{0.0, 1.0};
  const auto ev = demo_x(512);
  const std::size_t last = ev.grid().size() - 1;
  const auto full = check_integral_representation(ev, f, 0, last);
  CHECK(full.primal <= 1e-5);
  CHECK(full.dual <= 1e-5);
  const auto window = check_integral_representation(ev, f, last / 4, last / 2);
  CHECK(window.primal <= 1e-5);
  CHECK(window.dual <= 1e-5);
}

TEST_CASE("inhomogeneous representation with zero source is the flow") {
  const Vec f{1.0, -2.0};
  const auto ev = demo_x(128);
  const std::size_t last = ev.grid().size() - 1;
  const auto fcurve = ev.backward_solution(f, last);
  const std::vector<Vec> zero(last + 1, Vec{0.0, 0.0});
  CHECK(check_inhomogeneous_representation(ev, fcurve, zero, 0, last) <= 1e-12);
  CHECK(check_inhomogeneous_representation(ev, fcurve, zero, last / 2, last) <= 1e-12);
}

TEST_CASE("scheduled jumps enter blocks as right-continuous factors") {
  const Scenario scen = purejump_scenario(64);
  const TimeGrid grid = TimeGrid::make(scen.x, 64);
  const auto ev = build_evolution(scen.x, grid);
  const std::size_t e1 = grid.index_of(0.35);

  // Rates are zero, so the block ending at the epoch is exactly the kernel.
  CHECK(ev.transition(0, e1) == scen.x.jumps->kernels[0]);
  CHECK(ev.transition(0, e1 - 1) == Mat::identity(2));

  // Marginal jumps at the epoch: right-continuous lookup sees the new law.
  const Vec before = ev.marginal(e1 - 1);
  const Vec after = ev.marginal(e1);
  CHECK(before == Vec{1.0, 0.0});
  CHECK(after[1] == doctest::Approx(0.5));

  // Integral representations refuse windows containing an epoch.
  const Vec f{0.0, 1.0};
  CHECK_THROWS_AS(check_integral_representation(ev, f, 0, grid.size() - 1),
                  std::invalid_argument);
  const auto fcurve = ev.backward_solution(f, grid.size() - 1);
  const std::vector<Vec> zero(grid.size(), Vec{0.0, 0.0});
  CHECK_THROWS_AS(
      check_inhomogeneous_representation(ev, fcurve, zero, 0, grid.size() - 1),
      std::invalid_argument);
}

TEST_CASE("non-commuting rates exercise the ODE path") {
  // Sampled model: interpolation makes Q(t) genuinely time-varying.
  ProcessSpec spec{
      RateModel::sampled({0.0, 0.5, 1.0}, {q2(2.0, 1.0), q2(0.5, 2.0), q2(1.0, 1.0)}, 1.0),
      std::nullopt,
      {1.0, 0.0}};
  const TimeGrid grid = TimeGrid::make(spec, 64);
  const auto ev = build_evolution(spec, grid);
  CHECK(ev.cert().stochastic_ok);
  CHECK(ev.cert().ode_converged);
  CHECK(ev.cert().max_ode_error <= 1e-12);
  CHECK(ev.cert().max_substeps >= 2);  // RK4 actually subdivided

  // The assembled product agrees with one monolithic flow solve.
  const Mat direct = flow_interval(spec, 0.0, 1.0, 1e-13);
  CHECK(max_abs_diff(ev.transition(0, grid.size() - 1), direct) <= 1e-10);
}

TEST_CASE("piecewise rates split blocks at the break") {
  const Scenario scen = demo_piecewise_scenario(128);
  const TimeGrid grid = TimeGrid::make(scen.x, 128);
  const auto ev = build_evolution(scen.x, grid);
  CHECK(ev.cert().stochastic_ok);
  const std::size_t last = grid.size() - 1;
  // Against the closed form: both pieces are two-state constant chains, so
  // T = exp(0.5 Qa) exp(0.5 Qb) entrywise.
  Mat qa = q2(2.0, 1.0), qb = q2(1.5, 0.5);
  qa *= 0.5;
  qb *= 0.5;
  const Mat expect = expm(qa) * expm(qb);
  CHECK(max_abs_diff(ev.transition(0, last), expect) <= 1e-12);
}
