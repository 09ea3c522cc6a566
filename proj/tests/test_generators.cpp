#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mcomp/corpus.hpp"
#include "mcomp/generators.hpp"

using namespace mcomp;

namespace {

Mat q2(double a, double b) {
  Mat q(2, 2);
  q(0, 0) = -a; q(0, 1) = a;
  q(1, 0) = b;  q(1, 1) = -b;
  return q;
}

EvolutionSystem build_x(const Scenario& scen, int steps) {
  const TimeGrid grid = TimeGrid::make(scen.x, steps);
  return build_evolution(scen.x, grid);
}

}  // namespace

TEST_CASE("smooth rates: both one-sided estimates recover Q") {
  const Scenario scen = demo_scenario(1024);
  const auto ev = build_x(scen, 1024);
  const std::size_t mid = ev.grid().index_of(0.5);
  const Mat q = q2(2.0, 1.0);

  for (Side side : {Side::right, Side::left}) {
    const auto est = estimate_generator(ev, mid, side);
    CHECK(est.converged);
    CHECK_FALSE(est.diverged);
    CHECK(max_abs_diff(est.estimate, q) <= 1e-6);
    REQUIRE(est.table.size() == 4);
    CHECK(est.table[1].h == est.table[0].h / 2);
    // Quotient gaps shrink roughly linearly in h.
    CHECK(est.table[2].gap <= est.table[1].gap);
    CHECK(est.table[3].gap <= est.table[2].gap);
    CHECK(est.richardson_gap <= 1e-6);
  }
}

TEST_CASE("piecewise rates: the two sides see the two pieces") {
  const Scenario scen = demo_piecewise_scenario(1024);
  const auto ev = build_x(scen, 1024);
  const std::size_t brk = ev.grid().index_of(0.5);

  const auto right = estimate_generator(ev, brk, Side::right);
  const auto left = estimate_generator(ev, brk, Side::left);
  CHECK(right.converged);
  CHECK(left.converged);
  CHECK(max_abs_diff(right.estimate, q2(1.5, 0.5)) <= 1e-6);
  CHECK(max_abs_diff(left.estimate, q2(2.0, 1.0)) <= 1e-6);
  // The sides genuinely disagree: the break is visible in the estimates.
  CHECK(max_abs_diff(right.estimate, left.estimate) >= 0.4);
}

TEST_CASE("scheduled jumps make the left quotient diverge") {
  const Scenario scen = purejump_scenario(64);
  const auto ev = build_x(scen, 64);
  const std::size_t epoch = ev.grid().index_of(0.35);

  // Left windows always contain the kernel atom: (K - I)/h blows up as h -> 0.
  const auto left = estimate_generator(ev, epoch, Side::left);
  CHECK(left.diverged);
  CHECK_FALSE(left.converged);
  CHECK(left.table[3].gap > left.table[2].gap);

  // Right windows exclude the atom and see the (zero) rate part.
  const auto right = estimate_generator(ev, epoch, Side::right);
  CHECK(right.converged);
  CHECK(max_abs_diff(right.estimate, Mat(2, 2)) <= 1e-9);
}

TEST_CASE("estimate_generator rejects boundary knots") {
  const Scenario scen = demo_scenario(64);
  const auto ev = build_x(scen, 64);
  CHECK_THROWS_AS(estimate_generator(ev, 0, Side::left), std::invalid_argument);
  CHECK_THROWS_AS(estimate_generator(ev, ev.grid().size() - 1, Side::right),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_generator(ev, ev.grid().size(), Side::right),
                  std::invalid_argument);
}

TEST_CASE("apply_generator: rates, sides, and jump atoms") {
  const Vec f{0.0, 1.0};

  // Constant rates: Q f.
  ProcessSpec smooth{RateModel::constant(q2(2.0, 1.0), 1.0), std::nullopt, {1.0, 0.0}};
  const Vec qf = apply_generator(smooth, 0.3, Side::right, f);
  CHECK(qf[0] == 2.0);
  CHECK(qf[1] == -1.0);

  // Piecewise: side picks the piece at the break.
  ProcessSpec pw{RateModel::piecewise({0.5}, {q2(2.0, 1.0), q2(0.5, 3.0)}, 1.0),
                 std::nullopt,
                 {1.0, 0.0}};
  CHECK(apply_generator(pw, 0.5, Side::right, f)[0] == 0.5);
  CHECK(apply_generator(pw, 0.5, Side::left, f)[0] == 2.0);

  // At an epoch the atom (K - I) f wins, independent of side.
  Mat k(2, 2);
  k(0, 1) = 1.0;
  k(1, 1) = 1.0;
  ProcessSpec jumpy{RateModel::constant(q2(2.0, 1.0), 1.0),
                    JumpSchedule{{0.5}, {k}},
                    {1.0, 0.0}};
  const Vec atom_r = apply_generator(jumpy, 0.5, Side::right, f);
  const Vec atom_l = apply_generator(jumpy, 0.5, Side::left, f);
  CHECK(atom_r == Vec{1.0, 0.0});
  CHECK(atom_l == atom_r);

  CHECK_THROWS_AS(apply_generator(smooth, 0.3, Side::right, {1.0, 2.0, 3.0}),
                  std::invalid_argument);
}

TEST_CASE("spacetime_apply matches the backward-equation residuals") {
  const Scenario scen = demo_scenario(256);
  const auto ev = build_x(scen, 256);
  const std::size_t last = ev.grid().size() - 1;
  const Vec f{0.0, 1.0};
  const auto u = ev.backward_solution(f, last);
  const auto rc = check_backward_equation(ev, f, last);

  for (std::size_t k : {std::size_t{0}, std::size_t{17}, last / 2, last - 1}) {
    const Vec r = spacetime_apply(ev.spec(), ev.grid(), k, Side::right, u);
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    CHECK(m == rc.right[k]);  // same arithmetic, bitwise
  }
  const Vec rl = spacetime_apply(ev.spec(), ev.grid(), last, Side::left, u);
  double ml = 0.0;
  for (double v : rl) ml = std::max(ml, std::abs(v));
  CHECK(ml == rc.left[last]);

  CHECK_THROWS_AS(spacetime_apply(ev.spec(), ev.grid(), last, Side::right, u),
                  std::invalid_argument);
  CHECK_THROWS_AS(spacetime_apply(ev.spec(), ev.grid(), 0, Side::left, u),
                  std::invalid_argument);
}
