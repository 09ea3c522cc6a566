#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <stdexcept>

#include "mcomp/time_grid.hpp"

using namespace mcomp;

namespace {

Mat q2(double a, double b) {
  Mat q(2, 2);
  q(0, 0) = -a; q(0, 1) = a;
  q(1, 0) = b;  q(1, 1) = -b;
  return q;
}

ProcessSpec constant_spec() {
  return {RateModel::constant(q2(2.0, 1.0), 1.0), std::nullopt, {1.0, 0.0}};
}

}  // namespace

TEST_CASE("uniform grid covers [0, horizon]") {
  const auto spec = constant_spec();
  const auto g = TimeGrid::make(spec, 4);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.25);
  CHECK(g[2] == 0.5);
  CHECK(g[4] == 1.0);
  CHECK(g.horizon() == 1.0);
  CHECK(g.spacing(1) == 0.25);
}

TEST_CASE("rate kinks become knots") {
  ProcessSpec spec{RateModel::piecewise({0.3}, {q2(2, 1), q2(1, 1)}, 1.0),
                   std::nullopt,
                   {1.0, 0.0}};
  const auto g = TimeGrid::make(spec, 4);
  CHECK(g.size() == 6);  // 5 uniform + the break
  CHECK(g.has(0.3));
  CHECK(g[g.index_of(0.3)] == 0.3);
}

TEST_CASE("jump epochs and extra times become knots") {
  ProcessSpec spec{RateModel::constant(q2(2, 1), 1.0),
                   JumpSchedule{{0.35}, {Mat::identity(2)}},
                   {1.0, 0.0}};
  const std::array<double, 1> extra{0.9};
  const auto g = TimeGrid::make(spec, 4, extra);
  CHECK(g.has(0.35));
  CHECK(g.has(0.9));
  CHECK(g.size() == 7);
}

TEST_CASE("near-duplicate specials collapse onto the special value") {
  // A special within 1e-12 of the uniform knot 0.25 replaces it.
  const auto spec = constant_spec();
  const double special = 0.25 + 5e-13;
  const std::array<double, 1> extra{special};
  const auto g = TimeGrid::make(spec, 4, extra);
  CHECK(g.size() == 5);  // no extra knot
  CHECK(g[1] == special);  // the special wins the tie, bitwise
}

TEST_CASE("index_of is exact and refuses off-knot times") {
  const auto spec = constant_spec();
  const auto g = TimeGrid::make(spec, 4);
  CHECK(g.index_of(0.75) == 3);
  CHECK(g.index_of(0.75 + 1e-13) == 3);  // within lookup tolerance
  CHECK_THROWS_AS(g.index_of(0.6), std::invalid_argument);
  CHECK_FALSE(g.has(0.6));
  CHECK(g.has(1.0));
}

TEST_CASE("two specs contribute their kinks jointly") {
  const ProcessSpec a{RateModel::piecewise({0.3}, {q2(2, 1), q2(1, 1)}, 1.0),
                      std::nullopt,
                      {1.0, 0.0}};
  const ProcessSpec b{RateModel::piecewise({0.6}, {q2(1, 1), q2(2, 1)}, 1.0),
                      std::nullopt,
                      {1.0, 0.0}};
  const std::array<const ProcessSpec*, 2> specs{&a, &b};
  const auto g = TimeGrid::make(1.0, 4, specs);
  CHECK(g.has(0.3));
  CHECK(g.has(0.6));
  CHECK(g.size() == 7);
}
