#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "mcomp/state_space.hpp"

using namespace mcomp;

TEST_CASE("order closure is reflexive and transitive") {
  const auto s = StateSpace::make(3, {}, {{0, 1}, {1, 2}});
  CHECK(s.has_order());
  for (int i = 0; i < 3; ++i) CHECK(s.leq(i, i));
  CHECK(s.leq(0, 1));
  CHECK(s.leq(1, 2));
  CHECK(s.leq(0, 2));  // closure
  CHECK_FALSE(s.leq(1, 0));
  CHECK_FALSE(s.leq(2, 0));
}

TEST_CASE("constructor rejects bad inputs") {
  CHECK_THROWS_AS(StateSpace::make(0), std::invalid_argument);
  CHECK_THROWS_AS(StateSpace::make(2, {"a"}), std::invalid_argument);
  CHECK_THROWS_AS(StateSpace::make(2, {}, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(StateSpace::make(2, {}, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("total orders are detected and ranked") {
  // Permuted chain 2 < 0 < 1.
  const auto s = StateSpace::make(3, {}, {{2, 0}, {0, 1}});
  CHECK(s.is_total_order());
  const auto order = s.chain_order();
  REQUIRE(order.size() == 3);
  CHECK(order[0] == 2);
  CHECK(order[1] == 0);
  CHECK(order[2] == 1);

  // V shape: 0 and 1 incomparable below 2.
  const auto v = StateSpace::make(3, {}, {{0, 2}, {1, 2}});
  CHECK(v.has_order());
  CHECK_FALSE(v.is_total_order());

  CHECK_FALSE(StateSpace::make(3).has_order());
}

TEST_CASE("is_increasing respects the order and the tolerance") {
  const auto s = StateSpace::make(3, {}, {{0, 1}, {1, 2}});
  CHECK(is_increasing({{0.0, 0.5, 1.0}, "up"}, s));
  CHECK(is_increasing({{1.0, 1.0, 1.0}, "const"}, s));
  CHECK_FALSE(is_increasing({{0.0, 1.0, 0.5}, "bump"}, s));
  // A dip of 1e-12 passes with matching slack.
  CHECK(is_increasing({{0.0, 0.5, 0.5 - 1e-12}, "dip"}, s, 1e-12));
  CHECK_FALSE(is_increasing({{0.0, 0.5, 0.5 - 1e-12}, "dip"}, s, 0.0));
}

TEST_CASE("increasing cone generators: chain and partial order") {
  // Chain on 3 states: constant plus the two suffix indicators.
  const auto chain = StateSpace::make(3, {}, {{0, 1}, {1, 2}});
  const auto cone = increasing_cone(chain);
  REQUIRE(cone.generators.size() == 3);
  CHECK(cone.generators[0].values == Vec{1.0, 1.0, 1.0});
  CHECK(cone.generators[1].values == Vec{0.0, 1.0, 1.0});
  CHECK(cone.generators[2].values == Vec{0.0, 0.0, 1.0});

  // V shape 0<2, 1<2: nonempty up-sets are {2}, {0,2}, {1,2}, {0,1,2};
  // the full set is the constant, so 4 generators in total.
  const auto v = StateSpace::make(3, {}, {{0, 2}, {1, 2}});
  const auto vcone = increasing_cone(v);
  CHECK(vcone.generators.size() == 4);
  for (const auto& g : vcone.generators) CHECK(is_increasing(g, v));

  CHECK_THROWS_AS(increasing_cone(StateSpace::make(3)), std::invalid_argument);
}

TEST_CASE("all_bounded_cone spans every function") {
  const auto s = StateSpace::make(3);
  const auto cone = all_bounded_cone(s);
  CHECK(cone.generators.size() == 6);
  CHECK(is_in_cone({{0.3, -2.0, 5.0}, "any"}, cone, 1e-9));
}

TEST_CASE("is_in_cone: increasing kind checks the order directly") {
  const auto s = StateSpace::make(3, {}, {{0, 1}, {1, 2}});
  const auto cone = increasing_cone(s);
  CHECK(is_in_cone({{-1.0, 0.0, 2.0}, "up"}, cone, 1e-9));
  CHECK_FALSE(is_in_cone({{0.0, 1.0, 0.5}, "bump"}, cone, 1e-9));
}

TEST_CASE("is_in_cone: custom kind fits nonnegative weights") {
  const auto s = StateSpace::make(3);
  const auto cone = custom_cone(
      s, {{{0.0, 1.0, 1.0}, "g1"}, {{0.0, 0.0, 1.0}, "g2"}});
  // 0.5*g1 + 0.3*g2 - 0.2: representable including the negative constant.
  CHECK(is_in_cone({{-0.2, 0.3, 0.6}, "mix"}, cone, 1e-9));
  // A function decreasing in a coordinate both generators increase in.
  CHECK_FALSE(is_in_cone({{1.0, 0.0, 0.0}, "down"}, cone, 1e-9));
  CHECK_THROWS_AS(custom_cone(s, {}), std::invalid_argument);
  CHECK_THROWS_AS(is_in_cone({{1.0, 2.0}, "short"}, cone, 1e-9),
                  std::invalid_argument);
}
