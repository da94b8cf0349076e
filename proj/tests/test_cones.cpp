#include "floerlib/cones.hpp"
#include "floerlib/io.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace floerlib;

namespace {
std::vector<Rat> rv(std::initializer_list<long long> xs) {
  std::vector<Rat> v;
  for (auto x : xs) v.emplace_back(x);
  return v;
}
}  // namespace

TEST_CASE("cone construction and facet derivation") {
  auto quad = cone_from_generators(2, {rv({1, 0}), rv({0, 1})});
  REQUIRE(quad.facets.size() == 2);
  REQUIRE(cone_contains_by_facets(quad, rv({3, 5})));
  REQUIRE_FALSE(cone_contains_by_facets(quad, rv({-1, 5})));

  auto trivial = cone_from_generators(2, {});
  REQUIRE(trivial.is_trivial());
  REQUIRE(cone_contains_by_facets(trivial, rv({0, 0})));
  REQUIRE_FALSE(cone_contains_by_facets(trivial, rv({1, 0})));

  auto wedge = cone_from_generators(2, {rv({1, 1}), rv({1, -1})});
  // facets x1 + x2 >= 0 and x1 - x2 >= 0
  REQUIRE(wedge.facets.size() == 2);
  REQUIRE(cone_contains_by_facets(wedge, rv({2, 0})));
  REQUIRE_FALSE(cone_contains_by_facets(wedge, rv({0, 2})));

  REQUIRE_THROWS_AS(cone_from_generators(2, {rv({1, 0, 0})}),
                    std::invalid_argument);
}

TEST_CASE("salience") {
  REQUIRE(is_salient(cone_from_generators(2, {rv({1, 0}), rv({0, 1})})));
  REQUIRE_FALSE(is_salient(cone_from_generators(2, {rv({1, 0}), rv({-1, 0})})));
  REQUIRE(is_salient(cone_from_generators(2, {rv({1, 1})})));
}

TEST_CASE("cone order") {
  auto ctx = make_context(cone_from_generators(2, {rv({1, 0}), rv({0, 1})}));
  REQUIRE(cone_leq(ctx, {0, 0}, {2, 3}));
  REQUIRE_FALSE(cone_leq(ctx, {1, 2}, {0, 5}));
  auto ray = make_context(cone_from_generators(2, {rv({1, 1})}));
  REQUIRE(cone_leq(ray, {0, 0}, {3, -3}));
  REQUIRE_THROWS_AS(cone_leq(ctx, {0}, {1, 2}), std::invalid_argument);
}

TEST_CASE("cofinal elements and certificates") {
  std::vector<GroupElement> gens = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  auto quad = make_context(cone_from_generators(2, {rv({1, 0}), rv({0, 1})}));
  REQUIRE(cofinal_element(quad, gens) == GroupElement{1, 1});

  auto ray = make_context(cone_from_generators(2, {rv({1, 1})}));
  auto y = cofinal_element(ray, gens);
  REQUIRE(y == GroupElement{1, 1});
  REQUIRE(cone_leq(ray, {3, -2}, g_scale(3, y)));  // 6 >= 1

  auto trivial = make_context(cone_from_generators(2, {}));
  REQUIRE(cofinal_element(trivial, gens) == GroupElement{0, 0});
  REQUIRE(ideal_member(trivial, 0, {5, -7}));
}

TEST_CASE("ideal membership") {
  auto ctx = make_context(cone_from_generators(2, {rv({1, 0}), rv({0, 1})}));
  cofinal_element(ctx, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  REQUIRE(ideal_member(ctx, 2, {3, 3}));
  REQUIRE_FALSE(ideal_member(ctx, 2, {5, 0}));
  REQUIRE(ideal_member(ctx, 0, {4, 1}));
}

TEST_CASE("search bound exceeded is reported") {
  // a very thin cone around the direction (5, 1): neither +-e2 nor small
  // combinations land inside at the default bound, the error names it
  auto ctx = make_context(
      cone_from_generators(2, {rv({1, 0}), rv({5, 1})}));
  (void)ctx;
  auto thin =
      make_context(cone_from_generators(2, {rv({100, 1}), rv({100, -1})}));
  bool threw = false;
  try {
    cofinal_element(thin, {{0, 1}, {0, -1}, {1, 0}, {-1, 0}}, 2);
  } catch (const CofinalSearchError&) {
    threw = true;
  }
  // with the tiny bound the search must either succeed with a certificate or
  // raise the documented error
  if (!threw) {
    REQUIRE(thin.y.has_value());
  }
}

TEST_CASE("cone file grammar round trip") {
  std::string text = "rank 2\n1 0\n1/2 1\n";
  auto cone = parse_cone_text(text);
  REQUIRE(cone.rank == 2);
  REQUIRE(cone.generators.size() == 2);
  REQUIRE(cone.generators[1][0] == Rat(1, 2));
  auto again = parse_cone_text(cone_to_text(cone));
  REQUIRE(again.generators == cone.generators);
  REQUIRE_THROWS(parse_cone_text("rank 2\n1 0 0\n"));
}

TEST_CASE("group element parsing") {
  REQUIRE(parse_group_element("[3,-2]", 2) == GroupElement{3, -2});
  REQUIRE_THROWS(parse_group_element("[3,-2]", 3));
  REQUIRE_THROWS(parse_group_element("3,-2", 2));
}
