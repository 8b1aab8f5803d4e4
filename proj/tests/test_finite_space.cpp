#include "pfkit/finite_space.hpp"
#include "pfkit/fixtures.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pfkit;

namespace {

FiniteProbabilitySpace three_point_space() { return fixtures::three_point().space(); }

} // namespace

TEST_CASE("space construction validates masses") {
  CHECK_THROWS_WITH(FiniteProbabilitySpace({"a", "b"}, {Rational(1, 2), Rational(1, 3)}),
                    Catch::Matchers::ContainsSubstring("masses sum to 5/6"));
  CHECK_THROWS_AS(FiniteProbabilitySpace({"a", "b"}, {Rational(3, 2), Rational(-1, 2)}), ValidationError);
  CHECK_THROWS_AS(FiniteProbabilitySpace({"a", "a"}, {Rational(1, 2), Rational(1, 2)}), ValidationError);
  CHECK_THROWS_AS(FiniteProbabilitySpace({"a"}, {Rational(1, 2), Rational(1, 2)}), ValidationError);

  auto s = three_point_space();
  CHECK(s.positive_count() == 2);
  CHECK(s.is_null_atom(1));
  CHECK(s.positive_index(2) == 1);
  CHECK(s.index_of("3") == 2);
  CHECK_FALSE(s.index_of("4"));
}

TEST_CASE("measure") {
  auto s = three_point_space();
  CHECK(measure(s, s.make_set({0, 1})) == Rational(1, 2));
  CHECK(measure(s, s.empty_set()) == Rational(0));
  auto t = FiniteProbabilitySpace::with_masses({Rational(1, 3), Rational(1, 6), Rational(1, 2)});
  CHECK(measure(t, t.make_set({0, 1})) == Rational(1, 2));
  CHECK(measure(t, t.full_set()) == Rational(1));
}

TEST_CASE("sets from different spaces do not mix") {
  auto s = three_point_space();
  auto t = three_point_space(); // same data, different identity
  CHECK_THROWS_AS(measure(s, t.full_set()), StructuralError);
  CHECK_THROWS_AS(s.full_set() | t.full_set(), StructuralError);
  CHECK_THROWS_AS(algebra_distance(s, s.full_set(), t.full_set()), StructuralError);
}

TEST_CASE("measure algebra distance and classes") {
  auto s = three_point_space();
  auto a12 = s.make_set({0, 1});
  auto a1 = s.make_set({0});
  auto a3 = s.make_set({2});
  CHECK(algebra_distance(s, a12, a1) == Rational(0));
  CHECK(algebra_distance(s, a12, a12) == Rational(0));
  CHECK(algebra_distance(s, a1, a3) == Rational(1));
  CHECK(class_of(s, a12) == class_of(s, a1));
  CHECK(class_of(s, a12).canonical_bits() == a1.bits());
  CHECK(class_of(s, s.make_set({0, 2})) == class_of(s, s.full_set()));

  auto full = FiniteProbabilitySpace::with_masses({Rational(1, 4), Rational(3, 4)});
  auto b = full.make_set({1});
  CHECK(class_of(full, b).canonical_bits() == b.bits());
}

TEST_CASE("positive and negative parts") {
  Density f{{Rational(1, 2), Rational(-1, 4)}};
  auto p = positive_part(f);
  auto n = negative_part(f);
  CHECK(p.values == std::vector<Rational>{Rational(1, 2), Rational(0)});
  CHECK(n.values == std::vector<Rational>{Rational(0), Rational(1, 4)});
  Density g{{Rational(1), Rational(0)}};
  CHECK(negative_part(g).values == std::vector<Rational>{Rational(0), Rational(0)});
}

TEST_CASE("measure algebra properties on random spaces") {
  pfkit::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto space = FiniteProbabilitySpace::with_masses(testgen::masses(rng, 1 + rng.below(9)));
    auto a = testgen::set(rng, space);
    auto b = testgen::set(rng, space);
    auto c = testgen::set(rng, space);
    INFO("trial " << trial);
    CHECK(algebra_distance(space, a, c) <= algebra_distance(space, a, b) + algebra_distance(space, b, c));
    CHECK(algebra_distance(space, a, b) == algebra_distance(space, b, a));
    CHECK(algebra_distance(space, a, a).is_zero());
    CHECK((class_of(space, a) == class_of(space, b)) == algebra_distance(space, a, b).is_zero());

    auto nulls = space.make_set(space.positive_support().complement()) & testgen::set(rng, space);
    CHECK(class_of(space, a ^ nulls) == class_of(space, a));

    auto disjoint = b - a;
    CHECK(measure(space, a | disjoint) == measure(space, a) + measure(space, disjoint));
    CHECK(measure(space, a & b) <= measure(space, a));

    auto f = testgen::density(rng, space);
    CHECK(integral(space, f) == integral(space, positive_part(f)) - integral(space, negative_part(f)));
    auto p = positive_part(f), n = negative_part(f);
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(std::min(p.values[k], n.values[k]) == Rational(0));
      CHECK(p.values[k] - n.values[k] == f.values[k]);
    }
    CHECK(integral_over(space, f, a) + integral_over(space, f, a.complement()) == integral(space, f));
  }
}
