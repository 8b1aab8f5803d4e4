#include "pfkit/fixtures.hpp"
#include "pfkit/mixing_diagnostics.hpp"
#include "pfkit/oracles.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pfkit;

TEST_CASE("classification of the fixtures") {
  FiniteSystem three(fixtures::three_point());
  CHECK_FALSE(is_ergodic(three));
  CHECK_FALSE(is_mixing(three));
  CHECK_FALSE(is_exact(three));
  CHECK(ergodicity_routes(three).positive_invariant_blocks == 2);

  FiniteSystem swap(fixtures::two_atom_swap());
  CHECK(is_ergodic(swap));
  CHECK_FALSE(is_mixing(swap));
  CHECK_FALSE(is_exact(swap));
  CHECK_FALSE(exactness_routes(swap).strong_rank_one);

  FiniteSystem id(fixtures::identity({Rational(1, 6), Rational(1, 3), Rational(1, 2)}));
  CHECK_FALSE(is_ergodic(id));
  CHECK(fixed_space_dimension(id.pf()) == 3);

  FiniteSystem single(fixtures::single_atom(3));
  CHECK(is_ergodic(single));
  CHECK(is_mixing(single));
  CHECK(is_exact(single));
}

TEST_CASE("uniform and local defects on the three-atom system") {
  FiniteSystem sys(fixtures::three_point());
  const auto& s = sys.space();
  auto b = s.make_set({0});
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(uniform_mixing_defect(sys, b, n) == Rational(1, 4));
    CHECK(uniform_mixing_defect(sys, b, n) == oracle::uniform_defect(sys.map(), b, n));
    CHECK(local_uniform_mixing_defect(sys, b, b, n) == Rational(1, 4));
    CHECK(local_uniform_mixing_defect(sys, b, s.full_set(), n) == uniform_mixing_defect(sys, b, n));
    CHECK(uniform_mixing_defect(sys, s.empty_set(), n).is_zero());
    CHECK(uniform_mixing_defect(sys, s.full_set(), n).is_zero());
  }
  CHECK(*uniform_defect_limit(sys, b) == Rational(1, 4));
  CHECK_THROWS_AS(local_uniform_mixing_defect(sys, b, s.make_set({1}), 0), NullTrace);
}

TEST_CASE("lower-bound defect and witnesses") {
  FiniteSystem sys(fixtures::three_point());
  const auto& s = sys.space();
  auto b = s.make_set({0});
  // P 1_B - (1/2) 1_{3} has negative part 1/2 on atom 3, of mass 1/2.
  CHECK(ding_defect(sys, b, s.make_set({2}), Rational(1, 2), 1) == Rational(-1, 4));
  CHECK(oracle::ding_defect(sys.map(), b, s.make_set({2}), Rational(1, 2), 1) == Rational(-1, 4));
  for (std::size_t n = 0; n < 4; ++n) CHECK(ding_defect(sys, b, b, Rational(1), n).is_zero());

  auto w = find_lower_bound_witness(sys, b);
  REQUIRE(w);
  CHECK(w->d == s.make_set({0}));
  CHECK(w->c == Rational(1));
  CHECK_THROWS_AS(ding_defect(sys, s.make_set({1}), b, Rational(1), 0), ValidationError);
  CHECK_THROWS_AS(ding_defect(sys, b, b, Rational(0), 0), ValidationError);

  FiniteSystem swap(fixtures::two_atom_swap());
  CHECK_FALSE(find_lower_bound_witness(swap, swap.space().make_set({0})));
  CHECK_FALSE(search_lower_bound_witness(swap, swap.space().make_set({0})));

  FiniteSystem single(fixtures::single_atom());
  auto ws = find_lower_bound_witness(single, single.space().full_set());
  REQUIRE(ws);
  CHECK(ws->c == Rational(1));
  CHECK(class_of(single.space(), ws->d) == class_of(single.space(), single.space().full_set()));
}

TEST_CASE("image defect") {
  FiniteSystem sys(fixtures::three_point());
  const auto& s = sys.space();
  for (std::size_t n = 0; n < 4; ++n) {
    CHECK(rice_defect(sys, s.full_set(), n).is_zero());
    CHECK(rice_defect(sys, s.make_set({1}), n) == oracle::rice_defect(sys.map(), s.make_set({1}), n));
    // A = {1}: a = 1/2, mu(phi^n A) = 1/2.
    CHECK(rice_defect(sys, s.make_set({0}), n) == Rational(1, 4));
  }
  CHECK(*rice_defect_limit(sys, s.make_set({0})) == Rational(1, 4));
  // A null 2-cycle never reaches positive mass: a = 0 and every defect is 0.
  FiniteProbabilitySpace space({"p", "z0", "z1"}, {Rational(1), Rational(0), Rational(0)});
  FiniteSystem cycle(MeasurePreservingMap(space, {0, 2, 1}));
  for (std::size_t n = 0; n < 3; ++n) CHECK(rice_defect(cycle, space.make_set({1}), n).is_zero());
  // A null atom feeding the positive atom: a = 1 although mu(A) = 0.
  FiniteSystem single(fixtures::single_atom());
  CHECK(rice_defect(single, single.space().make_set({2}), 0) == Rational(1));
  CHECK(rice_defect(single, single.space().make_set({2}), 2).is_zero());
}

TEST_CASE("Lin's criterion") {
  FiniteSystem three(fixtures::three_point());
  const auto& s = three.space();
  auto f = indicator(s, s.make_set({0}));
  CHECK(lin_test(three, f - conditional_expectation(s, three.invariant_algebra(), f)));
  CHECK_FALSE(lin_test(three, constant_density(s, Rational(1))));

  FiniteSystem swap(fixtures::two_atom_swap());
  Density g{{Rational(1), Rational(-1)}};
  CHECK_FALSE(lin_test(swap, g));
  CHECK_FALSE(density_sequence(swap.pf(), g).converges);
}

TEST_CASE("profiles respect exact => mixing => ergodic") {
  for (const auto& phi : fixtures::all()) {
    FiniteSystem sys(phi);
    auto p = mixing_profile(sys, phi.space().full_set(), 3);
    CHECK(p.defects.size() == 4);
    if (p.exact) CHECK(p.mixing);
    if (p.mixing) CHECK(p.ergodic);
  }
}

TEST_CASE("closed forms match subset enumeration on random systems") {
  pfkit::Rng rng(17);
  auto systems = testgen::systems(150, 77);
  for (std::size_t i = 0; i < systems.size(); ++i) {
    FiniteSystem sys(systems[i]);
    const auto& s = sys.space();
    INFO("system " << i);
    for (int k = 0; k < 4; ++k) {
      auto b = testgen::set(rng, s);
      auto d = s.make_set({s.positive_atoms()[rng.below(s.positive_count())]});
      auto c = pfkit::abs(testgen::rational(rng)) + Rational(1, 7);
      for (std::size_t n = 0; n < 3; ++n) {
        CHECK(uniform_mixing_defect(sys, b, n) == oracle::uniform_defect(sys.map(), b, n));
        CHECK(local_uniform_mixing_defect(sys, b, d, n) == oracle::local_defect(sys.map(), b, d, n));
        CHECK(rice_defect(sys, b, n) == oracle::rice_defect(sys.map(), b, n));
        if (measure(s, b).sign() > 0) {
          auto dd = ding_defect(sys, b, d, c, n);
          CHECK(dd == oracle::ding_defect(sys.map(), b, d, c, n));
          CHECK(dd <= Rational(0));
        }
      }
    }
    auto r = exactness_routes(sys);
    CHECK(r.tail_trivial == r.strong_rank_one);
    CHECK(r.strong_rank_one == r.images_fill_space);
    CHECK(is_exact(sys) == (s.positive_count() == 1));
  }
}
