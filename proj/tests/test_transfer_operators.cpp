#include "pfkit/fixtures.hpp"
#include "pfkit/transfer_operators.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pfkit;

namespace {

MarkovMatrix swap_matrix() {
  return MarkovMatrix({Rational(1, 2), Rational(1, 2)}, {Rational(0), Rational(1), Rational(1), Rational(0)});
}

Rational pairing(const FiniteProbabilitySpace& s, const Density& f, const Density& g) {
  Rational total;
  for (std::size_t k = 0; k < f.size(); ++k) total += s.mass(s.positive_atoms()[k]) * f.values[k] * g.values[k];
  return total;
}

} // namespace

TEST_CASE("transfer operator of the fixtures") {
  auto three = fixtures::three_point();
  auto p = build_pf(three);
  CHECK(p.dimension() == 2);
  CHECK(p.is_identity());
  CHECK(build_koopman(three).is_identity());

  auto id = fixtures::identity({Rational(1, 6), Rational(1, 3), Rational(1, 2)});
  CHECK(build_pf(id).is_identity());
  CHECK(build_koopman(id).is_identity());

  auto swap = fixtures::two_atom_swap();
  CHECK(build_pf(swap) == swap_matrix());
  CHECK(build_koopman(swap) == swap_matrix());
  CHECK(build_pf(swap) * build_koopman(swap) == MarkovMatrix::identity(swap_matrix().weights()));
}

TEST_CASE("power sequences") {
  auto three = power_sequence(build_pf(fixtures::three_point()));
  CHECK(three.converges);
  REQUIRE(three.limit);
  CHECK(three.limit->is_identity());

  auto swap = power_sequence(swap_matrix());
  CHECK_FALSE(swap.converges);
  CHECK(swap.period == 2);
  CHECK_FALSE(swap.limit);

  auto id = power_sequence(MarkovMatrix::identity({Rational(1)}));
  CHECK(id.converges);
  CHECK(id.preperiod == 0);

  Density f{{Rational(1), Rational(-1)}};
  CHECK(apply_power(swap_matrix(), f, 3).values == std::vector<Rational>{Rational(-1), Rational(1)});
  CHECK(apply_power(swap_matrix(), f, 4) == f);
}

TEST_CASE("Cesaro limits and conditional expectations") {
  auto half = Rational(1, 2);
  CHECK(cesaro_limit(swap_matrix()) == MarkovMatrix({half, half}, {half, half, half, half}));
  auto id = MarkovMatrix::identity({Rational(1, 3), Rational(2, 3)});
  CHECK(cesaro_limit(id) == id);

  auto three = fixtures::three_point();
  const auto& s = three.space();
  auto inv = sigma_inv(three);
  CHECK(cesaro_limit(build_pf(three)).is_identity());
  CHECK(cesaro_limit(build_pf(three)) == expectation_operator(s, inv));

  auto f = indicator(s, s.make_set({0, 1}));
  auto e = conditional_expectation(s, inv, f);
  CHECK(e.values == std::vector<Rational>{Rational(1), Rational(0)});
  CHECK(*density_sequence(build_pf(three), f).limit == e);

  Density g{{Rational(3), Rational(-1)}};
  CHECK(conditional_expectation(s, SigmaSubAlgebra::trivial(3), g) == constant_density(s, integral(s, g)));
  CHECK(conditional_expectation(s, inv, e) == e);
}

TEST_CASE("rank-one projection") {
  auto s = FiniteProbabilitySpace::with_masses({Rational(1, 2), Rational(1, 2)});
  auto r = rank_one_projection(s);
  CHECK(r.apply(Density{{Rational(2), Rational(0)}}).values == std::vector<Rational>{Rational(1), Rational(1)});
  CHECK(r * r == r);
  CHECK(r.is_bi_markov());
  CHECK(cesaro_limit(swap_matrix()) == rank_one_projection(fixtures::two_atom_swap().space()));
}

TEST_CASE("support of densities") {
  auto three = fixtures::three_point();
  const auto& s = three.space();
  auto p = build_pf(three);
  auto a = s.make_set({0, 1});
  for (std::size_t n = 0; n < 4; ++n) {
    auto supp = support_density(s, apply_power(p, indicator(s, a), n));
    CHECK(supp.canonical_bits() == s.make_set({0}).bits());
    CHECK(supp.canonical_bits().is_subset_of(image(three, a).bits()));
  }
  CHECK(support_density(s, indicator(s, s.make_set({2}))) == class_of(s, s.make_set({2})));
  CHECK_THROWS_AS(support_density(s, Density{{Rational(1), Rational(-1)}}), NegativeDensity);
}

TEST_CASE("operator identities on random systems") {
  pfkit::Rng rng(5);
  auto systems = testgen::systems(300, 123);
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto& phi = systems[i];
    const auto& s = phi.space();
    INFO("system " << i);
    auto p = build_pf(phi);
    auto t = build_koopman(phi);
    CHECK(transfer_identity_holds(phi, p));
    CHECK(adjointness_holds(p, t));
    CHECK(p.is_bi_markov());
    CHECK(t.is_bi_markov());
    CHECK(p.as_permutation());
    CHECK(p.weighted_adjoint() == t);

    auto inv = sigma_inv(phi);
    CHECK(cesaro_limit(p) == expectation_operator(s, inv));
    auto seq = power_sequence(p);
    CHECK(seq.converges == p.is_identity());
    if (p.is_identity()) CHECK(seq.preperiod == 0);

    for (int k = 0; k < 5; ++k) {
      auto f = testgen::density(rng, s);
      auto g = testgen::density(rng, s);
      auto a = testgen::set(rng, s);
      auto pf = p.apply(f);
      CHECK(integral_over(s, pf, a) == integral_over(s, f, preimage(phi, a)));
      CHECK(pairing(s, pf, g) == pairing(s, f, t.apply(g)));
      CHECK(l1_norm(s, pf) <= l1_norm(s, f));
      CHECK(integral(s, pf) == integral(s, f));
      auto e = conditional_expectation(s, inv, f);
      CHECK(conditional_expectation(s, inv, e) == e);
      CHECK(integral(s, e) == integral(s, f));
      for (const auto& block : inv.blocks()) {
        auto bset = s.make_set(block);
        CHECK(integral_over(s, e, bset) == integral_over(s, f, bset));
      }

      auto ia = indicator(s, a);
      auto hull = support_density(s, conditional_expectation(s, inv, ia)).canonical_bits();
      CHECK(class_of(s, a).canonical_bits().is_subset_of(hull));
      for (std::size_t m = 0; m <= 2 * s.atom_count(); ++m)
        CHECK(support_density(s, apply_power(p, ia, m)).canonical_bits().is_subset_of(hull));
    }
  }
}
