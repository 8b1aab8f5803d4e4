#include "pfkit/audit.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace pfkit;

TEST_CASE("generator is deterministic and sound") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SystemGenerator g;
    g.seed = seed;
    auto a = generate_system(g);
    auto b = generate_system(g);
    CHECK(a.targets() == b.targets());
    CHECK(a.space().masses() == b.space().masses());
    CHECK(a.space().labels() == b.space().labels());
    CHECK_NOTHROW(check_measure_preserving(a.space(), a.targets()));
    CHECK(a.space().positive_count() <= g.max_positive_atoms);
    CHECK(a.atom_count() - a.space().positive_count() <= g.max_null_atoms);
    for (const auto& m : a.space().masses()) CHECK(m.denominator() <= g.mass_denominator_bound);
    CHECK(oracle::has_generated_shape(a.space(), a.targets()));
  }
}

TEST_CASE("generator produces nontrivial permutations and null chains") {
  std::size_t non_identity = 0, null_to_null = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SystemGenerator g;
    g.seed = seed;
    auto phi = generate_system(g);
    if (!phi.is_identity_on_positive()) ++non_identity;
    for (std::size_t x = 0; x < phi.atom_count(); ++x)
      if (phi.space().is_null_atom(x) && phi.space().is_null_atom(phi(x))) ++null_to_null;
  }
  CHECK(non_identity > 30);
  CHECK(null_to_null > 30);
}

TEST_CASE("distinct masses without null atoms force the identity") {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    SystemGenerator g;
    g.seed = seed;
    g.max_null_atoms = 0;
    auto phi = generate_system(g);
    const auto& m = phi.space().masses();
    std::set<Rational> distinct(m.begin(), m.end());
    if (distinct.size() == m.size()) CHECK(phi.is_identity_on_positive());
  }
}

TEST_CASE("fixture ids reproduce named systems") {
  SystemGenerator g;
  g.fixture = "three_point";
  auto phi = generate_system(g);
  CHECK(phi.targets() == std::vector<std::size_t>{0, 2, 2});
  CHECK(phi.space().masses() == std::vector<Rational>{Rational(1, 2), Rational(0), Rational(1, 2)});
  g.fixture = "nope";
  CHECK_THROWS_AS(generate_system(g), ValidationError);
  SystemGenerator bad;
  bad.max_positive_atoms = 0;
  CHECK_THROWS_AS(generate_system(bad), ValidationError);
}

TEST_CASE("audits pass on fixtures") {
  for (const auto& name : fixtures::names()) {
    INFO(name);
    auto failures = audit_system(*fixtures::by_name(name));
    for (const auto& f : failures) UNSCOPED_INFO(f.theorem_id << ": " << f.route_values);
    CHECK(failures.empty());
  }
}

TEST_CASE("fixture equivalences") {
  auto three = FiniteSystem(fixtures::three_point());
  CHECK(three.powers_converge());
  CHECK(completions_equal(three.space(), three.tail_algebra(), three.invariant_algebra()));
  auto swap = FiniteSystem(fixtures::two_atom_swap());
  CHECK_FALSE(swap.powers_converge());
  CHECK_FALSE(completions_equal(swap.space(), swap.tail_algebra(), swap.invariant_algebra()));
  CHECK_FALSE(set_orbit(swap.map(), swap.space().make_set({0}), Direction::forward).converges());
}

TEST_CASE("audit reports are deterministic and independent of the worker count") {
  SystemGenerator g;
  g.seed = 2024;
  auto one = run_audit(kAllAudits, g, 60, 1);
  auto again = run_audit(kAllAudits, g, 60, 1);
  auto four = run_audit(kAllAudits, g, 60, 4);
  CHECK(one.same_content(again));
  CHECK(one.same_content(four));
  CHECK(one.passed());
  CHECK(one.systems_tested == 60);
}

TEST_CASE("report merging is order independent") {
  AuditReport a{"x", 1, 2, 1, {{5, "b", ""}, {1, "a", ""}}, 0};
  AuditReport b{"x", 1, 2, 1, {{3, "c", ""}}, 0};
  auto ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  CHECK(ab.failures == ba.failures);
  CHECK(ab.failures.front().seed == 1);
}
