#include "pfkit/rational.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <limits>

using pfkit::Rational;

TEST_CASE("rationals are kept in lowest terms with a positive denominator") {
  Rational r(6, -8);
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 4);
  CHECK(r.str() == "-3/4");
  CHECK(Rational(4, 2).str() == "2");
  CHECK(Rational(0, -5) == Rational());
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("parsing accepts integers and p/q") {
  CHECK(Rational::parse("1/2") == Rational(1, 2));
  CHECK(Rational::parse("-3") == Rational(-3));
  CHECK(Rational::parse("+10/4") == Rational(5, 2));
  CHECK_THROWS_AS(Rational::parse("0.5"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
  CHECK_THROWS(Rational::parse("1/0"));
}

TEST_CASE("arithmetic past 64 bits stays exact") {
  const Rational big(std::numeric_limits<std::int64_t>::max());
  auto sq = big * big;
  CHECK_FALSE(sq.is_small());
  CHECK(sq / big == big);
  CHECK((sq - sq).is_zero());
  auto tiny = Rational(1, std::numeric_limits<std::int64_t>::max()) * Rational(1, 3);
  CHECK(tiny * Rational(3) * big == Rational(1));
  // Demotes back to the fast path once the value fits.
  CHECK((sq / big).is_small());
}

TEST_CASE("field laws on random rationals") {
  pfkit::Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    auto a = testgen::rational(rng, 1000, 97);
    auto b = testgen::rational(rng, 1000, 97);
    auto c = testgen::rational(rng, 1000, 97);
    CHECK(a + b == b + a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - b) + b == a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK((a < b) == (a.to_double() < b.to_double() && a != b));
    CHECK(std::hash<Rational>{}(a) == std::hash<Rational>{}(Rational::parse(a.str())));
  }
}
