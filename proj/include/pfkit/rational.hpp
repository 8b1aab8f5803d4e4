#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational numbers with an int64 fast path.
 *
 * Values are kept in lowest terms with a positive denominator. While both
 * numerator and denominator fit in a signed 64-bit integer the arithmetic
 * runs on 128-bit intermediates; anything that overflows is promoted to a
 * boost::multiprecision::cpp_rational and demoted again as soon as it fits.
 * The representation is therefore canonical, which makes equality and
 * hashing structural.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pfkit {

// 128-bit intermediates (GCC/Clang extension).
__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

class Rational {
public:
  using BigInt = boost::multiprecision::cpp_int;
  using BigRational = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(std::int64_t value) : num_(value) { // NOLINT(google-explicit-constructor)
    if (value == kMin) promote(BigRational(BigInt(value)));
  }
  Rational(int value) : Rational(static_cast<std::int64_t>(value)) {} // NOLINT
  Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw std::domain_error("rational with zero denominator");
    assign(static_cast<i128>(numerator), static_cast<i128>(denominator));
  }
  explicit Rational(const BigRational& value) { assign_big(value); }

  /// Parses "p", "-p" or "p/q" (decimal integers, q != 0).
  static Rational parse(std::string_view text) {
    auto bad = [&] {
      return std::invalid_argument("malformed rational '" + std::string(text) + "'");
    };
    auto slash = text.find('/');
    auto num_text = text.substr(0, slash);
    auto den_text = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    auto digits_ok = [](std::string_view s, bool allow_sign) {
      if (allow_sign && !s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
      if (s.empty()) return false;
      for (char c : s)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (!digits_ok(num_text, true) || !digits_ok(den_text, false)) throw bad();
    std::string n(num_text);
    if (!n.empty() && n.front() == '+') n.erase(0, 1);
    BigInt num(n);
    BigInt den{std::string(den_text)};
    if (den == 0) throw std::invalid_argument("rational with zero denominator '" + std::string(text) + "'");
    return Rational(BigRational(num, den));
  }

  [[nodiscard]] bool is_small() const noexcept { return !big_; }
  [[nodiscard]] bool is_zero() const noexcept { return !big_ && num_ == 0; }
  [[nodiscard]] int sign() const noexcept {
    if (big_) return big_->sign();
    return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
  }
  [[nodiscard]] bool is_integer() const noexcept {
    return big_ ? boost::multiprecision::denominator(*big_) == 1 : den_ == 1;
  }

  [[nodiscard]] BigInt numerator() const {
    return big_ ? BigInt(boost::multiprecision::numerator(*big_)) : BigInt(num_);
  }
  [[nodiscard]] BigInt denominator() const {
    return big_ ? BigInt(boost::multiprecision::denominator(*big_)) : BigInt(den_);
  }
  [[nodiscard]] BigRational to_big() const {
    return big_ ? *big_ : BigRational(BigInt(num_), BigInt(den_));
  }

  [[nodiscard]] double to_double() const {
    if (big_) return big_->convert_to<double>();
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "p/q", or "p" for integers.
  [[nodiscard]] std::string str() const {
    if (big_) {
      auto n = boost::multiprecision::numerator(*big_);
      auto d = boost::multiprecision::denominator(*big_);
      return d == 1 ? n.str() : n.str() + "/" + d.str();
    }
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  [[nodiscard]] std::size_t hash() const noexcept {
    if (big_) return std::hash<std::string>{}(str());
    auto h = std::hash<std::int64_t>{}(num_);
    return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }

  Rational operator-() const {
    if (big_) return Rational(BigRational(-*big_));
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.den_ == b.den_) return from_parts(static_cast<i128>(a.num_) + b.num_, a.den_);
      return from_parts(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                        static_cast<i128>(a.den_) * b.den_);
    }
    return Rational(a.to_big() + b.to_big());
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.den_ == b.den_) return from_parts(static_cast<i128>(a.num_) - b.num_, a.den_);
      return from_parts(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                        static_cast<i128>(a.den_) * b.den_);
    }
    return Rational(a.to_big() - b.to_big());
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.num_ == 0 || b.num_ == 0) return Rational();
      return from_parts(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
    }
    return Rational(a.to_big() * b.to_big());
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("rational division by zero");
    if (a.is_small() && b.is_small()) {
      i128 n = static_cast<i128>(a.num_) * b.den_;
      i128 d = static_cast<i128>(a.den_) * b.num_;
      if (d < 0) {
        n = -n;
        d = -d;
      }
      return from_parts(n, d);
    }
    return Rational(a.to_big() / b.to_big());
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (a.is_small() != b.is_small()) return false; // canonical form
    if (a.is_small()) return a.num_ == b.num_ && a.den_ == b.den_;
    return *a.big_ == *b.big_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.den_ == b.den_) return a.num_ <=> b.num_;
      i128 l = static_cast<i128>(a.num_) * b.den_;
      i128 r = static_cast<i128>(b.num_) * a.den_;
      return l < r ? std::strong_ordering::less
                   : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    auto l = a.to_big();
    auto r = b.to_big();
    return l < r ? std::strong_ordering::less
                 : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
  using i128 = int128;
  using u128 = uint128;
  static constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

  static u128 gcd128(u128 a, u128 b) {
    if ((a >> 64) == 0 && (b >> 64) == 0)
      return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    while (b != 0) {
      u128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_parts(i128 n, i128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  // d != 0
  void assign(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      big_.reset();
      return;
    }
    u128 an = n < 0 ? static_cast<u128>(-n) : static_cast<u128>(n);
    u128 g = gcd128(an, static_cast<u128>(d));
    if (g != 1) {
      n /= static_cast<i128>(g);
      d /= static_cast<i128>(g);
    }
    if (n > kMin && n <= kMax && d <= kMax) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      big_.reset();
      return;
    }
    promote(BigRational(to_bigint(n), to_bigint(d)));
  }

  static BigInt to_bigint(i128 v) {
    bool neg = v < 0;
    u128 a = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    BigInt r = BigInt(static_cast<std::uint64_t>(a >> 64));
    r <<= 64;
    r += static_cast<std::uint64_t>(a);
    return neg ? BigInt(-r) : r;
  }

  void assign_big(const BigRational& v) {
    const auto& n = boost::multiprecision::numerator(v);
    const auto& d = boost::multiprecision::denominator(v);
    if (n > kMin && n <= kMax && d <= kMax) {
      num_ = n.convert_to<std::int64_t>();
      den_ = d.convert_to<std::int64_t>();
      big_.reset();
      return;
    }
    promote(v);
  }

  void promote(const BigRational& v) {
    num_ = 0;
    den_ = 1;
    big_ = std::make_shared<const BigRational>(v);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const BigRational> big_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

} // namespace pfkit

template <>
struct std::hash<pfkit::Rational> {
  std::size_t operator()(const pfkit::Rational& r) const noexcept { return r.hash(); }
};
