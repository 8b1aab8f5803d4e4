#pragma once

/**
 * @file dyadic.hpp
 * @brief Exact model of the doubling map x -> 2x mod 1 on [0, 1).
 *
 * Sets are finite unions of half-open intervals with dyadic endpoints and
 * densities are step functions on a uniform dyadic grid, so images,
 * preimages and the transfer operator
 *
 *     (Pf)(x) = (f(x/2) + f((x+1)/2)) / 2
 *
 * are computed without rounding. A step function on level L (2^L cells)
 * is mapped to level L-1, so the powers of P reach a constant after L steps.
 */

#include "pfkit/errors.hpp"
#include "pfkit/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace pfkit::dyadic {

inline constexpr int kMaxLevel = 62;

/// num / 2^level, kept with odd numerator (or level 0).
class Dyadic {
public:
  constexpr Dyadic() = default;
  Dyadic(std::int64_t num, int level) : num_(num), level_(level) {
    if (level < 0 || level > kMaxLevel) throw ValidationError("dyadic level out of range");
    normalize();
  }

  [[nodiscard]] std::int64_t numerator() const noexcept { return num_; }
  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] Rational value() const { return {num_, std::int64_t{1} << level_}; }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(std::int64_t{1} << level_); }

  /// Numerator at a finer level.
  [[nodiscard]] std::int64_t at_level(int level) const { return num_ << (level - level_); }

  [[nodiscard]] Dyadic doubled() const { return level_ > 0 ? Dyadic(num_, level_ - 1) : Dyadic(num_ * 2, 0); }
  [[nodiscard]] Dyadic halved() const {
    if (level_ + 1 > kMaxLevel) throw ValidationError("dyadic level would exceed the supported maximum");
    return {num_, level_ + 1};
  }
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    int l = std::max(a.level_, b.level_);
    return {a.at_level(l) + b.at_level(l), l};
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    int l = std::max(a.level_, b.level_);
    return {a.at_level(l) - b.at_level(l), l};
  }
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    int l = std::max(a.level_, b.level_);
    return a.at_level(l) <=> b.at_level(l);
  }

  [[nodiscard]] std::string str() const { return value().str(); }

private:
  void normalize() {
    if (num_ == 0) {
      level_ = 0;
      return;
    }
    while (level_ > 0 && num_ % 2 == 0) {
      num_ /= 2;
      --level_;
    }
  }

  std::int64_t num_ = 0;
  int level_ = 0;
};

inline const Dyadic kZero{0, 0};
inline const Dyadic kOne{1, 0};

struct Interval {
  Dyadic lo;
  Dyadic hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of half-open dyadic intervals in [0, 1), normalized: sorted,
/// disjoint, nonempty and with touching intervals merged.
class DyadicSet {
public:
  DyadicSet() = default;
  explicit DyadicSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) { normalize(); }

  static DyadicSet full() { return DyadicSet({{kZero, kOne}}); }
  /// [num/2^level, (num+1)/2^level)
  static DyadicSet cell(std::int64_t num, int level) { return DyadicSet({{Dyadic(num, level), Dyadic(num + 1, level)}}); }

  [[nodiscard]] const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }

  [[nodiscard]] Rational measure() const {
    Rational m;
    for (const auto& iv : intervals_) m += (iv.hi - iv.lo).value();
    return m;
  }

  /// Smallest k with all endpoints in 2^-k Z.
  [[nodiscard]] int level() const noexcept {
    int l = 0;
    for (const auto& iv : intervals_) l = std::max({l, iv.lo.level(), iv.hi.level()});
    return l;
  }

  friend DyadicSet operator|(const DyadicSet& a, const DyadicSet& b) {
    auto all = a.intervals_;
    all.insert(all.end(), b.intervals_.begin(), b.intervals_.end());
    return DyadicSet(std::move(all));
  }
  friend DyadicSet operator&(const DyadicSet& a, const DyadicSet& b) {
    std::vector<Interval> out;
    for (const auto& x : a.intervals_)
      for (const auto& y : b.intervals_) {
        auto lo = std::max(x.lo, y.lo);
        auto hi = std::min(x.hi, y.hi);
        if (lo < hi) out.push_back({lo, hi});
      }
    return DyadicSet(std::move(out));
  }
  [[nodiscard]] DyadicSet complement() const {
    std::vector<Interval> out;
    Dyadic cursor = kZero;
    for (const auto& iv : intervals_) {
      if (cursor < iv.lo) out.push_back({cursor, iv.lo});
      cursor = iv.hi;
    }
    if (cursor < kOne) out.push_back({cursor, kOne});
    return DyadicSet(std::move(out));
  }

  friend bool operator==(const DyadicSet&, const DyadicSet&) = default;

  /// "[a,b) u [c,d)" with rational endpoints; "{}" when empty.
  [[nodiscard]] std::string str() const {
    if (intervals_.empty()) return "{}";
    std::string s;
    for (const auto& iv : intervals_) {
      if (!s.empty()) s += " u ";
      s += "[" + iv.lo.str() + "," + iv.hi.str() + ")";
    }
    return s;
  }

private:
  void normalize() {
    for (const auto& iv : intervals_)
      if (iv.lo < kZero || kOne < iv.hi) throw ValidationError("dyadic interval leaves [0,1)");
    std::erase_if(intervals_, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
      if (!merged.empty() && !(merged.back().hi < iv.lo))
        merged.back().hi = std::max(merged.back().hi, iv.hi);
      else
        merged.push_back(iv);
    }
    intervals_ = std::move(merged);
  }

  std::vector<Interval> intervals_;
};

/// Image under x -> 2x mod 1: [a,b) goes to [2a,2b) reduced mod 1.
inline DyadicSet dyadic_image(const DyadicSet& a) {
  static const Dyadic half{1, 1};
  std::vector<Interval> out;
  for (const auto& iv : a.intervals()) {
    if (!(iv.hi - iv.lo < half)) return DyadicSet::full();
    auto lo = iv.lo.doubled();
    auto hi = iv.hi.doubled();
    if (!(kOne < hi)) {
      out.push_back({lo, hi});
    } else if (!(lo < kOne)) {
      out.push_back({lo - kOne, hi - kOne});
    } else {
      out.push_back({lo, kOne});
      out.push_back({kZero, hi - kOne});
    }
  }
  return DyadicSet(std::move(out));
}

/// Preimage: [a,b) pulls back to [a/2,b/2) u [(a+1)/2,(b+1)/2).
inline DyadicSet dyadic_preimage(const DyadicSet& a) {
  if (a.level() >= kMaxLevel) throw ValidationError("dyadic level would exceed the supported maximum");
  std::vector<Interval> out;
  for (const auto& iv : a.intervals()) {
    out.push_back({iv.lo.halved(), iv.hi.halved()});
    out.push_back({(iv.lo + kOne).halved(), (iv.hi + kOne).halved()});
  }
  return DyadicSet(std::move(out));
}

/// Piecewise constant function on the 2^level cells [j/2^level, (j+1)/2^level).
class DyadicStepFunction {
public:
  DyadicStepFunction() : values_{Rational()} {}
  DyadicStepFunction(int level, std::vector<Rational> values) : level_(level), values_(std::move(values)) {
    if (level < 0 || level > 30) throw ValidationError("step function level out of range");
    if (values_.size() != (std::size_t{1} << level)) throw StructuralError("step function needs 2^level values");
  }

  static DyadicStepFunction constant(const Rational& c) { return {0, {c}}; }

  static DyadicStepFunction indicator(const DyadicSet& a) {
    int level = a.level();
    std::vector<Rational> v(std::size_t{1} << level);
    for (const auto& iv : a.intervals())
      for (auto j = iv.lo.at_level(level); j < iv.hi.at_level(level); ++j) v[static_cast<std::size_t>(j)] = Rational(1);
    return {level, std::move(v)};
  }

  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] const std::vector<Rational>& values() const noexcept { return values_; }

  [[nodiscard]] DyadicStepFunction refined(int level) const {
    if (level < level_) throw StructuralError("cannot refine to a coarser level");
    auto factor = std::size_t{1} << (level - level_);
    std::vector<Rational> v;
    v.reserve(values_.size() * factor);
    for (const auto& x : values_) v.insert(v.end(), factor, x);
    return {level, std::move(v)};
  }

  /// Same function on the coarsest level that represents it.
  [[nodiscard]] DyadicStepFunction normalized() const {
    auto f = *this;
    while (f.level_ > 0) {
      bool pairs_equal = true;
      for (std::size_t j = 0; j < f.values_.size() && pairs_equal; j += 2) pairs_equal = f.values_[j] == f.values_[j + 1];
      if (!pairs_equal) break;
      std::vector<Rational> v;
      for (std::size_t j = 0; j < f.values_.size(); j += 2) v.push_back(f.values_[j]);
      f.values_ = std::move(v);
      --f.level_;
    }
    return f;
  }

  [[nodiscard]] bool is_constant() const { return normalized().level_ == 0; }

  [[nodiscard]] Rational integral() const {
    Rational s;
    for (const auto& x : values_) s += x;
    return s / Rational(std::int64_t{1} << level_);
  }

  [[nodiscard]] Rational integral_over(const DyadicSet& a) const {
    int level = std::max(level_, a.level());
    auto f = refined(level);
    Rational s;
    for (const auto& iv : a.intervals())
      for (auto j = iv.lo.at_level(level); j < iv.hi.at_level(level); ++j) s += f.values_[static_cast<std::size_t>(j)];
    return s / Rational(std::int64_t{1} << level);
  }

  [[nodiscard]] DyadicStepFunction positive_part() const {
    auto f = *this;
    for (auto& x : f.values_)
      if (x.sign() < 0) x = Rational();
    return f;
  }
  [[nodiscard]] DyadicStepFunction negative_part() const {
    auto f = *this;
    for (auto& x : f.values_) x = x.sign() < 0 ? -x : Rational();
    return f;
  }

  friend DyadicStepFunction operator-(const DyadicStepFunction& a, const DyadicStepFunction& b) {
    int level = std::max(a.level_, b.level_);
    auto x = a.refined(level);
    auto y = b.refined(level);
    for (std::size_t j = 0; j < x.values_.size(); ++j) x.values_[j] -= y.values_[j];
    return x;
  }

  friend bool operator==(const DyadicStepFunction& a, const DyadicStepFunction& b) {
    auto x = a.normalized();
    auto y = b.normalized();
    return x.level_ == y.level_ && x.values_ == y.values_;
  }

private:
  int level_ = 0;
  std::vector<Rational> values_;
};

/// (Pf)(x) = (f(x/2) + f((x+1)/2)) / 2, returned normalized.
inline DyadicStepFunction dyadic_pf_apply(const DyadicStepFunction& f) {
  auto g = f.normalized();
  if (g.level() == 0) return g;
  auto half = std::size_t{1} << (g.level() - 1);
  std::vector<Rational> v(half);
  const auto& x = g.values();
  for (std::size_t j = 0; j < half; ++j) v[j] = (x[j] + x[j + half]) / Rational(2);
  return DyadicStepFunction(g.level() - 1, std::move(v)).normalized();
}

/// max(int g+, int g-) with g = P^n 1_B - mu(B), for n = 0..n_max.
inline std::vector<Rational> dyadic_exactness_profile(const DyadicSet& b, std::size_t n_max) {
  std::vector<Rational> out;
  auto mu = b.measure();
  auto f = DyadicStepFunction::indicator(b);
  auto c = DyadicStepFunction::constant(mu);
  for (std::size_t n = 0; n <= n_max; ++n) {
    auto g = f - c;
    out.push_back(std::max(g.positive_part().integral(), g.negative_part().integral()));
    f = dyadic_pf_apply(f);
  }
  return out;
}

/// mu(phi^n(A)) for n = 0..n_max.
inline std::vector<Rational> dyadic_image_measures(const DyadicSet& a, std::size_t n_max) {
  std::vector<Rational> out;
  auto s = a;
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.push_back(s.measure());
    s = dyadic_image(s);
  }
  return out;
}

/// lim mu(phi^n(A)): 0 for the empty set, 1 otherwise (reached after at most level(A) steps).
inline Rational dyadic_image_measure_limit(const DyadicSet& a) {
  auto s = a;
  for (int k = 0; k < a.level(); ++k) s = dyadic_image(s);
  return s.measure();
}

/// Uniform Rice defect max((1-a) mu(phi^n A), a (1 - mu(phi^n A))) for n = 0..n_max.
inline std::vector<Rational> dyadic_rice_profile(const DyadicSet& a, std::size_t n_max) {
  auto limit = dyadic_image_measure_limit(a);
  std::vector<Rational> out;
  for (const auto& s : dyadic_image_measures(a, n_max))
    out.push_back(std::max((Rational(1) - limit) * s, limit * (Rational(1) - s)));
  return out;
}

/// Matrix of P on level-k step functions in the row convention (row i is
/// P applied to the indicator of cell i, refined back to level k, per unit
/// of cell mass): entry (i, j) is the transition weight from cell i to j.
inline std::vector<Rational> dyadic_transfer_matrix(int level) {
  const auto n = std::size_t{1} << level;
  std::vector<Rational> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> e(n);
    e[i] = Rational(1);
    auto pe = dyadic_pf_apply(DyadicStepFunction(level, std::move(e))).refined(level);
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = pe.values()[j];
  }
  return m;
}

/// Parses "a,b;c,d;..." where endpoints are "p/2^k", "p/q" (q a power of
/// two) or integers.
inline DyadicSet parse_dyadic_set(const std::string& text) {
  auto parse_point = [](std::string s) -> Dyadic {
    std::erase_if(s, [](char c) { return c == ' '; });
    auto caret = s.find("/2^");
    if (caret != std::string::npos) {
      auto num = std::stoll(s.substr(0, caret));
      auto level = std::stoi(s.substr(caret + 3));
      return {num, level};
    }
    auto r = Rational::parse(s);
    auto den = r.denominator();
    int level = 0;
    while (den > 1) {
      if (den % 2 != 0) throw ParseError("endpoint '" + s + "' is not dyadic");
      den /= 2;
      ++level;
    }
    return {r.numerator().convert_to<std::int64_t>(), level};
  };
  std::vector<Interval> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    auto piece = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!piece.empty()) {
      auto comma = piece.find(',');
      if (comma == std::string::npos) throw ParseError("interval '" + piece + "' needs two endpoints");
      try {
        out.push_back({parse_point(piece.substr(0, comma)), parse_point(piece.substr(comma + 1))});
      } catch (const std::logic_error&) {
        throw ParseError("malformed interval '" + piece + "'");
      }
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  for (const auto& iv : out)
    if (iv.hi < iv.lo) throw ParseError("interval with upper end below lower end");
  try {
    return DyadicSet(std::move(out));
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

} // namespace pfkit::dyadic
