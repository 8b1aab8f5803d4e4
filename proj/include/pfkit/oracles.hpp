#pragma once

// Brute-force reference computations. They enumerate subsets literally and
// work in scaled integer arithmetic, sharing nothing with the closed forms
// beyond the input system. Meant for small spaces only (<= 20 atoms).

#include "pfkit/finite_dynamics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

namespace pfkit::oracle {

using i128 = int128;

inline constexpr std::size_t kMaxAtoms = 20;

/// Masses as integer units over a common denominator.
struct Scaled {
  std::int64_t denominator = 1;
  std::vector<std::int64_t> units;
};

inline Scaled scale(const FiniteProbabilitySpace& space) {
  if (space.atom_count() > kMaxAtoms) throw StructuralError("oracle limited to " + std::to_string(kMaxAtoms) + " atoms");
  std::int64_t l = 1;
  for (const auto& m : space.masses()) {
    auto d = static_cast<std::int64_t>(m.denominator());
    l = std::lcm(l, d);
    if (l > (std::int64_t{1} << 40)) throw StructuralError("oracle mass denominators too large");
  }
  Scaled s{l, {}};
  for (const auto& m : space.masses())
    s.units.push_back(static_cast<std::int64_t>(m.numerator() * (l / static_cast<std::int64_t>(m.denominator()))));
  return s;
}

inline Rational to_rational(i128 num, i128 den) {
  using boost::multiprecision::cpp_int;
  auto big = [](i128 v) {
    bool neg = v < 0;
    auto u = static_cast<uint128>(neg ? -v : v);
    cpp_int r = static_cast<std::uint64_t>(u >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(u);
    return neg ? cpp_int(-r) : r;
  };
  return Rational(Rational::BigRational(big(num), big(den)));
}

inline std::uint64_t mask_of(const AtomSet& s) {
  std::uint64_t m = 0;
  s.for_each([&](std::size_t i) { m |= std::uint64_t{1} << i; });
  return m;
}

inline std::uint64_t mask_of(const MeasurableSet& s) { return mask_of(s.bits()); }

namespace detail {

inline i128 units_of(const Scaled& s, std::uint64_t mask) {
  i128 total = 0;
  for (std::size_t i = 0; i < s.units.size(); ++i)
    if (mask >> i & 1U) total += s.units[i];
  return total;
}

/// Targets of phi iterated n times, computed step by step.
inline std::vector<std::size_t> iterate(const MeasurePreservingMap& phi, std::size_t n) {
  std::vector<std::size_t> t(phi.atom_count());
  std::iota(t.begin(), t.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k)
    for (auto& x : t) x = phi(x);
  return t;
}

inline std::uint64_t preimage_mask(const std::vector<std::size_t>& t, std::uint64_t a) {
  std::uint64_t out = 0;
  for (std::size_t x = 0; x < t.size(); ++x)
    if (a >> t[x] & 1U) out |= std::uint64_t{1} << x;
  return out;
}

inline std::uint64_t image_mask(const std::vector<std::size_t>& t, std::uint64_t a) {
  std::uint64_t out = 0;
  for (std::size_t x = 0; x < t.size(); ++x)
    if (a >> x & 1U) out |= std::uint64_t{1} << t[x];
  return out;
}

/// Calls f(mask) for every subset of `within`.
template <class F>
void for_each_subset(std::uint64_t within, F&& f) {
  std::uint64_t sub = 0;
  while (true) {
    f(sub);
    if (sub == within) break;
    sub = (sub - within) & within;
  }
}

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

} // namespace detail

/// sup over all A of |mu(phi^{-n}(A) cap B) - mu(A) mu(B)|.
inline Rational uniform_defect(const MeasurePreservingMap& phi, const MeasurableSet& b, std::size_t n) {
  auto s = scale(phi.space());
  auto t = detail::iterate(phi, n);
  auto bm = mask_of(b);
  auto ub = detail::units_of(s, bm);
  std::uint64_t all = (std::uint64_t{1} << phi.atom_count()) - 1;
  i128 best = 0;
  detail::for_each_subset(all, [&](std::uint64_t a) {
    auto v = s.denominator * detail::units_of(s, detail::preimage_mask(t, a) & bm) - detail::units_of(s, a) * ub;
    best = std::max(best, detail::abs128(v));
  });
  return to_rational(best, i128{s.denominator} * s.denominator);
}

/// Same supremum restricted to A inside D.
inline Rational local_defect(const MeasurePreservingMap& phi, const MeasurableSet& b, const MeasurableSet& d,
                             std::size_t n) {
  auto s = scale(phi.space());
  auto t = detail::iterate(phi, n);
  auto bm = mask_of(b);
  auto ub = detail::units_of(s, bm);
  i128 best = 0;
  detail::for_each_subset(mask_of(d), [&](std::uint64_t a) {
    auto v = s.denominator * detail::units_of(s, detail::preimage_mask(t, a) & bm) - detail::units_of(s, a) * ub;
    best = std::max(best, detail::abs128(v));
  });
  return to_rational(best, i128{s.denominator} * s.denominator);
}

/// inf over all A of mu(phi^{-n}(A) cap B) - c mu(D cap A).
inline Rational ding_defect(const MeasurePreservingMap& phi, const MeasurableSet& b, const MeasurableSet& d,
                            const Rational& c, std::size_t n) {
  auto s = scale(phi.space());
  auto t = detail::iterate(phi, n);
  auto bm = mask_of(b);
  auto dm = mask_of(d);
  auto cn = static_cast<std::int64_t>(c.numerator());
  auto cd = static_cast<std::int64_t>(c.denominator());
  std::uint64_t all = (std::uint64_t{1} << phi.atom_count()) - 1;
  i128 best = 0; // A = empty gives 0
  detail::for_each_subset(all, [&](std::uint64_t a) {
    auto v = cd * detail::units_of(s, detail::preimage_mask(t, a) & bm) - cn * detail::units_of(s, dm & a);
    best = std::min(best, v);
  });
  return to_rational(best, i128{s.denominator} * cd);
}

/// lim mu(phi^m(A)), found by iterating images until a set repeats and
/// taking the largest measure seen (the sequence is nondecreasing).
inline Rational image_limit(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  auto s = scale(phi.space());
  auto t = detail::iterate(phi, 1);
  std::set<std::uint64_t> seen;
  i128 best = 0;
  for (auto m = mask_of(a); seen.insert(m).second; m = detail::image_mask(t, m))
    best = std::max(best, detail::units_of(s, m));
  return to_rational(best, s.denominator);
}

/// sup over all B of |mu(phi^n(A) cap B) - a mu(B)|, a = lim mu(phi^m(A)).
inline Rational rice_defect(const MeasurePreservingMap& phi, const MeasurableSet& a, std::size_t n) {
  auto s = scale(phi.space());
  auto lim = image_limit(phi, a);
  auto an = static_cast<std::int64_t>(lim.numerator());
  auto ad = static_cast<std::int64_t>(lim.denominator());
  auto image = detail::image_mask(detail::iterate(phi, n), mask_of(a));
  std::uint64_t all = (std::uint64_t{1} << phi.atom_count()) - 1;
  i128 best = 0;
  detail::for_each_subset(all, [&](std::uint64_t b) {
    auto v = ad * detail::units_of(s, image & b) - an * detail::units_of(s, b);
    best = std::max(best, detail::abs128(v));
  });
  return to_rational(best, i128{s.denominator} * ad);
}

/// Weakly connected components of the functional graph, by repeated
/// relaxation of component labels.
inline std::vector<std::size_t> component_labels(const MeasurePreservingMap& phi) {
  std::vector<std::size_t> label(phi.atom_count());
  std::iota(label.begin(), label.end(), std::size_t{0});
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < label.size(); ++x) {
      auto y = phi(x);
      auto m = std::min(label[x], label[y]);
      if (label[x] != m || label[y] != m) {
        label[x] = label[y] = m;
        changed = true;
      }
    }
  }
  return label;
}

/// Smallest X containing A with phi^{-1}(X) = X: the union of the components
/// that meet A.
inline AtomSet invariant_hull(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  auto label = component_labels(phi);
  std::set<std::size_t> hit;
  a.bits().for_each([&](std::size_t x) { hit.insert(label[x]); });
  AtomSet out(phi.atom_count());
  for (std::size_t x = 0; x < label.size(); ++x)
    if (hit.count(label[x])) out.insert(x);
  return out;
}

/// Every invariant set is checked literally: the invariant sigma-algebra is
/// the family of masks X with phi^{-1}(X) = X.
inline std::vector<std::uint64_t> invariant_masks(const MeasurePreservingMap& phi) {
  auto t = detail::iterate(phi, 1);
  std::vector<std::uint64_t> out;
  std::uint64_t all = (std::uint64_t{1} << phi.atom_count()) - 1;
  detail::for_each_subset(all, [&](std::uint64_t x) {
    if (detail::preimage_mask(t, x) == x) out.push_back(x);
  });
  return out;
}

/// All total target lists that preserve the measure.
inline std::vector<std::vector<std::size_t>> all_measure_preserving_targets(const FiniteProbabilitySpace& space) {
  const auto n = space.atom_count();
  if (n > 6) throw StructuralError("exhaustive map enumeration limited to 6 atoms");
  auto s = scale(space);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> t(n, 0);
  while (true) {
    std::vector<i128> pre(n, 0);
    for (std::size_t x = 0; x < n; ++x) pre[t[x]] += s.units[x];
    bool ok = true;
    for (std::size_t y = 0; y < n && ok; ++y) ok = pre[y] == s.units[y];
    if (ok) out.push_back(t);
    std::size_t k = 0;
    while (k < n && ++t[k] == n) t[k++] = 0;
    if (k == n) break;
  }
  return out;
}

/// Shape produced by the generator: positive atoms are permuted among
/// themselves preserving mass; null atoms go anywhere.
inline bool has_generated_shape(const FiniteProbabilitySpace& space, const std::vector<std::size_t>& targets) {
  std::vector<bool> hit(space.atom_count(), false);
  for (auto x : space.positive_atoms()) {
    auto y = targets[x];
    if (space.is_null_atom(y) || hit[y] || space.mass(y) != space.mass(x)) return false;
    hit[y] = true;
  }
  return true;
}

} // namespace pfkit::oracle
