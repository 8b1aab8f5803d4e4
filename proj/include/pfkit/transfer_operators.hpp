#pragma once

/**
 * @file transfer_operators.hpp
 * @brief Perron-Frobenius and Koopman operators of finite measure-preserving
 *        systems, exact power sequences, Cesaro limits and conditional
 *        expectations.
 *
 * Operators act on densities over the positive atoms. Row x of a
 * MarkovMatrix is the image of the point density e_x, so applying M to f is
 * the row-vector product
 *
 *     (M f)(y) = sum_x f(x) * M(x, y),
 *
 * and the product A * B is "first A, then B". This is the usual
 * row-stochastic convention for transition matrices acting on densities.
 */

#include "pfkit/finite_dynamics.hpp"
#include "pfkit/finite_space.hpp"

#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

namespace pfkit {

class MarkovMatrix {
public:
  MarkovMatrix() = default;
  MarkovMatrix(std::vector<Rational> weights, std::vector<Rational> entries)
      : weights_(std::move(weights)), entries_(std::move(entries)) {
    if (entries_.size() != weights_.size() * weights_.size())
      throw StructuralError("matrix entry count does not match dimension");
  }

  static MarkovMatrix zero(std::vector<Rational> weights) {
    auto n = weights.size();
    return {std::move(weights), std::vector<Rational>(n * n)};
  }
  static MarkovMatrix identity(std::vector<Rational> weights) {
    auto m = zero(std::move(weights));
    for (std::size_t i = 0; i < m.dimension(); ++i) m.at(i, i) = Rational(1);
    return m;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return weights_.size(); }
  [[nodiscard]] const std::vector<Rational>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<Rational>& entries() const noexcept { return entries_; }
  [[nodiscard]] const Rational& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dimension() + col];
  }
  Rational& at(std::size_t row, std::size_t col) { return entries_.at(row * dimension() + col); }

  [[nodiscard]] Density apply(const Density& f) const {
    const auto n = dimension();
    if (f.size() != n) throw StructuralError("density size does not match operator dimension");
    Density out{std::vector<Rational>(n)};
    for (std::size_t x = 0; x < n; ++x) {
      if (f.values[x].is_zero()) continue;
      for (std::size_t y = 0; y < n; ++y) {
        const auto& m = entries_[x * n + y];
        if (!m.is_zero()) out.values[y] += f.values[x] * m;
      }
    }
    return out;
  }

  /// First `a`, then `b`.
  friend MarkovMatrix operator*(const MarkovMatrix& a, const MarkovMatrix& b) {
    const auto n = a.dimension();
    if (b.dimension() != n) throw StructuralError("operator dimensions differ");
    auto c = zero(a.weights_);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const auto& aik = a.entries_[i * n + k];
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const auto& bkj = b.entries_[k * n + j];
          if (!bkj.is_zero()) c.entries_[i * n + j] += aik * bkj;
        }
      }
    return c;
  }

  friend MarkovMatrix operator+(const MarkovMatrix& a, const MarkovMatrix& b) {
    if (a.dimension() != b.dimension()) throw StructuralError("operator dimensions differ");
    auto c = a;
    for (std::size_t i = 0; i < c.entries_.size(); ++i) c.entries_[i] += b.entries_[i];
    return c;
  }

  friend MarkovMatrix operator*(const Rational& s, const MarkovMatrix& m) {
    auto c = m;
    for (auto& e : c.entries_) e *= s;
    return c;
  }

  /// mu-weighted adjoint: <M f, g> = <f, M* g> with <f, g> = sum f g w.
  [[nodiscard]] MarkovMatrix weighted_adjoint() const {
    const auto n = dimension();
    auto t = zero(weights_);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        const auto& m = entries_[x * n + y];
        if (!m.is_zero()) t.entries_[y * n + x] = m * weights_[y] / weights_[x];
      }
    return t;
  }

  [[nodiscard]] bool is_nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Rational& r) { return r.sign() >= 0; });
  }

  /// Positive, fixes the constant density, and so does its weighted adjoint.
  [[nodiscard]] bool is_bi_markov() const {
    if (!is_nonnegative()) return false;
    Density one{std::vector<Rational>(dimension(), Rational(1))};
    return apply(one) == one && weighted_adjoint().apply(one) == one;
  }

  [[nodiscard]] bool is_identity() const {
    const auto n = dimension();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (entries_[i * n + j] != Rational(i == j ? 1 : 0)) return false;
    return true;
  }

  /// If every row holds a single 1 in distinct columns, the induced
  /// permutation (row -> column).
  [[nodiscard]] std::optional<std::vector<std::size_t>> as_permutation() const {
    const auto n = dimension();
    std::vector<std::size_t> perm(n);
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& e = entries_[i * n + j];
        if (e.is_zero()) continue;
        if (e != Rational(1) || col) return std::nullopt;
        col = j;
      }
      if (!col || used[*col]) return std::nullopt;
      used[*col] = true;
      perm[i] = *col;
    }
    return perm;
  }

  [[nodiscard]] std::size_t hash() const noexcept {
    std::size_t h = dimension();
    for (const auto& e : entries_) h ^= e.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  friend bool operator==(const MarkovMatrix& a, const MarkovMatrix& b) {
    return a.weights_ == b.weights_ && a.entries_ == b.entries_;
  }

private:
  std::vector<Rational> weights_;
  std::vector<Rational> entries_;
};

struct MarkovMatrixHash {
  std::size_t operator()(const MarkovMatrix& m) const noexcept { return m.hash(); }
};
struct DensityHash {
  std::size_t operator()(const Density& f) const noexcept {
    std::size_t h = f.size();
    for (const auto& v : f.values) h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline std::vector<Rational> positive_weights(const FiniteProbabilitySpace& space) {
  std::vector<Rational> w;
  for (auto x : space.positive_atoms()) w.push_back(space.mass(x));
  return w;
}

// ---------------------------------------------------------------------------
// Operators of a system

/// Checks  int_A Pf dmu = int_{phi^{-1}(A)} f dmu  for every singleton A
/// (null atoms included) and every point density f.
inline bool transfer_identity_holds(const MeasurePreservingMap& phi, const MarkovMatrix& p) {
  const auto& space = phi.space();
  if (p.dimension() != space.positive_count()) return false;
  for (std::size_t k = 0; k < space.positive_count(); ++k) {
    auto f = basis_density(space, k);
    auto pf = p.apply(f);
    for (std::size_t a = 0; a < space.atom_count(); ++a) {
      auto set = space.make_set({a});
      if (integral_over(space, pf, set) != integral_over(space, f, preimage(phi, set))) return false;
    }
  }
  return true;
}

/// Perron-Frobenius operator:
///   (Pf)(y) = mu(y)^{-1} * sum_{x : phi(x) = y, mu(x) > 0} f(x) mu(x).
inline MarkovMatrix build_pf(const MeasurePreservingMap& phi) {
  const auto& space = phi.space();
  auto p = MarkovMatrix::zero(positive_weights(space));
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k) {
    auto y = phi(pos[k]);
    auto j = space.positive_index(y);
    p.at(k, j) += space.mass(pos[k]) / space.mass(y);
  }
  if (!transfer_identity_holds(phi, p))
    throw DiagnosticFailure("Perron-Frobenius matrix violates its defining identity");
  return p;
}

/// Koopman operator Tf = f o phi on positive atoms.
inline MarkovMatrix build_koopman(const MeasurePreservingMap& phi) {
  const auto& space = phi.space();
  auto t = MarkovMatrix::zero(positive_weights(space));
  const auto& pos = space.positive_atoms();
  // Row x is T e_x, which is 1 exactly on the positive atoms z with phi(z) = x.
  for (std::size_t k = 0; k < pos.size(); ++k) t.at(space.positive_index(phi(pos[k])), k) = Rational(1);
  return t;
}

/// <Pf, g> = <f, Tg> for all point densities f, g.
inline bool adjointness_holds(const MarkovMatrix& p, const MarkovMatrix& t) {
  const auto n = p.dimension();
  if (t.dimension() != n || p.weights() != t.weights()) return false;
  const auto& w = p.weights();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z) {
      // <P e_x, e_z> = P(x,z) w_z ; <e_x, T e_z> = T(z,x) w_x
      if (p(x, z) * w[z] != t(z, x) * w[x]) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Power sequences

/// Eventually periodic sequence x_0, x_1, ...; `items` holds x_0 .. x_{preperiod+period-1}.
template <class T>
struct Cycle {
  std::size_t preperiod = 0;
  std::size_t period = 1;
  std::vector<T> items;

  [[nodiscard]] const T& at(std::size_t n) const {
    if (n < items.size()) return items[n];
    return items[preperiod + (n - preperiod) % period];
  }
};

template <class T>
struct LimitReport {
  bool converges = false;
  std::size_t preperiod = 0;
  std::size_t period = 1;
  std::optional<T> limit;
};

template <class T>
LimitReport<T> limit_of(const Cycle<T>& c) {
  LimitReport<T> r;
  r.preperiod = c.preperiod;
  r.period = c.period;
  r.converges = c.period == 1;
  if (r.converges) r.limit = c.items[c.preperiod];
  return r;
}

namespace detail {

inline std::size_t lcm_of(const std::vector<std::size_t>& v) {
  std::size_t l = 1;
  for (auto x : v) l = std::lcm(l, x);
  return l;
}

inline std::vector<std::size_t> cycle_lengths(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> out;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (auto j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    out.push_back(len);
  }
  return out;
}

template <class T, class Hash, class Step>
Cycle<T> detect_cycle(T first, Step step, std::size_t max_terms) {
  Cycle<T> c;
  std::unordered_map<T, std::size_t, Hash> seen;
  T current = std::move(first);
  while (true) {
    auto [it, inserted] = seen.emplace(current, c.items.size());
    if (!inserted) {
      c.preperiod = it->second;
      c.period = c.items.size() - it->second;
      return c;
    }
    if (c.items.size() >= max_terms) throw Error("sequence did not become periodic within the step bound");
    c.items.push_back(current);
    current = step(current);
  }
}

} // namespace detail

/// Default bound on the number of distinct powers: lcm of the cycle lengths
/// (+1 for the identity term) for permutation matrices, 4096 otherwise.
inline std::size_t power_bound(const MarkovMatrix& m) {
  if (auto perm = m.as_permutation()) return detail::lcm_of(detail::cycle_lengths(*perm)) + 1;
  return 4096;
}

/// M^0, M^1, ... up to the first repetition.
inline Cycle<MarkovMatrix> power_cycle(const MarkovMatrix& m, std::optional<std::size_t> max_terms = std::nullopt) {
  return detail::detect_cycle<MarkovMatrix, MarkovMatrixHash>(
      MarkovMatrix::identity(m.weights()), [&](const MarkovMatrix& x) { return x * m; },
      max_terms.value_or(power_bound(m)));
}

inline LimitReport<MarkovMatrix> power_sequence(const MarkovMatrix& m) { return limit_of(power_cycle(m)); }

/// f, Mf, M^2 f, ... up to the first repetition.
inline Cycle<Density> density_cycle(const MarkovMatrix& m, const Density& f,
                                    std::optional<std::size_t> max_terms = std::nullopt) {
  return detail::detect_cycle<Density, DensityHash>(
      f, [&](const Density& x) { return m.apply(x); }, max_terms.value_or(power_bound(m)));
}

inline LimitReport<Density> density_sequence(const MarkovMatrix& m, const Density& f) {
  return limit_of(density_cycle(m, f));
}

inline Density apply_power(const MarkovMatrix& m, const Density& f, std::size_t n) {
  if (n <= 64) {
    Density g = f;
    for (std::size_t k = 0; k < n; ++k) g = m.apply(g);
    return g;
  }
  return density_cycle(m, f).at(n);
}

/// lim (1/n) sum_{m<n} M^m: the average of M^j over one period of the cycle.
inline MarkovMatrix cesaro_limit(const MarkovMatrix& m) {
  auto c = power_cycle(m);
  auto sum = MarkovMatrix::zero(m.weights());
  for (std::size_t j = c.preperiod; j < c.items.size(); ++j) sum = sum + c.items[j];
  return Rational(1, static_cast<std::int64_t>(c.period)) * sum;
}

// ---------------------------------------------------------------------------
// Projections

/// E(f | S): on each block of positive mass, the mu-average of f.
inline Density conditional_expectation(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& s,
                                       const Density& f) {
  space.require_density(f);
  if (s.atom_count() != space.atom_count()) throw StructuralError("partition does not match space");
  Density out{std::vector<Rational>(space.positive_count())};
  for (const auto& block : s.blocks()) {
    Rational mass, mass_f;
    for (auto x : block) {
      auto k = space.positive_index(x);
      if (k == FiniteProbabilitySpace::npos) continue;
      mass += space.mass(x);
      if (!f.values[k].is_zero()) mass_f += f.values[k] * space.mass(x);
    }
    if (mass.is_zero()) continue;
    auto avg = mass_f / mass;
    for (auto x : block) {
      auto k = space.positive_index(x);
      if (k != FiniteProbabilitySpace::npos) out.values[k] = avg;
    }
  }
  return out;
}

/// Matrix of f -> E(f | S).
inline MarkovMatrix expectation_operator(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& s) {
  auto e = MarkovMatrix::zero(positive_weights(space));
  for (std::size_t k = 0; k < space.positive_count(); ++k) {
    auto row = conditional_expectation(space, s, basis_density(space, k));
    for (std::size_t j = 0; j < row.size(); ++j) e.at(k, j) = row.values[j];
  }
  return e;
}

/// f -> (int f dmu) 1.
inline MarkovMatrix rank_one_projection(const FiniteProbabilitySpace& space) {
  auto w = positive_weights(space);
  auto m = MarkovMatrix::zero(w);
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t y = 0; y < w.size(); ++y) m.at(x, y) = w[x];
  return m;
}

/// Class of {f > 0}. Throws NegativeDensity if f takes a negative value.
inline MeasureAlgebraClass support_density(const FiniteProbabilitySpace& space, const Density& f) {
  space.require_density(f);
  AtomSet bits(space.atom_count());
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (f.values[k].sign() < 0)
      throw NegativeDensity("density is negative at atom '" + space.label(pos[k]) + "'");
    if (f.values[k].sign() > 0) bits.insert(pos[k]);
  }
  return {space.id(), bits};
}

/// Exact rank over the rationals (Gaussian elimination).
inline std::size_t rank(const MarkovMatrix& m) {
  const auto n = m.dimension();
  std::vector<Rational> a = m.entries();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < n; ++col) {
    std::size_t piv = r;
    while (piv < n && a[piv * n + col].is_zero()) ++piv;
    if (piv == n) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[r * n + j]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r || a[i * n + col].is_zero()) continue;
      auto factor = a[i * n + col] / a[r * n + col];
      for (std::size_t j = col; j < n; ++j)
        if (!a[r * n + j].is_zero()) a[i * n + j] -= factor * a[r * n + j];
    }
    ++r;
  }
  return r;
}

/// Dimension of {f : Mf = f}.
inline std::size_t fixed_space_dimension(const MarkovMatrix& m) {
  auto d = m;
  for (std::size_t i = 0; i < m.dimension(); ++i) d.at(i, i) -= Rational(1);
  return m.dimension() - rank(d);
}

} // namespace pfkit
