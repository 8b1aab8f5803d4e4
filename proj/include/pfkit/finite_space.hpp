#pragma once

/**
 * @file finite_space.hpp
 * @brief Finite probability spaces with exact masses, measurable sets, the
 *        measure algebra and L1 densities.
 *
 * The sigma-algebra is always the full power set of the atoms. Null atoms are
 * allowed; they are invisible to densities (which live on the positive
 * atoms only) but matter for literal set dynamics.
 */

#include "pfkit/atom_set.hpp"
#include "pfkit/errors.hpp"
#include "pfkit/rational.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace pfkit {

class FiniteProbabilitySpace;

/// A subset of the atoms of one particular space.
class MeasurableSet {
public:
  MeasurableSet() = default;
  MeasurableSet(std::uint64_t space_id, AtomSet bits) : space_id_(space_id), bits_(std::move(bits)) {}

  [[nodiscard]] std::uint64_t space_id() const noexcept { return space_id_; }
  [[nodiscard]] const AtomSet& bits() const noexcept { return bits_; }
  [[nodiscard]] bool contains(std::size_t atom) const { return bits_.contains(atom); }
  [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }

  friend MeasurableSet operator&(const MeasurableSet& a, const MeasurableSet& b) {
    return {same(a, b), a.bits_ & b.bits_};
  }
  friend MeasurableSet operator|(const MeasurableSet& a, const MeasurableSet& b) {
    return {same(a, b), a.bits_ | b.bits_};
  }
  friend MeasurableSet operator-(const MeasurableSet& a, const MeasurableSet& b) {
    return {same(a, b), a.bits_ - b.bits_};
  }
  friend MeasurableSet operator^(const MeasurableSet& a, const MeasurableSet& b) {
    return {same(a, b), a.bits_ ^ b.bits_};
  }
  [[nodiscard]] MeasurableSet complement() const { return {space_id_, bits_.complement()}; }
  [[nodiscard]] bool is_subset_of(const MeasurableSet& o) const {
    same(*this, o);
    return bits_.is_subset_of(o.bits_);
  }

  friend bool operator==(const MeasurableSet& a, const MeasurableSet& b) {
    return a.space_id_ == b.space_id_ && a.bits_ == b.bits_;
  }

private:
  static std::uint64_t same(const MeasurableSet& a, const MeasurableSet& b) {
    if (a.space_id_ != b.space_id_) throw StructuralError("sets belong to different spaces");
    return a.space_id_;
  }

  std::uint64_t space_id_ = 0;
  AtomSet bits_;
};

/// Element of the measure algebra: a set modulo null sets, stored as its
/// intersection with the positive support.
class MeasureAlgebraClass {
public:
  MeasureAlgebraClass() = default;
  MeasureAlgebraClass(std::uint64_t space_id, AtomSet canonical)
      : space_id_(space_id), bits_(std::move(canonical)) {}

  [[nodiscard]] std::uint64_t space_id() const noexcept { return space_id_; }
  [[nodiscard]] const AtomSet& canonical_bits() const noexcept { return bits_; }
  [[nodiscard]] MeasurableSet representative() const { return {space_id_, bits_}; }

  friend bool operator==(const MeasureAlgebraClass& a, const MeasureAlgebraClass& b) {
    return a.space_id_ == b.space_id_ && a.bits_ == b.bits_;
  }

private:
  std::uint64_t space_id_ = 0;
  AtomSet bits_;
};

/// An L1 element, indexed by the positive atoms of its space in increasing
/// atom order.
struct Density {
  std::vector<Rational> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const Density&, const Density&) = default;
};

class FiniteProbabilitySpace {
  struct Data {
    std::uint64_t id = 0;
    std::vector<std::string> labels;
    std::vector<Rational> masses;
    AtomSet positive;
    std::vector<std::size_t> positive_atoms;
    std::vector<std::size_t> positive_index; // atom -> index among positive atoms, or npos
    std::unordered_map<std::string, std::size_t> by_label;
    // Common-denominator form of the masses, when it fits: mass(i) = units[i] / unit_den.
    std::int64_t unit_den = 0;
    std::vector<std::int64_t> units;
  };

public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FiniteProbabilitySpace() = default;

  /// Validates labels and masses; throws ValidationError on negative masses,
  /// a total different from 1, duplicate labels or size mismatches.
  FiniteProbabilitySpace(std::vector<std::string> labels, std::vector<Rational> masses) {
    if (labels.size() != masses.size())
      throw ValidationError("label count " + std::to_string(labels.size()) + " != mass count " +
                            std::to_string(masses.size()));
    if (labels.empty()) throw ValidationError("space needs at least one atom");
    auto d = std::make_shared<Data>();
    static std::atomic<std::uint64_t> next_id{1};
    d->id = next_id.fetch_add(1, std::memory_order_relaxed);
    Rational total;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (masses[i].sign() < 0)
        throw ValidationError("atom '" + labels[i] + "' has negative mass " + masses[i].str());
      total += masses[i];
      if (!d->by_label.emplace(labels[i], i).second)
        throw ValidationError("duplicate atom label '" + labels[i] + "'");
    }
    if (total != Rational(1)) throw ValidationError("masses sum to " + total.str());

    const auto n = labels.size();
    d->positive = AtomSet(n);
    d->positive_index.assign(n, npos);
    for (std::size_t i = 0; i < n; ++i) {
      if (masses[i].sign() > 0) {
        d->positive.insert(i);
        d->positive_index[i] = d->positive_atoms.size();
        d->positive_atoms.push_back(i);
      }
    }
    d->labels = std::move(labels);
    d->masses = std::move(masses);
    build_units(*d);
    data_ = std::move(d);
  }

  /// Convenience for unlabeled spaces: atoms are named "0", "1", ...
  static FiniteProbabilitySpace with_masses(std::vector<Rational> masses) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < masses.size(); ++i) labels.push_back(std::to_string(i));
    return {std::move(labels), std::move(masses)};
  }

  [[nodiscard]] std::uint64_t id() const noexcept { return data_ ? data_->id : 0; }
  [[nodiscard]] std::size_t atom_count() const noexcept { return data_ ? data_->labels.size() : 0; }
  [[nodiscard]] const std::string& label(std::size_t atom) const { return data_->labels.at(atom); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return data_->labels; }
  [[nodiscard]] const Rational& mass(std::size_t atom) const { return data_->masses.at(atom); }
  [[nodiscard]] const std::vector<Rational>& masses() const { return data_->masses; }
  [[nodiscard]] bool is_null_atom(std::size_t atom) const { return !data_->positive.contains(atom); }

  [[nodiscard]] const AtomSet& positive_support() const { return data_->positive; }
  [[nodiscard]] const std::vector<std::size_t>& positive_atoms() const { return data_->positive_atoms; }
  [[nodiscard]] std::size_t positive_count() const { return data_->positive_atoms.size(); }
  /// Index of `atom` among the positive atoms, or npos for a null atom.
  [[nodiscard]] std::size_t positive_index(std::size_t atom) const { return data_->positive_index.at(atom); }

  [[nodiscard]] std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = data_->by_label.find(label);
    if (it == data_->by_label.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] MeasurableSet empty_set() const { return {id(), AtomSet(atom_count())}; }
  [[nodiscard]] MeasurableSet full_set() const { return {id(), AtomSet::full(atom_count())}; }
  [[nodiscard]] MeasurableSet make_set(std::initializer_list<std::size_t> atoms) const {
    return make_set(std::vector<std::size_t>(atoms));
  }
  [[nodiscard]] MeasurableSet make_set(const std::vector<std::size_t>& atoms) const {
    AtomSet bits(atom_count());
    for (auto a : atoms) {
      if (a >= atom_count()) throw StructuralError("atom index " + std::to_string(a) + " out of range");
      bits.insert(a);
    }
    return {id(), std::move(bits)};
  }
  [[nodiscard]] MeasurableSet make_set(AtomSet bits) const {
    if (bits.size() != atom_count()) throw StructuralError("bitset length differs from atom count");
    return {id(), std::move(bits)};
  }

  void require_member(const MeasurableSet& set) const {
    if (set.space_id() != id() || set.bits().size() != atom_count())
      throw StructuralError("set does not belong to this space");
  }
  void require_density(const Density& f) const {
    if (f.size() != positive_count())
      throw StructuralError("density has " + std::to_string(f.size()) + " values, space has " +
                            std::to_string(positive_count()) + " positive atoms");
  }

  /// Mass of a raw bitset over this space's atoms.
  [[nodiscard]] Rational mass_of(const AtomSet& bits) const {
    const auto& d = *data_;
    if (d.unit_den != 0) {
      std::int64_t sum = 0;
      bits.for_each([&](std::size_t i) { sum += d.units[i]; });
      return {sum, d.unit_den};
    }
    Rational sum;
    (bits & d.positive).for_each([&](std::size_t i) { sum += d.masses[i]; });
    return sum;
  }

  friend bool operator==(const FiniteProbabilitySpace& a, const FiniteProbabilitySpace& b) {
    return a.id() == b.id();
  }

private:
  static void build_units(Data& d) {
    constexpr std::int64_t limit = std::int64_t{1} << 62;
    std::int64_t den = 1;
    for (const auto& m : d.masses) {
      if (!m.is_small()) return;
      auto q = m.denominator().convert_to<std::int64_t>();
      auto g = std::gcd(den, q);
      int128 l = static_cast<int128>(den / g) * q;
      if (l > limit) return;
      den = static_cast<std::int64_t>(l);
    }
    d.units.reserve(d.masses.size());
    for (const auto& m : d.masses) {
      auto scaled = m * Rational(den);
      d.units.push_back(scaled.numerator().convert_to<std::int64_t>());
    }
    d.unit_den = den;
  }

  std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------
// Measure and the measure algebra

/// mu(A). Throws StructuralError if A belongs to another space.
inline Rational measure(const FiniteProbabilitySpace& space, const MeasurableSet& set) {
  space.require_member(set);
  return space.mass_of(set.bits());
}

/// d(A, B) = mu(A \ B) + mu(B \ A).
inline Rational algebra_distance(const FiniteProbabilitySpace& space, const MeasurableSet& a,
                                 const MeasurableSet& b) {
  space.require_member(a);
  space.require_member(b);
  return space.mass_of(a.bits() ^ b.bits());
}

inline MeasureAlgebraClass class_of(const FiniteProbabilitySpace& space, const MeasurableSet& set) {
  space.require_member(set);
  return {space.id(), set.bits() & space.positive_support()};
}

inline bool equivalent(const FiniteProbabilitySpace& space, const MeasurableSet& a, const MeasurableSet& b) {
  return class_of(space, a) == class_of(space, b);
}

// ---------------------------------------------------------------------------
// Densities

inline Density constant_density(const FiniteProbabilitySpace& space, const Rational& c) {
  return {std::vector<Rational>(space.positive_count(), c)};
}

inline Density indicator(const FiniteProbabilitySpace& space, const MeasurableSet& set) {
  space.require_member(set);
  Density f{std::vector<Rational>(space.positive_count())};
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (set.contains(pos[k])) f.values[k] = Rational(1);
  return f;
}

/// Point mass density e_k on the k-th positive atom (value 1 there, 0 elsewhere).
inline Density basis_density(const FiniteProbabilitySpace& space, std::size_t k) {
  Density f{std::vector<Rational>(space.positive_count())};
  f.values.at(k) = Rational(1);
  return f;
}

inline Rational integral(const FiniteProbabilitySpace& space, const Density& f) {
  space.require_density(f);
  Rational sum;
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (!f.values[k].is_zero()) sum += f.values[k] * space.mass(pos[k]);
  return sum;
}

/// Integral of f over the set A.
inline Rational integral_over(const FiniteProbabilitySpace& space, const Density& f, const MeasurableSet& a) {
  space.require_density(f);
  space.require_member(a);
  Rational sum;
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (a.contains(pos[k]) && !f.values[k].is_zero()) sum += f.values[k] * space.mass(pos[k]);
  return sum;
}

inline Density positive_part(const Density& f) {
  Density g = f;
  for (auto& v : g.values)
    if (v.sign() < 0) v = Rational();
  return g;
}

inline Density negative_part(const Density& f) {
  Density g = f;
  for (auto& v : g.values) v = v.sign() < 0 ? -v : Rational();
  return g;
}

inline Density operator+(const Density& a, const Density& b) {
  if (a.size() != b.size()) throw StructuralError("density size mismatch");
  Density r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r.values[k] += b.values[k];
  return r;
}

inline Density operator-(const Density& a, const Density& b) {
  if (a.size() != b.size()) throw StructuralError("density size mismatch");
  Density r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r.values[k] -= b.values[k];
  return r;
}

inline Density operator*(const Rational& c, const Density& f) {
  Density r = f;
  for (auto& v : r.values) v *= c;
  return r;
}

inline Rational l1_norm(const FiniteProbabilitySpace& space, const Density& f) {
  space.require_density(f);
  Rational sum;
  const auto& pos = space.positive_atoms();
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (!f.values[k].is_zero()) sum += abs(f.values[k]) * space.mass(pos[k]);
  return sum;
}

} // namespace pfkit
