#pragma once

/**
 * @file finite_dynamics.hpp
 * @brief Measure-preserving maps on finite spaces and their set dynamics.
 *
 * Covers images and preimages, eventually periodic set orbits and their
 * limits in the measure algebra, the sub-sigma-algebras of invariant sets,
 * of n-fold preimages and their tail intersection (all stored as
 * partitions), completions modulo null sets, minimal invariant supersets and
 * the invariant version of an almost-invariant set.
 *
 * On a finite space a measure-preserving map sends positive atoms onto
 * positive atoms bijectively (every positive atom has a preimage of positive
 * mass, and a surjection of a finite set onto itself is a bijection), with
 * mu(phi(x)) = mu(x). Null atoms may map anywhere. Construction records this
 * positive permutation; later modules rely on it.
 */

#include "pfkit/finite_space.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

namespace pfkit {

struct MassViolation {
  std::size_t atom;
  Rational expected;
  Rational actual;
};

/// Returns the first atom y with mu(phi^{-1}({y})) != mu({y}), if any.
/// Throws StructuralError if `targets` is not a total map into the atoms.
inline std::optional<MassViolation> find_mass_violation(const FiniteProbabilitySpace& space,
                                                        std::span<const std::size_t> targets) {
  const auto n = space.atom_count();
  if (targets.size() != n)
    throw StructuralError("map has " + std::to_string(targets.size()) + " targets for " + std::to_string(n) +
                          " atoms");
  std::vector<Rational> pushed(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (targets[x] >= n) throw StructuralError("target of atom '" + space.label(x) + "' out of range");
    if (!space.is_null_atom(x)) pushed[targets[x]] += space.mass(x);
  }
  for (std::size_t y = 0; y < n; ++y)
    if (pushed[y] != space.mass(y)) return MassViolation{y, space.mass(y), pushed[y]};
  return std::nullopt;
}

class MeasurePreservingMap {
public:
  MeasurePreservingMap() = default;

  /// Validates that the push-forward of mu equals mu. Throws
  /// NotMeasurePreserving naming the first violating atom.
  MeasurePreservingMap(FiniteProbabilitySpace space, std::vector<std::size_t> targets)
      : space_(std::move(space)), targets_(std::move(targets)) {
    if (auto v = find_mass_violation(space_, targets_))
      throw NotMeasurePreserving(v->atom, space_.label(v->atom), v->expected, v->actual);
    derive_permutation();
  }

  [[nodiscard]] const FiniteProbabilitySpace& space() const noexcept { return space_; }
  [[nodiscard]] const std::vector<std::size_t>& targets() const noexcept { return targets_; }
  [[nodiscard]] std::size_t operator()(std::size_t atom) const { return targets_.at(atom); }
  [[nodiscard]] std::size_t atom_count() const noexcept { return targets_.size(); }

  /// Permutation induced on positive atoms, in positive-atom indices.
  [[nodiscard]] const std::vector<std::size_t>& positive_permutation() const noexcept { return perm_; }
  /// Cycle lengths of the positive permutation, one entry per cycle.
  [[nodiscard]] const std::vector<std::size_t>& positive_cycle_lengths() const noexcept { return cycles_; }
  [[nodiscard]] bool is_identity_on_positive() const noexcept {
    return std::all_of(cycles_.begin(), cycles_.end(), [](std::size_t c) { return c == 1; });
  }

  [[nodiscard]] AtomSet preimage_bits(const AtomSet& a) const {
    AtomSet out(targets_.size());
    for (std::size_t x = 0; x < targets_.size(); ++x)
      if (a.contains(targets_[x])) out.insert(x);
    return out;
  }
  [[nodiscard]] AtomSet image_bits(const AtomSet& a) const {
    AtomSet out(targets_.size());
    a.for_each([&](std::size_t x) { out.insert(targets_[x]); });
    return out;
  }

private:
  void derive_permutation() {
    const auto& pos = space_.positive_atoms();
    perm_.resize(pos.size());
    std::vector<bool> hit(pos.size(), false);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      auto y = targets_[pos[k]];
      auto j = space_.positive_index(y);
      if (j == FiniteProbabilitySpace::npos || hit[j] || space_.mass(y) != space_.mass(pos[k]))
        throw DiagnosticFailure("measure-preserving map is not a mass-preserving bijection on positive atoms");
      hit[j] = true;
      perm_[k] = j;
    }
    std::vector<bool> seen(pos.size(), false);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (seen[k]) continue;
      std::size_t len = 0;
      for (auto j = k; !seen[j]; j = perm_[j]) {
        seen[j] = true;
        ++len;
      }
      cycles_.push_back(len);
    }
  }

  FiniteProbabilitySpace space_;
  std::vector<std::size_t> targets_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> cycles_;
};

inline MeasurePreservingMap check_measure_preserving(const FiniteProbabilitySpace& space,
                                                     std::vector<std::size_t> targets) {
  return {space, std::move(targets)};
}

inline MeasurableSet preimage(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  phi.space().require_member(a);
  return {a.space_id(), phi.preimage_bits(a.bits())};
}

inline MeasurableSet image(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  phi.space().require_member(a);
  return {a.space_id(), phi.image_bits(a.bits())};
}

/// Target list of phi^n.
inline std::vector<std::size_t> map_power(const MeasurePreservingMap& phi, std::size_t n) {
  std::vector<std::size_t> t(phi.atom_count());
  std::iota(t.begin(), t.end(), std::size_t{0});
  for (std::size_t step = 0; step < n; ++step)
    for (auto& x : t) x = phi(x);
  return t;
}

// ---------------------------------------------------------------------------
// Set orbits

enum class Direction { forward, backward };

struct OrbitReport {
  std::size_t preperiod = 0;
  std::size_t period = 1;
  /// S_0 = A, S_1, ..., S_{preperiod + period - 1}; afterwards the cycle repeats.
  std::vector<MeasurableSet> orbit_sets;
  /// Common class of the cycle members, present iff they are all equivalent.
  std::optional<MeasureAlgebraClass> limit_class;

  [[nodiscard]] const MeasurableSet& at(std::size_t n) const {
    if (n < orbit_sets.size()) return orbit_sets[n];
    return orbit_sets[preperiod + (n - preperiod) % period];
  }
  [[nodiscard]] bool converges() const noexcept { return limit_class.has_value(); }
};

/// Iterates images (forward) or preimages (backward) of A until a literal
/// set repeats.
inline OrbitReport set_orbit(const MeasurePreservingMap& phi, const MeasurableSet& a, Direction direction) {
  const auto& space = phi.space();
  space.require_member(a);
  OrbitReport report;
  std::unordered_map<AtomSet, std::size_t> seen;
  AtomSet current = a.bits();
  while (true) {
    auto [it, inserted] = seen.emplace(current, report.orbit_sets.size());
    if (!inserted) {
      report.preperiod = it->second;
      report.period = report.orbit_sets.size() - it->second;
      break;
    }
    report.orbit_sets.emplace_back(space.id(), current);
    current = direction == Direction::forward ? phi.image_bits(current) : phi.preimage_bits(current);
  }
  const auto& pos = space.positive_support();
  AtomSet first = report.orbit_sets[report.preperiod].bits() & pos;
  bool constant = true;
  for (std::size_t k = report.preperiod + 1; k < report.orbit_sets.size() && constant; ++k)
    constant = (report.orbit_sets[k].bits() & pos) == first;
  if (constant) report.limit_class = MeasureAlgebraClass(space.id(), first);
  return report;
}

// ---------------------------------------------------------------------------
// Sub-sigma-algebras as partitions

/// A finite sigma-algebra on the atoms, given by its partition into blocks.
/// Blocks are sorted internally and ordered by their smallest atom.
class SigmaSubAlgebra {
public:
  SigmaSubAlgebra() = default;

  /// Builds the partition whose blocks are the classes of `key` (atoms with
  /// equal keys share a block).
  template <class Key>
  static SigmaSubAlgebra from_keys(const std::vector<Key>& key) {
    SigmaSubAlgebra s;
    s.block_of_.assign(key.size(), 0);
    std::unordered_map<Key, std::size_t> index;
    for (std::size_t x = 0; x < key.size(); ++x) {
      auto [it, inserted] = index.emplace(key[x], s.blocks_.size());
      if (inserted) s.blocks_.emplace_back();
      s.blocks_[it->second].push_back(x);
      s.block_of_[x] = it->second;
    }
    return s;
  }

  /// Validates disjointness and coverage of `blocks` over `atom_count` atoms.
  static SigmaSubAlgebra from_blocks(std::size_t atom_count, const std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<std::size_t> key(atom_count, static_cast<std::size_t>(-1));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].empty()) throw StructuralError("empty block in partition");
      for (auto x : blocks[b]) {
        if (x >= atom_count) throw StructuralError("block atom out of range");
        if (key[x] != static_cast<std::size_t>(-1)) throw StructuralError("blocks are not disjoint");
        key[x] = b;
      }
    }
    for (auto k : key)
      if (k == static_cast<std::size_t>(-1)) throw StructuralError("blocks do not cover all atoms");
    return from_keys(key);
  }

  static SigmaSubAlgebra discrete(std::size_t atom_count) {
    std::vector<std::size_t> key(atom_count);
    std::iota(key.begin(), key.end(), std::size_t{0});
    return from_keys(key);
  }
  static SigmaSubAlgebra trivial(std::size_t atom_count) {
    return from_keys(std::vector<std::size_t>(atom_count, 0));
  }

  [[nodiscard]] std::size_t atom_count() const noexcept { return block_of_.size(); }
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }
  [[nodiscard]] std::size_t block_of(std::size_t atom) const { return block_of_.at(atom); }

  [[nodiscard]] AtomSet block_bits(std::size_t b) const {
    AtomSet s(atom_count());
    for (auto x : blocks_.at(b)) s.insert(x);
    return s;
  }

  /// True iff the set is a union of blocks, i.e. a member of the sigma-algebra.
  [[nodiscard]] bool contains(const AtomSet& set) const {
    for (const auto& block : blocks_) {
      bool in = set.contains(block.front());
      for (auto x : block)
        if (set.contains(x) != in) return false;
    }
    return true;
  }

  /// True iff every member of this sigma-algebra is a member of `finer`.
  [[nodiscard]] bool is_sub_algebra_of(const SigmaSubAlgebra& finer) const {
    if (finer.atom_count() != atom_count()) throw StructuralError("partitions over different atom counts");
    for (const auto& block : finer.blocks_) {
      auto b = block_of_[block.front()];
      for (auto x : block)
        if (block_of_[x] != b) return false;
    }
    return true;
  }

  friend bool operator==(const SigmaSubAlgebra& a, const SigmaSubAlgebra& b) { return a.blocks_ == b.blocks_; }

private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Sigma_inv = {A : A = phi^{-1}(A)}: blocks are the weakly connected
/// components of the functional graph x -> phi(x).
inline SigmaSubAlgebra sigma_inv(const MeasurePreservingMap& phi) {
  const auto n = phi.atom_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t x = 0; x < n; ++x) {
    auto a = find(x);
    auto b = find(phi(x));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> root(n);
  for (std::size_t x = 0; x < n; ++x) root[x] = find(x);
  return SigmaSubAlgebra::from_keys(root);
}

/// Sigma_n = {phi^{-n}(A)}: blocks are the nonempty fibers of phi^n.
inline SigmaSubAlgebra sigma_n(const MeasurePreservingMap& phi, std::size_t n) {
  return SigmaSubAlgebra::from_keys(map_power(phi, n));
}

/// Sigma_infty as the stable member of the decreasing chain Sigma_n.
/// Stabilizes after at most atom_count steps.
inline SigmaSubAlgebra sigma_infty(const MeasurePreservingMap& phi) {
  const auto n = phi.atom_count();
  std::vector<std::size_t> power(n);
  std::iota(power.begin(), power.end(), std::size_t{0});
  auto current = SigmaSubAlgebra::from_keys(power);
  for (std::size_t step = 0; step <= n; ++step) {
    for (auto& x : power) x = phi(x);
    auto next = SigmaSubAlgebra::from_keys(power);
    if (next.block_count() == current.block_count()) return current;
    current = std::move(next);
  }
  throw DiagnosticFailure("preimage sigma-algebra chain did not stabilize");
}

/// Completion within the power set: a set belongs to it iff it differs from
/// a member of S by a null set. Splits every null atom into its own block.
inline SigmaSubAlgebra completion_mod_null(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& s) {
  if (s.atom_count() != space.atom_count()) throw StructuralError("partition does not match space");
  std::vector<std::size_t> key(space.atom_count());
  for (std::size_t x = 0; x < key.size(); ++x)
    key[x] = space.is_null_atom(x) ? s.block_count() + x : s.block_of(x);
  return SigmaSubAlgebra::from_keys(key);
}

inline bool completions_equal(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& a,
                              const SigmaSubAlgebra& b) {
  return completion_mod_null(space, a) == completion_mod_null(space, b);
}

/// Number of blocks carrying positive mass.
inline std::size_t positive_block_count(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& s) {
  std::size_t c = 0;
  for (std::size_t b = 0; b < s.block_count(); ++b)
    if (s.block_bits(b).intersects(space.positive_support())) ++c;
  return c;
}

// ---------------------------------------------------------------------------
// Invariant sets

/// A* = union_m phi^{-m}(union_n phi^n(A)): saturate forward images, then
/// saturate preimages.
inline MeasurableSet minimal_invariant_superset(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  phi.space().require_member(a);
  AtomSet forward = a.bits();
  while (true) {
    auto next = forward | phi.image_bits(forward);
    if (next == forward) break;
    forward = std::move(next);
  }
  AtomSet backward = forward;
  while (true) {
    auto next = backward | phi.preimage_bits(backward);
    if (next == backward) break;
    backward = std::move(next);
  }
  return {a.space_id(), backward};
}

/// liminf_k phi^{-k}(A) = union_n intersection_{k >= n} phi^{-k}(A). Since
/// the preimage orbit is eventually periodic this is the intersection of
/// its cycle.
inline MeasurableSet invariant_version(const MeasurePreservingMap& phi, const MeasurableSet& a) {
  auto orbit = set_orbit(phi, a, Direction::backward);
  AtomSet meet = orbit.orbit_sets[orbit.preperiod].bits();
  for (std::size_t k = orbit.preperiod + 1; k < orbit.orbit_sets.size(); ++k) meet &= orbit.orbit_sets[k].bits();
  return {a.space_id(), meet};
}

} // namespace pfkit
