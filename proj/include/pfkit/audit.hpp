#pragma once

/**
 * @file audit.hpp
 * @brief Seeded random systems and property audits of the equivalence
 *        theorems, each side computed by a separate route.
 *
 * Every audit draws `count` systems from a SystemGenerator, one derived seed
 * per system, and records a failure (with that seed as reproducer) whenever
 * two routes disagree. A correct implementation produces no failures.
 */

#include "pfkit/fixtures.hpp"
#include "pfkit/mixing_diagnostics.hpp"
#include "pfkit/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

namespace pfkit {

// ---------------------------------------------------------------------------
// Randomness

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the i-th system drawn from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index));
}

/// mt19937_64 with its own bounded draws, so sequences do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return v % n;
  }
  bool coin() { return (engine_() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// Random subset of the first n atoms as a bit mask.
  std::uint64_t mask(std::size_t n) {
    auto m = engine_();
    return n >= 64 ? m : m & ((std::uint64_t{1} << n) - 1);
  }

private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Generator

struct SystemGenerator {
  std::uint64_t seed = 0;
  std::size_t max_positive_atoms = 8;
  std::size_t max_null_atoms = 4;
  std::int64_t mass_denominator_bound = 24;
  /// When set, names a fixture that is returned verbatim (see fixtures::names()).
  std::string fixture;
};

/// Positive atoms get masses u_i / sum(u) from a few unit classes and are
/// permuted within equal-mass classes; null atoms map anywhere, half of them
/// onto positive atoms and half onto null atoms.
inline MeasurePreservingMap generate_system(const SystemGenerator& gen) {
  if (!gen.fixture.empty()) {
    auto f = fixtures::by_name(gen.fixture);
    if (!f) throw ValidationError("unknown fixture id '" + gen.fixture + "'");
    return *f;
  }
  if (gen.max_positive_atoms < 1 || gen.mass_denominator_bound < 1 ||
      gen.max_positive_atoms + gen.max_null_atoms > 64)
    throw ValidationError("generator bounds must allow 1..64 atoms and a positive denominator bound");

  Rng rng(gen.seed);
  const auto k = 1 + rng.below(gen.max_positive_atoms);
  const auto z = rng.below(gen.max_null_atoms + 1);
  const auto n = k + z;
  const auto cap = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(gen.mass_denominator_bound) / k);

  std::vector<std::uint64_t> class_units(1 + rng.below(k));
  for (auto& u : class_units) u = 1 + rng.below(cap);
  std::vector<std::int64_t> units(k);
  std::int64_t total = 0;
  for (auto& u : units) {
    u = static_cast<std::int64_t>(class_units[rng.below(class_units.size())]);
    total += u;
  }

  // Atom positions: slot[i] for i < k are positive atoms, the rest null.
  std::vector<std::size_t> slot(n);
  std::iota(slot.begin(), slot.end(), std::size_t{0});
  rng.shuffle(slot);

  std::vector<Rational> masses(n, Rational(0));
  for (std::size_t i = 0; i < k; ++i) masses[slot[i]] = Rational(units[i], total);

  std::vector<std::size_t> targets(n);
  std::map<std::int64_t, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < k; ++i) classes[units[i]].push_back(i);
  for (auto& [u, members] : classes) {
    auto image = members;
    rng.shuffle(image);
    for (std::size_t j = 0; j < members.size(); ++j) targets[slot[members[j]]] = slot[image[j]];
  }
  for (auto i = k; i < n; ++i) {
    bool to_positive = rng.coin();
    targets[slot[i]] = to_positive ? slot[rng.below(k)] : slot[k + rng.below(z)];
  }

  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = "a" + std::to_string(i);
  return check_measure_preserving(FiniteProbabilitySpace(std::move(labels), std::move(masses)), targets);
}

// ---------------------------------------------------------------------------
// Reports

struct AuditFailure {
  std::uint64_t seed = 0;
  std::string theorem_id;
  std::string route_values;

  auto operator<=>(const AuditFailure&) const = default;
  bool operator==(const AuditFailure&) const = default;
};

struct AuditReport {
  std::string theorem;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t systems_tested = 0;
  std::vector<AuditFailure> failures;
  double elapsed_ms = 0.0; // not part of the deterministic content

  [[nodiscard]] bool passed() const noexcept { return failures.empty(); }

  /// Associative, order-independent merge.
  void merge(const AuditReport& other) {
    systems_tested += other.systems_tested;
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
    std::sort(failures.begin(), failures.end());
  }

  /// Equality of everything except timing.
  [[nodiscard]] bool same_content(const AuditReport& o) const {
    return theorem == o.theorem && seed == o.seed && count == o.count && systems_tested == o.systems_tested &&
           failures == o.failures;
  }
};

enum class AuditKind : unsigned { main = 1, prop21 = 2, thm22 = 4, lemma23 = 8, structural = 16 };

inline constexpr unsigned kAllAudits = 31;

inline std::optional<unsigned> audit_mask(std::string_view name) {
  if (name == "main") return static_cast<unsigned>(AuditKind::main);
  if (name == "prop21") return static_cast<unsigned>(AuditKind::prop21);
  if (name == "thm22") return static_cast<unsigned>(AuditKind::thm22);
  if (name == "lemma23") return static_cast<unsigned>(AuditKind::lemma23);
  if (name == "structural") return static_cast<unsigned>(AuditKind::structural);
  if (name == "all") return kAllAudits;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Per-system checks

namespace audit_detail {

inline constexpr std::size_t kExhaustiveAtoms = 12;
inline constexpr std::size_t kSampledSubsets = 256;

struct Context {
  const FiniteSystem& sys;
  std::uint64_t seed;
  Rng& rng;
  std::vector<AuditFailure>& failures;

  void fail(std::string id, std::string values) const { failures.push_back({seed, std::move(id), std::move(values)}); }
  [[nodiscard]] const FiniteProbabilitySpace& space() const { return sys.space(); }
  [[nodiscard]] const MeasurePreservingMap& map() const { return sys.map(); }
  [[nodiscard]] MeasurableSet set(std::uint64_t mask) const {
    return space().make_set(AtomSet::from_mask(space().atom_count(), mask));
  }
};

inline const char* flag(bool b) { return b ? "1" : "0"; }

/// Every subset when the space is small, else a seeded sample (always with
/// the empty and full sets).
inline std::vector<std::uint64_t> subset_family(const Context& ctx) {
  const auto n = ctx.space().atom_count();
  std::vector<std::uint64_t> out;
  if (n <= kExhaustiveAtoms) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) out.push_back(m);
    return out;
  }
  out.push_back(0);
  out.push_back(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  while (out.size() < kSampledSubsets) out.push_back(ctx.rng.mask(n));
  return out;
}

/// Nonempty subsets of the positive atoms (all of them: at most 2^k - 1).
inline std::vector<std::uint64_t> positive_family(const Context& ctx) {
  const auto& pos = ctx.space().positive_atoms();
  std::vector<std::uint64_t> out;
  const auto k = pos.size();
  if (k > kExhaustiveAtoms) {
    while (out.size() < kSampledSubsets) {
      std::uint64_t m = 0;
      for (auto x : pos)
        if (ctx.rng.coin()) m |= std::uint64_t{1} << x;
      if (m) out.push_back(m);
    }
    return out;
  }
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << k); ++s) {
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (s >> j & 1U) m |= std::uint64_t{1} << pos[j];
    out.push_back(m);
  }
  return out;
}

inline Density random_density(const Context& ctx) {
  Density f;
  for (std::size_t k = 0; k < ctx.space().positive_count(); ++k)
    f.values.emplace_back(static_cast<std::int64_t>(ctx.rng.below(7)) - 3, static_cast<std::int64_t>(1 + ctx.rng.below(4)));
  return f;
}

/// Sets used against the oracles: positive singletons, the whole space and
/// one random set.
inline std::vector<std::uint64_t> oracle_sets(const Context& ctx, bool include_null_singletons) {
  std::vector<std::uint64_t> out;
  const auto n = ctx.space().atom_count();
  for (std::size_t x = 0; x < n; ++x)
    if (include_null_singletons || !ctx.space().is_null_atom(x)) out.push_back(std::uint64_t{1} << x);
  out.push_back((std::uint64_t{1} << n) - 1);
  out.push_back(ctx.rng.mask(n));
  return out;
}

inline constexpr std::size_t kOracleSteps = 3;

/// Support inclusion of P^n 1_A in the support of E(1_A | Sigma_inv), and the
/// bijectivity remark: P is a permutation, and it converges iff P = I.
inline void check_common(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  auto perm = sys.pf().as_permutation();
  bool identity = sys.pf().is_identity();
  if (!perm) ctx.fail("bijective.convergence", "P is not a permutation matrix");
  if (identity != ctx.map().is_identity_on_positive())
    ctx.fail("bijective.convergence", std::string("P=I ") + flag(identity) + " map identity " +
                                     flag(ctx.map().is_identity_on_positive()));
  if (identity ? !(sys.powers().preperiod == 0 && sys.powers().period == 1) : sys.powers_converge())
    ctx.fail("bijective.convergence", std::string("P=I ") + flag(identity) + " converges " + flag(sys.powers_converge()) +
                                     " preperiod " + std::to_string(sys.powers().preperiod));

  auto [lo, hi] = sys.cycle_window();
  std::vector<std::uint64_t> family;
  for (auto x : space.positive_atoms()) family.push_back(std::uint64_t{1} << x);
  for (int i = 0; i < 8; ++i) family.push_back(ctx.rng.mask(space.atom_count()));
  for (auto m : family) {
    auto a = ctx.set(m);
    auto f = indicator(space, a);
    auto support = support_density(space, conditional_expectation(space, sys.invariant_algebra(), f)).canonical_bits();
    for (std::size_t n = 0; n < hi; ++n) {
      auto s = support_density(space, sys.pf_power(n).apply(f)).canonical_bits();
      if (!s.is_subset_of(support)) {
        ctx.fail("support.inclusion", "A mask " + std::to_string(m) + " n " + std::to_string(n));
        break;
      }
    }
  }
  (void)lo;
}

inline void check_main(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  auto family = subset_family(ctx);

  bool orbits_converge = true;
  std::vector<OrbitReport> orbits;
  orbits.reserve(family.size());
  for (auto m : family) {
    orbits.push_back(set_orbit(ctx.map(), ctx.set(m), Direction::forward));
    orbits_converge = orbits_converge && orbits.back().converges();
  }
  bool powers = sys.powers_converge();
  bool completions = completions_equal(space, sys.tail_algebra(), sys.invariant_algebra());
  if (orbits_converge != powers || powers != completions) {
    ctx.fail("main.equivalence", std::string("orbits ") + flag(orbits_converge) + " powers " + flag(powers) +
                                     " completions " + flag(completions));
    return;
  }
  if (!powers) return;

  const auto& limit = sys.powers().items[sys.powers().preperiod];
  std::unordered_set<AtomSet> seen_densities;
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto a = ctx.set(family[i]);
    if (seen_densities.insert(a.bits() & space.positive_support()).second) {
      auto f = indicator(space, a);
      if (limit.apply(f) != conditional_expectation(space, sys.invariant_algebra(), f))
        ctx.fail("main.limit_density", "A mask " + std::to_string(family[i]));
    }
    auto hull = minimal_invariant_superset(ctx.map(), a);
    if (*orbits[i].limit_class != class_of(space, hull))
      ctx.fail("main.limit_set", "A mask " + std::to_string(family[i]));
  }
}

inline void check_prop21(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  bool powers = sys.powers_converge();
  bool every_set_has_witness = true;
  std::map<std::uint64_t, LowerBoundWitness> witnesses;
  for (auto m : positive_family(ctx)) {
    auto b = ctx.set(m);
    auto found = search_lower_bound_witness(sys, b);
    if (found) {
      auto lim = ding_defect_limit(sys, b, found->d, found->c);
      if (!lim || !lim->is_zero()) ctx.fail("prop21.search_witness", "B mask " + std::to_string(m));
      witnesses.emplace(m, *found);
    } else {
      every_set_has_witness = false;
    }
    if (powers) {
      auto built = find_lower_bound_witness(sys, b);
      auto lim = built ? ding_defect_limit(sys, b, built->d, built->c) : std::nullopt;
      if (!lim || !lim->is_zero()) ctx.fail("prop21.limit_witness", "B mask " + std::to_string(m));
    }
  }
  if (powers != every_set_has_witness)
    ctx.fail("prop21.equivalence", std::string("powers ") + flag(powers) + " witnesses " + flag(every_set_has_witness));

  if (space.atom_count() > kExhaustiveAtoms) return;
  auto first = space.make_set({space.positive_atoms().front()});
  for (auto m : oracle_sets(ctx, false)) {
    auto b = ctx.set(m);
    if (measure(space, b).is_zero()) continue;
    auto w = witnesses.find(m & oracle::mask_of(space.positive_support()));
    auto d = w != witnesses.end() ? w->second.d : first;
    auto c = w != witnesses.end() ? w->second.c : Rational(1, 2);
    for (std::size_t n = 0; n < kOracleSteps; ++n) {
      auto closed = ding_defect(sys, b, d, c, n);
      auto brute = oracle::ding_defect(ctx.map(), b, d, c, n);
      if (closed != brute)
        ctx.fail("prop21.oracle", "B mask " + std::to_string(m) + " n " + std::to_string(n) + " closed " + closed.str() +
                                      " brute " + brute.str());
    }
  }
}

inline bool exactness(const Context& ctx, const char* id) {
  try {
    return is_exact(ctx.sys);
  } catch (const DiagnosticFailure& e) {
    ctx.fail(id, e.what());
    return false;
  }
}

inline void check_thm22(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  bool exact = exactness(ctx, "thm22.routes");
  bool uniform = true;
  bool local = true;
  for (auto m : positive_family(ctx)) {
    auto b = ctx.set(m);
    auto lim = uniform_defect_limit(sys, b);
    uniform = uniform && lim && lim->is_zero();
    local = local && find_local_mixing_trace(sys, b).has_value();
  }
  if (exact != uniform || uniform != local)
    ctx.fail("thm22.equivalence", std::string("exact ") + flag(exact) + " uniform " + flag(uniform) + " local " + flag(local));

  if (space.atom_count() > kExhaustiveAtoms) return;
  auto first = space.make_set({space.positive_atoms().front()});
  for (auto m : oracle_sets(ctx, true)) {
    auto b = ctx.set(m);
    std::vector<MeasurableSet> traces{first};
    if (measure(space, b).sign() > 0) traces.push_back(b);
    for (std::size_t n = 0; n < kOracleSteps; ++n) {
      auto closed = uniform_mixing_defect(sys, b, n);
      auto brute = oracle::uniform_defect(ctx.map(), b, n);
      if (closed != brute)
        ctx.fail("thm22.oracle_uniform", "B mask " + std::to_string(m) + " n " + std::to_string(n) + " closed " +
                                             closed.str() + " brute " + brute.str());
      for (const auto& d : traces) {
        auto lc = local_uniform_mixing_defect(sys, b, d, n);
        auto lb = oracle::local_defect(ctx.map(), b, d, n);
        if (lc != lb)
          ctx.fail("thm22.oracle_local", "B mask " + std::to_string(m) + " D mask " +
                                             std::to_string(oracle::mask_of(d)) + " n " + std::to_string(n) +
                                             " closed " + lc.str() + " brute " + lb.str());
      }
    }
  }
}

inline void check_lemma23(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  bool exact = exactness(ctx, "lemma23.routes");
  bool rice = true;
  for (auto m : subset_family(ctx)) {
    auto a = ctx.set(m);
    auto orbit = set_orbit(ctx.map(), a, Direction::forward);
    for (std::size_t k = 1; k < orbit.orbit_sets.size(); ++k)
      if (measure(space, orbit.orbit_sets[k]) < measure(space, orbit.orbit_sets[k - 1])) {
        ctx.fail("lemma23.monotone", "A mask " + std::to_string(m));
        break;
      }
    auto lim = rice_defect_limit(sys, a);
    rice = rice && lim && lim->is_zero();
  }
  if (exact != rice) ctx.fail("lemma23.equivalence", std::string("exact ") + flag(exact) + " rice " + flag(rice));

  if (space.atom_count() > kExhaustiveAtoms) return;
  for (auto m : oracle_sets(ctx, true)) {
    auto a = ctx.set(m);
    for (std::size_t n = 0; n < kOracleSteps; ++n) {
      auto closed = rice_defect(sys, a, n);
      auto brute = oracle::rice_defect(ctx.map(), a, n);
      if (closed != brute)
        ctx.fail("lemma23.oracle", "A mask " + std::to_string(m) + " n " + std::to_string(n) + " closed " + closed.str() +
                                       " brute " + brute.str());
    }
  }
}

inline Rational inner(const std::vector<Rational>& w, const Density& f, const Density& g) {
  Rational s;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f.values[k] * g.values[k];
  return s;
}

/// Operator identities, measure-algebra metric axioms and the set-level
/// constructions against their oracles.
inline void check_structural(const Context& ctx) {
  const auto& sys = ctx.sys;
  const auto& space = ctx.space();
  const auto& phi = ctx.map();
  const auto n = space.atom_count();
  const auto& p = sys.pf();
  auto t = build_koopman(phi);
  auto w = positive_weights(space);

  if (!transfer_identity_holds(phi, p)) ctx.fail("structural.transfer_identity", "singleton check");
  if (!adjointness_holds(p, t)) ctx.fail("structural.adjoint", "matrix check");
  if (!p.is_bi_markov()) ctx.fail("structural.bi_markov", "P");
  if (!t.is_bi_markov()) ctx.fail("structural.bi_markov", "T");

  for (int i = 0; i < 6; ++i) {
    auto f = random_density(ctx);
    auto g = random_density(ctx);
    auto a = ctx.set(ctx.rng.mask(n));
    auto pf = p.apply(f);
    if (integral_over(space, pf, a) != integral_over(space, f, preimage(phi, a)))
      ctx.fail("structural.transfer_identity", "random density");
    if (inner(w, pf, g) != inner(w, f, t.apply(g))) ctx.fail("structural.adjoint", "random pair");
    if (l1_norm(space, pf) > l1_norm(space, f)) ctx.fail("structural.contraction", "random density");
    if (integral(space, f) != integral(space, positive_part(f)) - integral(space, negative_part(f)))
      ctx.fail("structural.parts", "random density");
  }

  const auto null_mask = oracle::mask_of(space.positive_support().complement());
  for (int i = 0; i < 16; ++i) {
    auto a = ctx.set(ctx.rng.mask(n));
    auto b = ctx.set(ctx.rng.mask(n));
    auto c = ctx.set(ctx.rng.mask(n));
    auto dab = algebra_distance(space, a, b);
    if (!algebra_distance(space, a, a).is_zero() || dab != algebra_distance(space, b, a) ||
        algebra_distance(space, a, c) > dab + algebra_distance(space, b, c) || (dab.is_zero() != equivalent(space, a, b)))
      ctx.fail("structural.metric", "axioms");
    if (algebra_distance(space, preimage(phi, a), preimage(phi, b)) != dab) ctx.fail("structural.isometry", "preimage");
    auto shifted = ctx.set(oracle::mask_of(a) ^ (ctx.rng.mask(n) & null_mask));
    if (!equivalent(space, a, shifted)) ctx.fail("structural.metric", "null modification");
    if (measure(space, preimage(phi, a)) != measure(space, a)) ctx.fail("structural.preimage_measure", "random set");
    if (measure(space, image(phi, a)) < measure(space, a) || !a.is_subset_of(preimage(phi, image(phi, a))))
      ctx.fail("structural.image", "random set");
  }

  if (n <= kExhaustiveAtoms) {
    const auto& inv = sys.invariant_algebra();
    auto masks = oracle::invariant_masks(phi);
    if (masks.size() != (std::size_t{1} << inv.block_count())) ctx.fail("structural.sigma_inv", "block count");
    for (auto m : masks)
      if (!inv.contains(AtomSet::from_mask(n, m))) ctx.fail("structural.sigma_inv", "mask " + std::to_string(m));
    for (auto m : subset_family(ctx)) {
      auto a = ctx.set(m);
      if (minimal_invariant_superset(phi, a).bits() != oracle::invariant_hull(phi, a))
        ctx.fail("structural.invariant_hull", "A mask " + std::to_string(m));
      if (algebra_distance(space, a, preimage(phi, a)).is_zero()) {
        auto r = invariant_version(phi, a);
        if (preimage(phi, r) != r || !equivalent(space, r, a))
          ctx.fail("structural.invariant_version", "A mask " + std::to_string(m));
      }
    }
  }

  for (std::size_t k = 0; k + 1 < n; ++k)
    if (!sigma_n(phi, k + 1).is_sub_algebra_of(sigma_n(phi, k))) ctx.fail("structural.tail_chain", std::to_string(k));
  if (!sys.invariant_algebra().is_sub_algebra_of(sys.tail_algebra())) ctx.fail("structural.tail_chain", "inv");
  if (cesaro_limit(p) != expectation_operator(space, sys.invariant_algebra()))
    ctx.fail("structural.cesaro", "average over one period");

  try {
    auto profile = mixing_profile(sys, space.full_set(), 2);
    (void)profile;
    auto e = is_ergodic(sys);
    (void)e;
    for (int i = 0; i < 3; ++i) {
      auto f = random_density(ctx);
      auto centered = f - conditional_expectation(space, sys.invariant_algebra(), f);
      (void)lin_test(sys, f);
      (void)lin_test(sys, centered);
    }
  } catch (const DiagnosticFailure& e) {
    ctx.fail("structural.classification", e.what());
  }
}

inline void check_system(const MeasurePreservingMap& phi, std::uint64_t seed, unsigned kinds,
                         std::vector<AuditFailure>& failures) {
  try {
    FiniteSystem sys(phi);
    Rng rng(splitmix64(seed ^ 0x5bd1e995ULL));
    Context ctx{sys, seed, rng, failures};
    if (kinds & (static_cast<unsigned>(AuditKind::prop21) | static_cast<unsigned>(AuditKind::thm22) |
                 static_cast<unsigned>(AuditKind::lemma23) | static_cast<unsigned>(AuditKind::structural)))
      check_common(ctx);
    if (kinds & static_cast<unsigned>(AuditKind::main)) check_main(ctx);
    if (kinds & static_cast<unsigned>(AuditKind::prop21)) check_prop21(ctx);
    if (kinds & static_cast<unsigned>(AuditKind::thm22)) check_thm22(ctx);
    if (kinds & static_cast<unsigned>(AuditKind::lemma23)) check_lemma23(ctx);
    if (kinds & static_cast<unsigned>(AuditKind::structural)) check_structural(ctx);
  } catch (const std::exception& e) {
    failures.push_back({seed, "exception", e.what()});
  }
}

inline std::string kinds_name(unsigned kinds) {
  if (kinds == kAllAudits) return "all";
  for (const char* name : {"main", "prop21", "thm22", "lemma23", "structural"})
    if (kinds == *audit_mask(name)) return name;
  return "custom";
}

} // namespace audit_detail

/// Runs the audits selected by `kinds` on `count` systems. Systems are
/// interleaved across `jobs` workers; the result does not depend on `jobs`.
inline AuditReport run_audit(unsigned kinds, const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  auto start = std::chrono::steady_clock::now();
  jobs = std::max<std::size_t>(1, std::min(jobs, std::max<std::size_t>(count, 1)));
  std::vector<std::vector<AuditFailure>> parts(jobs);
  auto worker = [&](std::size_t j) {
    for (auto i = j; i < count; i += jobs) {
      auto g = gen;
      g.seed = derive_seed(gen.seed, i);
      auto phi = generate_system(g);
      audit_detail::check_system(phi, g.seed, kinds, parts[j]);
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker, j);
    for (auto& th : threads) th.join();
  }
  AuditReport report{audit_detail::kinds_name(kinds), gen.seed, count, 0, {}, 0.0};
  for (auto& part : parts) report.merge(AuditReport{"", 0, 0, 0, std::move(part), 0.0});
  report.systems_tested = count;
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Runs the checks of `kinds` on one explicit system (fixtures, files).
inline std::vector<AuditFailure> audit_system(const MeasurePreservingMap& phi, unsigned kinds = kAllAudits,
                                              std::uint64_t seed = 0) {
  std::vector<AuditFailure> failures;
  audit_detail::check_system(phi, seed, kinds, failures);
  std::sort(failures.begin(), failures.end());
  return failures;
}

inline AuditReport audit_main_theorem(const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  return run_audit(static_cast<unsigned>(AuditKind::main), gen, count, jobs);
}
inline AuditReport audit_prop21(const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  return run_audit(static_cast<unsigned>(AuditKind::prop21), gen, count, jobs);
}
inline AuditReport audit_thm22(const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  return run_audit(static_cast<unsigned>(AuditKind::thm22), gen, count, jobs);
}
inline AuditReport audit_lemma23(const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  return run_audit(static_cast<unsigned>(AuditKind::lemma23), gen, count, jobs);
}
inline AuditReport audit_structural(const SystemGenerator& gen, std::size_t count, std::size_t jobs = 1) {
  return run_audit(static_cast<unsigned>(AuditKind::structural), gen, count, jobs);
}

} // namespace pfkit
