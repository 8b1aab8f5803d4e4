#pragma once

/**
 * @file mixing_diagnostics.hpp
 * @brief Exact decision procedures for ergodicity, mixing and exactness of
 *        finite systems, and the defect functionals of the uniform mixing
 *        criteria.
 *
 * Every supremum or infimum over A in Sigma is evaluated in closed form
 * through positive and negative parts:
 *
 *     sup_A int_A g dmu = int g+ dmu,     inf_A int_A g dmu = -int g- dmu,
 *
 * which the finite power set attains. Defect sequences inherit the eventual
 * periodicity of the operator powers (or of the set orbit), so their limits
 * are read off one period of the cycle: the limit exists iff the value is
 * constant there.
 *
 * Each classification is computed along independent routes which must
 * agree; disagreement throws DiagnosticFailure.
 */

#include "pfkit/finite_dynamics.hpp"
#include "pfkit/transfer_operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfkit {

/// A measure-preserving map together with the derived objects every
/// diagnostic needs. Immutable.
class FiniteSystem {
public:
  explicit FiniteSystem(MeasurePreservingMap map)
      : map_(std::move(map)), pf_(build_pf(map_)), powers_(power_cycle(pf_)), inv_(sigma_inv(map_)),
        infty_(sigma_infty(map_)) {}

  [[nodiscard]] const MeasurePreservingMap& map() const noexcept { return map_; }
  [[nodiscard]] const FiniteProbabilitySpace& space() const noexcept { return map_.space(); }
  [[nodiscard]] const MarkovMatrix& pf() const noexcept { return pf_; }
  [[nodiscard]] const Cycle<MarkovMatrix>& powers() const noexcept { return powers_; }
  [[nodiscard]] const MarkovMatrix& pf_power(std::size_t n) const { return powers_.at(n); }
  [[nodiscard]] bool powers_converge() const noexcept { return powers_.period == 1; }
  [[nodiscard]] const SigmaSubAlgebra& invariant_algebra() const noexcept { return inv_; }
  [[nodiscard]] const SigmaSubAlgebra& tail_algebra() const noexcept { return infty_; }

  /// Indices n covering one full period of the power sequence.
  [[nodiscard]] std::pair<std::size_t, std::size_t> cycle_window() const noexcept {
    return {powers_.preperiod, powers_.preperiod + powers_.period};
  }

private:
  MeasurePreservingMap map_;
  MarkovMatrix pf_;
  Cycle<MarkovMatrix> powers_;
  SigmaSubAlgebra inv_;
  SigmaSubAlgebra infty_;
};

// ---------------------------------------------------------------------------
// Classification

struct ErgodicityRoutes {
  std::size_t fixed_space_dimension = 0;
  std::size_t positive_invariant_blocks = 0;
};

inline ErgodicityRoutes ergodicity_routes(const FiniteSystem& sys) {
  return {fixed_space_dimension(sys.pf()), positive_block_count(sys.space(), sys.invariant_algebra())};
}

inline bool is_ergodic(const FiniteSystem& sys) {
  auto r = ergodicity_routes(sys);
  bool by_operator = r.fixed_space_dimension == 1;
  bool by_sets = r.positive_invariant_blocks == 1;
  if (by_operator != by_sets)
    throw DiagnosticFailure("ergodicity routes disagree: fixed space dimension " +
                            std::to_string(r.fixed_space_dimension) + ", positive invariant blocks " +
                            std::to_string(r.positive_invariant_blocks));
  return by_operator;
}

/// mu(phi^{-n}({a}) cap {b}) -> mu(a) mu(b) for all atoms a, b, checked on
/// the cycle of each backward orbit.
inline bool mixing_on_atom_pairs(const FiniteSystem& sys) {
  const auto& space = sys.space();
  const auto n = space.atom_count();
  for (std::size_t a = 0; a < n; ++a) {
    auto orbit = set_orbit(sys.map(), space.make_set({a}), Direction::backward);
    for (std::size_t b = 0; b < n; ++b) {
      auto target = space.mass(a) * space.mass(b);
      for (std::size_t k = orbit.preperiod; k < orbit.orbit_sets.size(); ++k) {
        auto hit = orbit.orbit_sets[k].contains(b) ? space.mass(b) : Rational();
        if (hit != target) return false;
      }
    }
  }
  return true;
}

inline bool powers_converge_to_rank_one(const FiniteSystem& sys) {
  return sys.powers_converge() && sys.powers().items[sys.powers().preperiod] == rank_one_projection(sys.space());
}

inline bool is_mixing(const FiniteSystem& sys) {
  bool by_operator = powers_converge_to_rank_one(sys);
  bool by_sets = mixing_on_atom_pairs(sys);
  if (by_operator != by_sets) throw DiagnosticFailure("mixing routes disagree");
  return by_operator;
}

struct ExactnessRoutes {
  bool tail_trivial = false;        // completed Sigma_infty has one block of positive mass
  bool strong_rank_one = false;     // P^n -> 1 (x) 1
  bool images_fill_space = false;   // lim mu(phi^n({x})) = 1 for every positive atom x
};

/// lim_n mu(phi^n(A)); the sequence is nondecreasing and eventually periodic,
/// hence eventually constant.
inline Rational image_measure_limit(const FiniteSystem& sys, const MeasurableSet& a) {
  auto orbit = set_orbit(sys.map(), a, Direction::forward);
  auto value = measure(sys.space(), orbit.orbit_sets[orbit.preperiod]);
  for (std::size_t k = orbit.preperiod + 1; k < orbit.orbit_sets.size(); ++k)
    if (measure(sys.space(), orbit.orbit_sets[k]) != value)
      throw DiagnosticFailure("image measures are not eventually constant");
  return value;
}

inline ExactnessRoutes exactness_routes(const FiniteSystem& sys) {
  const auto& space = sys.space();
  ExactnessRoutes r;
  r.tail_trivial = positive_block_count(space, completion_mod_null(space, sys.tail_algebra())) == 1;
  r.strong_rank_one = powers_converge_to_rank_one(sys);
  r.images_fill_space = true;
  for (auto x : space.positive_atoms())
    if (image_measure_limit(sys, space.make_set({x})) != Rational(1)) {
      r.images_fill_space = false;
      break;
    }
  return r;
}

inline bool is_exact(const FiniteSystem& sys) {
  auto r = exactness_routes(sys);
  if (r.tail_trivial != r.strong_rank_one || r.strong_rank_one != r.images_fill_space)
    throw DiagnosticFailure(std::string("exactness routes disagree: tail ") + (r.tail_trivial ? "1" : "0") +
                            ", powers " + (r.strong_rank_one ? "1" : "0") + ", images " +
                            (r.images_fill_space ? "1" : "0"));
  return r.tail_trivial;
}

// ---------------------------------------------------------------------------
// Defects

namespace detail {

inline Density centered_power(const FiniteSystem& sys, const MeasurableSet& b, std::size_t n) {
  const auto& space = sys.space();
  auto pb = sys.pf_power(n).apply(indicator(space, b));
  return pb - constant_density(space, measure(space, b));
}

template <class F>
std::optional<Rational> constant_on(std::size_t begin, std::size_t end, F&& value) {
  auto v = value(begin);
  for (auto n = begin + 1; n < end; ++n)
    if (value(n) != v) return std::nullopt;
  return v;
}

} // namespace detail

/// sup_A |mu(phi^{-n}(A) cap B) - mu(A) mu(B)| = max(int g+, int g-) with
/// g = P^n 1_B - mu(B) 1.
inline Rational uniform_mixing_defect(const FiniteSystem& sys, const MeasurableSet& b, std::size_t n) {
  auto g = detail::centered_power(sys, b, n);
  return std::max(integral(sys.space(), positive_part(g)), integral(sys.space(), negative_part(g)));
}

/// Same supremum over the trace algebra on D: max(int_D g+, int_D g-).
inline Rational local_uniform_mixing_defect(const FiniteSystem& sys, const MeasurableSet& b,
                                            const MeasurableSet& d, std::size_t n) {
  const auto& space = sys.space();
  if (measure(space, d).is_zero()) throw NullTrace("trace set has measure zero");
  auto g = detail::centered_power(sys, b, n);
  return std::max(integral_over(space, positive_part(g), d), integral_over(space, negative_part(g), d));
}

/// inf_A (mu(phi^{-n}(A) cap B) - c mu(D cap A)) = -int (P^n 1_B - c 1_D)-.
inline Rational ding_defect(const FiniteSystem& sys, const MeasurableSet& b, const MeasurableSet& d,
                            const Rational& c, std::size_t n) {
  const auto& space = sys.space();
  if (measure(space, b).is_zero()) throw ValidationError("lower-bound defect needs mu(B) > 0");
  if (c.sign() <= 0) throw ValidationError("lower-bound constant must be positive");
  auto h = sys.pf_power(n).apply(indicator(space, b)) - c * indicator(space, d);
  return -integral(space, negative_part(h));
}

/// sup_B |mu(phi^n(A) cap B) - a mu(B)| with a = lim mu(phi^m(A)), which is
/// max((1 - a) mu(phi^n A), a (1 - mu(phi^n A))).
inline Rational rice_defect(const FiniteSystem& sys, const MeasurableSet& a, std::size_t n) {
  auto limit = image_measure_limit(sys, a);
  auto orbit = set_orbit(sys.map(), a, Direction::forward);
  auto s = measure(sys.space(), orbit.at(n));
  return std::max((Rational(1) - limit) * s, limit * (Rational(1) - s));
}

/// Limits on the stabilized cycle; nullopt when the sequence keeps oscillating.
inline std::optional<Rational> uniform_defect_limit(const FiniteSystem& sys, const MeasurableSet& b) {
  auto [lo, hi] = sys.cycle_window();
  return detail::constant_on(lo, hi, [&](std::size_t n) { return uniform_mixing_defect(sys, b, n); });
}

inline std::optional<Rational> local_defect_limit(const FiniteSystem& sys, const MeasurableSet& b,
                                                  const MeasurableSet& d) {
  auto [lo, hi] = sys.cycle_window();
  return detail::constant_on(lo, hi, [&](std::size_t n) { return local_uniform_mixing_defect(sys, b, d, n); });
}

inline std::optional<Rational> ding_defect_limit(const FiniteSystem& sys, const MeasurableSet& b,
                                                 const MeasurableSet& d, const Rational& c) {
  auto [lo, hi] = sys.cycle_window();
  return detail::constant_on(lo, hi, [&](std::size_t n) { return ding_defect(sys, b, d, c, n); });
}

inline std::optional<Rational> rice_defect_limit(const FiniteSystem& sys, const MeasurableSet& a) {
  auto orbit = set_orbit(sys.map(), a, Direction::forward);
  std::vector<Rational> s;
  for (auto k = orbit.preperiod; k < orbit.orbit_sets.size(); ++k) s.push_back(measure(sys.space(), orbit.orbit_sets[k]));
  auto limit = s.front();
  if (std::any_of(s.begin(), s.end(), [&](const Rational& v) { return v != limit; }))
    throw DiagnosticFailure("image measures are not eventually constant");
  return std::max((Rational(1) - limit) * limit, limit * (Rational(1) - limit));
}

/// A positive-measure D with vanishing local defect limit for B, if one
/// exists. The local defect is monotone in D, so it suffices to try the
/// positive singletons.
inline std::optional<MeasurableSet> find_local_mixing_trace(const FiniteSystem& sys, const MeasurableSet& b) {
  const auto& space = sys.space();
  for (auto x : space.positive_atoms()) {
    auto d = space.make_set({x});
    auto lim = local_defect_limit(sys, b, d);
    if (lim && lim->is_zero()) return d;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lower-bound witnesses

struct LowerBoundWitness {
  MeasurableSet d;
  Rational c;
};

/// From the limit f_B = lim P^n 1_B: c is the smallest positive value of f_B
/// and D = {f_B >= c}. None iff the powers diverge.
inline std::optional<LowerBoundWitness> find_lower_bound_witness(const FiniteSystem& sys, const MeasurableSet& b) {
  const auto& space = sys.space();
  if (measure(space, b).is_zero()) throw ValidationError("lower-bound witness needs mu(B) > 0");
  if (!sys.powers_converge()) return std::nullopt;
  auto fb = sys.powers().items[sys.powers().preperiod].apply(indicator(space, b));
  std::optional<Rational> c;
  for (const auto& v : fb.values)
    if (v.sign() > 0 && (!c || v < *c)) c = v;
  if (!c) throw DiagnosticFailure("limit of a positive indicator vanishes");
  AtomSet d(space.atom_count());
  for (std::size_t k = 0; k < fb.size(); ++k)
    if (fb.values[k] >= *c) d.insert(space.positive_atoms()[k]);
  return LowerBoundWitness{space.make_set(std::move(d)), *c};
}

/// Witness search that does not presuppose convergence: a positive atom x
/// that stays in the support of P^n 1_B along the whole cycle, with c the
/// smallest value there. The lower-bound functional only grows when D or c
/// shrink, so singletons are exhaustive.
inline std::optional<LowerBoundWitness> search_lower_bound_witness(const FiniteSystem& sys, const MeasurableSet& b) {
  const auto& space = sys.space();
  auto [lo, hi] = sys.cycle_window();
  auto ib = indicator(space, b);
  std::vector<Density> tail;
  for (auto n = lo; n < hi; ++n) tail.push_back(sys.pf_power(n).apply(ib));
  for (std::size_t k = 0; k < space.positive_count(); ++k) {
    std::optional<Rational> c;
    for (const auto& f : tail)
      if (!c || f.values[k] < *c) c = f.values[k];
    if (c && c->sign() > 0) return LowerBoundWitness{space.make_set({space.positive_atoms()[k]}), *c};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lin's criterion

struct LinRoutes {
  bool expectation_vanishes = false; // E(f | completed Sigma_infty) = 0
  bool powers_vanish = false;        // lim P^n f exists and is 0
};

inline LinRoutes lin_routes(const FiniteSystem& sys, const Density& f) {
  const auto& space = sys.space();
  LinRoutes r;
  auto e = conditional_expectation(space, completion_mod_null(space, sys.tail_algebra()), f);
  r.expectation_vanishes = e == constant_density(space, Rational());
  auto seq = density_sequence(sys.pf(), f);
  r.powers_vanish = seq.converges && *seq.limit == constant_density(space, Rational());
  return r;
}

/// True iff f annihilates every bounded function measurable for the
/// completed tail algebra, equivalently lim P^n f = 0.
inline bool lin_test(const FiniteSystem& sys, const Density& f) {
  auto r = lin_routes(sys, f);
  if (r.expectation_vanishes != r.powers_vanish) throw DiagnosticFailure("Lin criterion routes disagree");
  return r.expectation_vanishes;
}

// ---------------------------------------------------------------------------
// Profiles

struct MixingProfile {
  std::vector<Rational> defects; // uniform mixing defect for n = 0..n_max
  bool ergodic = false;
  bool mixing = false;
  bool exact = false;
  bool powers_converge = false;
  std::optional<LowerBoundWitness> witness;
};

inline MixingProfile mixing_profile(const FiniteSystem& sys, const MeasurableSet& b, std::size_t n_max) {
  MixingProfile p;
  for (std::size_t n = 0; n <= n_max; ++n) p.defects.push_back(uniform_mixing_defect(sys, b, n));
  p.ergodic = is_ergodic(sys);
  p.mixing = is_mixing(sys);
  p.exact = is_exact(sys);
  p.powers_converge = sys.powers_converge();
  if (measure(sys.space(), b).sign() > 0) p.witness = find_lower_bound_witness(sys, b);
  if ((p.exact && !p.mixing) || (p.mixing && !p.ergodic) || (p.exact && !p.powers_converge))
    throw DiagnosticFailure("classification flags violate exact => mixing => ergodic");
  return p;
}

} // namespace pfkit
