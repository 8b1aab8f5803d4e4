#pragma once

// Small named systems used throughout the tests, the CLI and the audits.

#include "pfkit/finite_dynamics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfkit::fixtures {

/// Omega = {1,2,3}, mu = (1/2, 0, 1/2), 1 -> 1, 2 -> 3, 3 -> 3.
inline MeasurePreservingMap three_point() {
  FiniteProbabilitySpace space({"1", "2", "3"}, {Rational(1, 2), Rational(0), Rational(1, 2)});
  return {space, {0, 2, 2}};
}

/// Two atoms of mass 1/2 exchanged.
inline MeasurePreservingMap two_atom_swap() {
  FiniteProbabilitySpace space({"a", "b"}, {Rational(1, 2), Rational(1, 2)});
  return {space, {1, 0}};
}

inline MeasurePreservingMap identity(std::vector<Rational> masses) {
  auto space = FiniteProbabilitySpace::with_masses(std::move(masses));
  std::vector<std::size_t> t(space.atom_count());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
  return {space, std::move(t)};
}

/// One atom of mass 1 followed by `nulls` null atoms chained into it.
inline MeasurePreservingMap single_atom(std::size_t nulls = 2) {
  std::vector<std::string> labels{"p"};
  std::vector<Rational> masses{Rational(1)};
  std::vector<std::size_t> t{0};
  for (std::size_t k = 0; k < nulls; ++k) {
    labels.push_back("z" + std::to_string(k));
    masses.emplace_back(0);
    t.push_back(k); // z0 -> p, z1 -> z0, ...
  }
  return {FiniteProbabilitySpace(std::move(labels), std::move(masses)), std::move(t)};
}

/// A 3-cycle of equal masses plus a fixed atom and a null atom feeding the cycle.
inline MeasurePreservingMap cycle_with_fixed_point() {
  FiniteProbabilitySpace space({"c0", "c1", "c2", "f", "z"},
                               {Rational(1, 5), Rational(1, 5), Rational(1, 5), Rational(2, 5), Rational(0)});
  return {space, {1, 2, 0, 3, 1}};
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"three_point", "two_atom_swap", "identity3", "single_atom",
                                          "cycle_with_fixed_point"};
  return n;
}

inline std::optional<MeasurePreservingMap> by_name(const std::string& name) {
  if (name == "three_point") return three_point();
  if (name == "two_atom_swap") return two_atom_swap();
  if (name == "identity3") return identity({Rational(1, 6), Rational(1, 3), Rational(1, 2)});
  if (name == "single_atom") return single_atom();
  if (name == "cycle_with_fixed_point") return cycle_with_fixed_point();
  return std::nullopt;
}

inline std::vector<MeasurePreservingMap> all() {
  std::vector<MeasurePreservingMap> out;
  for (const auto& n : names()) out.push_back(*by_name(n));
  return out;
}

} // namespace pfkit::fixtures
