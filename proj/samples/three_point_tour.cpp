// Walks through the three-atom system with a null middle atom: forward
// images of {1,2}, the invariant hull, and the classification flags.

#include "pfkit/fixtures.hpp"
#include "pfkit/mixing_diagnostics.hpp"

#include <iostream>

int main() {
  using namespace pfkit;
  auto phi = fixtures::three_point();
  const auto& space = phi.space();
  FiniteSystem sys(phi);

  auto a = space.make_set({0, 1});
  auto orbit = set_orbit(phi, a, Direction::forward);
  for (std::size_t n = 0; n < 4; ++n) {
    std::cout << "phi^" << n << "({1,2}) = {";
    bool first = true;
    orbit.at(n).bits().for_each([&](std::size_t i) {
      std::cout << (first ? "" : ",") << space.label(i);
      first = false;
    });
    std::cout << "}  measure " << measure(space, orbit.at(n)) << '\n';
  }
  auto hull = minimal_invariant_superset(phi, a);
  std::cout << "invariant hull has measure " << measure(space, hull) << ", limit equivalent to hull: "
            << (*orbit.limit_class == class_of(space, hull)) << '\n';
  std::cout << "ergodic " << is_ergodic(sys) << ", mixing " << is_mixing(sys) << ", exact " << is_exact(sys)
            << ", powers converge " << sys.powers_converge() << '\n';
  std::cout << "uniform defect of {1} at n = 5: " << uniform_mixing_defect(sys, space.make_set({0}), 5) << '\n';
}
