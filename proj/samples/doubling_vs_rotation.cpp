// Exact dyadic profile of the doubling map next to Ulam profiles of the
// doubling map and an irrational rotation.

#include "pfkit/interval_systems.hpp"

#include <cmath>
#include <iostream>

int main() {
  using namespace pfkit;
  auto b = dyadic::DyadicSet::cell(3, 4); // [3/16, 4/16)
  auto exact = dyadic::dyadic_exactness_profile(b, 6);
  for (std::size_t n = 0; n < exact.size(); ++n) std::cout << "dyadic n=" << n << " defect " << exact[n] << '\n';

  const std::size_t bins = 256;
  auto doubling = ulam::ulam_assemble(ulam::IntervalMap::doubling(), bins);
  auto rotation = ulam::ulam_assemble(ulam::IntervalMap::rotation((std::sqrt(5.0) - 1.0) / 2.0), bins);
  auto pd = ulam::ulam_mixing_profile(doubling, {0}, 12);
  auto pr = ulam::ulam_mixing_profile(rotation, {0}, 64);
  std::cout << "ulam doubling: " << ulam::to_string(pd.verdict) << ", defect at 8 = " << pd.defects[8] << '\n';
  std::cout << "ulam rotation: " << ulam::to_string(pr.verdict) << ", defect at 64 = " << pr.defects[64] << '\n';
}
