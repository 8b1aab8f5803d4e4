// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "pfkit/audit.hpp"
#include "pfkit/fixtures.hpp"
#include "pfkit/interval_systems.hpp"
#include "pfkit/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pfkit;
using namespace pfkit::dyadic;
using namespace pfkit::ulam;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kSystems = 1000;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

SystemGenerator generator() {
  SystemGenerator g;
  g.seed = kSeed;
  g.max_positive_atoms = 8;
  g.max_null_atoms = 4;
  return g;
}

std::string first_failure(const AuditReport& r) {
  if (r.passed()) return {};
  const auto& f = r.failures.front();
  return std::to_string(r.failures.size()) + " failures, first: seed " + std::to_string(f.seed) + " " + f.theorem_id +
         " (" + f.route_values + ")";
}

Outcome check_audit(unsigned kinds) {
  Outcome out;
  auto r = run_audit(kinds, generator(), kSystems);
  out.require(r.systems_tested == kSystems, "systems_tested != count");
  out.require(r.passed(), first_failure(r));
  out.detail = out.ok ? std::to_string(r.systems_tested) + " systems" : out.detail;
  return out;
}

MeasurableSet named(const io::SystemDescription& d, const char* name) {
  auto it = d.named_sets.find(name);
  if (it == d.named_sets.end()) throw ParseError(std::string("missing named set ") + name);
  return it->second;
}

Outcome fixture_claims() {
  Outcome out;
  auto d = io::parse_system(std::string(PFKIT_DATA_DIR) + "/paper_ex1.json");
  const auto& space = d.space();
  const auto& phi = d.map;
  auto a12 = named(d, "A12");
  auto a1 = named(d, "A1");
  auto omega = space.full_set();
  auto a13 = space.make_set({*space.index_of("1"), *space.index_of("3")});

  auto orbit = set_orbit(phi, a12, Direction::forward);
  for (std::size_t n = 1; n <= 64; ++n) out.require(orbit.at(n) == a13, "image of {1,2} differs from {1,3} at n=" + std::to_string(n));
  out.require(orbit.converges(), "orbit of {1,2} does not converge");
  if (orbit.converges()) {
    out.require(*orbit.limit_class == class_of(space, a13), "limit class of {1,2} is not [{1,3}]");
    out.require(*orbit.limit_class == class_of(space, omega), "limit class of {1,2} is not [Omega]");
  }
  out.require(minimal_invariant_superset(phi, a12) == omega, "invariant hull of {1,2} is not Omega");

  auto orbit1 = set_orbit(phi, a1, Direction::forward);
  for (std::size_t n = 0; n <= 64; ++n) out.require(orbit1.at(n) == a1, "image of {1} moves at n=" + std::to_string(n));
  out.require(class_of(space, a1) != class_of(space, omega), "[{1}] equals [Omega]");
  if (out.ok) out.detail = "image orbits of {1,2} and {1} checked to n=64";
  return out;
}

Outcome identity_only_convergence() {
  Outcome out;
  std::size_t identities = 0;
  auto check = [&](const MeasurePreservingMap& phi, const std::string& who) {
    auto p = build_pf(phi);
    auto seq = power_sequence(p);
    bool id = p.is_identity();
    identities += id;
    out.require(seq.converges == id, who + ": convergence of powers disagrees with P = I");
    if (id) out.require(seq.preperiod == 0, who + ": identity converges only after n > 0");
  };
  auto g = generator();
  for (std::size_t i = 0; i < kSystems; ++i) {
    auto gi = g;
    gi.seed = derive_seed(g.seed, i);
    check(generate_system(gi), "seed " + std::to_string(gi.seed));
  }
  for (const auto& name : fixtures::names()) check(*fixtures::by_name(name), name);
  if (out.ok) out.detail = std::to_string(identities) + " identities among " + std::to_string(kSystems) + " systems + fixtures";
  return out;
}

Outcome dyadic_exactness() {
  Outcome out;
  Rng rng(kSeed);
  std::size_t sets = 0;
  auto check = [&](const DyadicSet& b) {
    if (b.empty()) return;
    ++sets;
    const auto k = static_cast<std::size_t>(b.level());
    const auto horizon = k + 3;
    auto profile = dyadic_exactness_profile(b, horizon);
    for (auto n = k; n <= horizon; ++n)
      out.require(profile[n].is_zero(), "profile of " + b.str() + " nonzero at n=" + std::to_string(n));
    auto images = dyadic_image_measures(b, horizon);
    for (std::size_t n = 1; n < images.size(); ++n)
      out.require(images[n - 1] <= images[n], "image measures of " + b.str() + " decrease");
    out.require(images[k] == Rational(1), "image of " + b.str() + " not full after level steps");
    auto rice = dyadic_rice_profile(b, horizon);
    for (std::size_t n = 0; n <= horizon; ++n)
      out.require(rice[n] == Rational(1) - images[n], "rice defect of " + b.str() + " differs from 1 - mu(image)");
  };
  for (int k = 0; k <= 10; ++k) {
    const auto cells = std::int64_t{1} << k;
    for (std::int64_t j = 0; j < cells; ++j) check(DyadicSet::cell(j, k));
    for (int trial = 0; trial < 50 && k > 0; ++trial) {
      DyadicSet b;
      for (std::int64_t j = 0; j < cells; ++j)
        if (rng.coin()) b = b | DyadicSet::cell(j, k);
      check(b);
    }
  }
  if (out.ok) out.detail = std::to_string(sets) + " sets up to level 10";
  return out;
}

Outcome ulam_cross_validation() {
  Outcome out;
  Rng rng(kSeed);
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const auto n = std::size_t{1} << k;
    auto model = ulam_assemble(IntervalMap::doubling(), n);
    auto exact = dyadic_transfer_matrix(k);
    for (std::size_t i = 0; i < n * n; ++i) worst = std::max(worst, std::abs(model.matrix[i] - exact[i].to_double()));
    std::vector<std::vector<std::size_t>> sets{{0}, {n - 1}};
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<std::size_t> b;
      for (std::size_t j = 0; j < n; ++j)
        if (rng.coin()) b.push_back(j);
      sets.push_back(b);
    }
    for (const auto& b : sets) {
      auto p = ulam_mixing_profile(model, b, static_cast<std::size_t>(k));
      out.require(p.defects[static_cast<std::size_t>(k)] <= 1e-12,
                  "doubling profile at " + std::to_string(n) + " bins above 1e-12 at step " + std::to_string(k));
    }
  }
  out.require(worst <= 1e-12, "Ulam matrix deviates from exact matrix by " + std::to_string(worst));

  auto rotation = ulam_assemble(IntervalMap::rotation(std::numbers::phi - 1.0), 64);
  std::vector<std::size_t> half(32);
  std::iota(half.begin(), half.end(), std::size_t{0});
  auto p = ulam_mixing_profile(rotation, half, 64);
  double floor = *std::min_element(p.defects.begin(), p.defects.end());
  out.require(floor > 1e-3, "rotation profile fell to " + std::to_string(floor));
  if (out.ok) {
    std::ostringstream ss;
    ss << "max matrix deviation " << worst << ", rotation floor " << floor;
    out.detail = ss.str();
  }
  return out;
}

Outcome structural_invariants() {
  Outcome out;
  const auto kind = static_cast<unsigned>(AuditKind::structural);
  for (const auto& name : fixtures::names()) {
    auto failures = audit_system(*fixtures::by_name(name), kind);
    out.require(failures.empty(), name + ": " + (failures.empty() ? "" : failures.front().theorem_id + " (" +
                                                                           failures.front().route_values + ")"));
  }
  auto r = run_audit(kind, generator(), kSystems);
  out.require(r.passed(), first_failure(r));
  if (out.ok) out.detail = std::to_string(fixtures::names().size()) + " fixtures + " + std::to_string(kSystems) + " systems";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "worked example orbits and classes", 1.0, fixture_claims},
      {2, "orbit / power / tail-algebra equivalence", 60.0, [] { return check_audit(static_cast<unsigned>(AuditKind::main)); }},
      {3, "lower-bound witness characterization", 60.0, [] { return check_audit(static_cast<unsigned>(AuditKind::prop21)); }},
      {4, "uniform mixing and image-measure characterizations", 60.0,
       [] { return check_audit(static_cast<unsigned>(AuditKind::thm22) | static_cast<unsigned>(AuditKind::lemma23)); }},
      {5, "powers converge only for the identity", 60.0, identity_only_convergence},
      {6, "dyadic doubling exactness", 5.0, dyadic_exactness},
      {7, "Ulam doubling cross-validation", 10.0, ulam_cross_validation},
      {8, "structural invariants", 60.0, structural_invariants},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs <= c.budget_s;
    bool pass = o.ok && in_time;
    if (!in_time && o.ok) o.detail += " (over budget of " + std::to_string(c.budget_s) + " s)";
    std::printf("%s criterion %d: %s [%.3f s / %.0f s] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
