// pfkit: command-line front end.
//
// Exit codes: 0 success, 1 validation or domain failure (JSON error object on
// stdout), 2 usage error.

#include "pfkit/audit.hpp"
#include "pfkit/interval_systems.hpp"
#include "pfkit/io.hpp"
#include "pfkit/mixing_diagnostics.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pfkit;
using io::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json header(const std::string& command, const std::string& digest = "") {
  json j{{"schema_version", io::kSchemaVersion}, {"command", command}};
  if (!digest.empty()) j["input_digest"] = digest;
  return j;
}

struct Loaded {
  io::SystemDescription desc;
  std::string digest;
};

Loaded load(const std::string& path) {
  auto text = io::read_file(path);
  return {io::parse_system_text(text, path), io::digest(text)};
}

const MeasurableSet& named_set(const io::SystemDescription& d, const std::string& name) {
  auto it = d.named_sets.find(name);
  if (it == d.named_sets.end()) throw ValidationError("no named set '" + name + "' in system file");
  return it->second;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// ---------------------------------------------------------------------------

int run_classify(const std::string& file, const std::string& echo) {
  auto [desc, digest] = load(file);
  FiniteSystem sys(desc.map);
  const auto& space = sys.space();
  auto erg = ergodicity_routes(sys);
  auto ex = exactness_routes(sys);
  auto report = header(echo, digest);
  report["flags"] = {{"ergodic", is_ergodic(sys)},
                     {"mixing", is_mixing(sys)},
                     {"exact", is_exact(sys)},
                     {"powers_converge", sys.powers_converge()}};
  report["routes"] = {
      {"fixed_space_dimension", io::exact(Rational(static_cast<std::int64_t>(erg.fixed_space_dimension)))},
      {"positive_invariant_blocks", io::exact(Rational(static_cast<std::int64_t>(erg.positive_invariant_blocks)))},
      {"mixing_on_atom_pairs", mixing_on_atom_pairs(sys)},
      {"powers_converge_to_rank_one", powers_converge_to_rank_one(sys)},
      {"tail_trivial", ex.tail_trivial},
      {"strong_rank_one", ex.strong_rank_one},
      {"images_fill_space", ex.images_fill_space},
      {"completions_equal", completions_equal(space, sys.tail_algebra(), sys.invariant_algebra())}};
  report["power_cycle"] = {{"preperiod", sys.powers().preperiod}, {"period", sys.powers().period}};
  report["invariant_blocks"] = io::blocks_json(space, sys.invariant_algebra());
  report["tail_blocks"] = io::blocks_json(space, sys.tail_algebra());
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_orbit(const std::string& file, const std::string& set_name, const std::string& direction, std::size_t n_max) {
  auto [desc, digest] = load(file);
  const auto& space = desc.space();
  const auto& a = named_set(desc, set_name);
  auto dir = direction == "fwd" ? Direction::forward : Direction::backward;
  auto orbit = set_orbit(desc.map, a, dir);
  auto hull = minimal_invariant_superset(desc.map, a);
  std::cout << "# input_digest=" << digest << '\n';
  std::cout << "# limit_class="
            << (orbit.limit_class ? io::set_string(space, orbit.limit_class->canonical_bits()) : std::string("none"))
            << '\n';
  std::cout << "# A*=" << io::set_string(space, hull.bits()) << " class=" << io::set_string(space, class_of(space, hull).canonical_bits())
            << '\n';
  auto rows = std::max(n_max + 1, orbit.orbit_sets.size());
  io::write_orbit_csv(std::cout, space, orbit, rows);
  return 0;
}

int run_limit(const std::string& file, const std::string& name, const std::string& echo) {
  auto [desc, digest] = load(file);
  const auto& space = desc.space();
  FiniteSystem sys(desc.map);
  Density f;
  if (auto it = desc.densities.find(name); it != desc.densities.end())
    f = it->second;
  else
    f = indicator(space, named_set(desc, name));
  auto seq = density_sequence(sys.pf(), f);
  auto expectation = conditional_expectation(space, sys.invariant_algebra(), f);
  auto report = header(echo, digest);
  report["density"] = name;
  report["converges"] = seq.converges;
  report["limit"] = seq.limit ? io::density_json(space, *seq.limit) : json(nullptr);
  report["conditional_expectation"] = io::density_json(space, expectation);
  report["cesaro_mean"] = io::density_json(space, cesaro_limit(sys.pf()).apply(f));
  report["limit_equals_expectation"] = seq.limit ? json(*seq.limit == expectation) : json(nullptr);
  std::cout << report.dump(2) << '\n';
  if (seq.limit && *seq.limit != expectation) throw DiagnosticFailure("limit differs from the conditional expectation");
  return 0;
}

int run_mixing_profile(const std::string& file, const std::string& set_name, const std::string& trace_name,
                       const std::string& c_text, std::size_t n_max) {
  auto [desc, digest] = load(file);
  const auto& space = desc.space();
  FiniteSystem sys(desc.map);
  const auto& b = named_set(desc, set_name);
  auto profile = mixing_profile(sys, b, n_max);
  const auto first = space.make_set({space.positive_atoms().front()});

  std::cout << "# input_digest=" << digest << '\n';
  std::cout << "# ergodic=" << profile.ergodic << " mixing=" << profile.mixing << " exact=" << profile.exact
            << " powers_converge=" << profile.powers_converge << '\n';
  std::cout << "# section=uniform B=" << io::set_string(space, b.bits()) << '\n';
  io::write_defect_csv(std::cout, profile.defects);

  auto trace = !trace_name.empty() ? named_set(desc, trace_name) : find_local_mixing_trace(sys, b).value_or(first);
  std::vector<Rational> local;
  for (std::size_t n = 0; n <= n_max; ++n) local.push_back(local_uniform_mixing_defect(sys, b, trace, n));
  std::cout << "# section=local D=" << io::set_string(space, trace.bits()) << '\n';
  io::write_defect_csv(std::cout, local);

  if (measure(space, b).sign() > 0) {
    auto found = search_lower_bound_witness(sys, b);
    auto d = !trace_name.empty() ? trace : found ? found->d : first;
    auto c = !c_text.empty() ? Rational::parse(c_text) : found ? found->c : Rational(1, 2);
    std::vector<Rational> ding;
    for (std::size_t n = 0; n <= n_max; ++n) ding.push_back(ding_defect(sys, b, d, c, n));
    std::cout << "# section=lower_bound D=" << io::set_string(space, d.bits()) << " c=" << c << '\n';
    io::write_defect_csv(std::cout, ding);
  } else {
    std::cout << "# section=lower_bound skipped: B is null\n";
  }

  std::vector<Rational> rice;
  for (std::size_t n = 0; n <= n_max; ++n) rice.push_back(rice_defect(sys, b, n));
  std::cout << "# section=image A=" << io::set_string(space, b.bits()) << '\n';
  io::write_defect_csv(std::cout, rice);
  return 0;
}

int run_dyadic(const std::string& text, std::size_t n_max) {
  auto b = dyadic::parse_dyadic_set(text);
  std::cout << "# set=" << b.str() << " level=" << b.level() << " measure=" << b.measure() << '\n';
  std::cout << "# section=exactness\n";
  io::write_defect_csv(std::cout, dyadic::dyadic_exactness_profile(b, n_max));
  std::cout << "# section=image_measure\n";
  auto m = dyadic::dyadic_image_measures(b, n_max);
  std::cout << "n,measure\n";
  for (std::size_t n = 0; n < m.size(); ++n) std::cout << n << ',' << m[n] << '\n';
  std::cout << "# section=image\n";
  io::write_defect_csv(std::cout, dyadic::dyadic_rice_profile(b, n_max));
  return 0;
}

ulam::IntervalMap parse_map(const std::string& s) {
  if (s == "doubling") return ulam::IntervalMap::doubling();
  if (s == "tent") return ulam::IntervalMap::tent();
  if (s.rfind("rotation:", 0) == 0) {
    try {
      std::size_t used = 0;
      auto text = s.substr(9);
      double alpha = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return ulam::IntervalMap::rotation(alpha);
    } catch (const std::exception&) {
      throw UsageError("bad rotation angle in '" + s + "'");
    }
  }
  throw UsageError("unknown map '" + s + "' (expected doubling, tent or rotation:ALPHA)");
}

int run_ulam(const std::string& map_name, std::size_t bins, std::size_t n_max, double tol,
             const std::vector<std::size_t>& bin_set, const std::string& emit) {
  auto model = ulam::ulam_assemble(parse_map(map_name), bins);
  auto profile = ulam::ulam_mixing_profile(model, bin_set, n_max, tol);
  std::cout << "# map=" << model.map.name() << " bins=" << bins << " tol=" << tol << '\n';
  std::cout << "# verdict=" << ulam::to_string(profile.verdict) << '\n';
  io::write_defect_csv(std::cout, profile.defects);
  if (!emit.empty()) {
    std::ofstream out(emit);
    if (!out) throw ValidationError("cannot write matrix to '" + emit + "'");
    ulam::write_matrix_csv(out, model);
  }
  return 0;
}

int run_audit_cmd(const std::string& theorem, std::size_t count, std::uint64_t seed, std::size_t jobs) {
  auto kinds = audit_mask(theorem);
  if (!kinds) throw UsageError("unknown theorem '" + theorem + "'");
  SystemGenerator gen;
  gen.seed = seed;
  auto report = run_audit(*kinds, gen, count, jobs);
  std::cout << io::audit_report_json(report).dump(2) << '\n';
  return report.passed() ? 0 : kExitFailure;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PFKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("PFKIT_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

void print_error(const std::string& type, const std::string& message) {
  std::cout << io::error_json(type, message).dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer operators and mixing diagnostics for finite and interval systems"};
  app.require_subcommand(1);
  const auto echo = command_line(argc, argv);

  std::string file, set_name, direction = "fwd", density, trace, c_text, dyadic_set, map_name, emit, theorem = "all";
  std::size_t n_max = 16, bins = 64, count = 100, jobs = 1;
  std::size_t ulam_steps = ulam::kDefaultSteps;
  double tol = ulam::kDefaultTolerance;
  std::vector<std::size_t> bin_set{0};
  std::uint64_t seed = 0;

  auto* classify = app.add_subcommand("classify", "Ergodic, mixing and exact flags with their separate routes");
  classify->add_option("file", file, "System file (JSON)")->required();

  auto* orbit = app.add_subcommand("orbit", "Forward or backward set orbit as CSV");
  orbit->add_option("file", file, "System file (JSON)")->required();
  orbit->add_option("--set", set_name, "Named set")->required();
  orbit->add_option("--direction", direction, "fwd or bwd")->check(CLI::IsMember({"fwd", "bwd"}));
  orbit->add_option("--n-max", n_max, "Last row index (extended to cover one full cycle)");

  auto* limit = app.add_subcommand("limit", "Limit of P^n f against E(f | invariant sets)");
  limit->add_option("file", file, "System file (JSON)")->required();
  limit->add_option("--density", density, "Named density, or a named set for its indicator")->required();

  auto* profile = app.add_subcommand("mixing-profile", "Defect tables as CSV");
  profile->add_option("file", file, "System file (JSON)")->required();
  profile->add_option("--set", set_name, "Named set B")->required();
  profile->add_option("--trace", trace, "Named trace set D");
  profile->add_option("--c", c_text, "Lower-bound constant p/q");
  profile->add_option("--n-max", n_max, "Last step")->required();

  auto* dyadic_cmd = app.add_subcommand("dyadic", "Exact doubling-map profiles of a dyadic set");
  dyadic_cmd->add_option("--set", dyadic_set, "Intervals \"a,b;c,d\" with dyadic endpoints")->required();
  dyadic_cmd->add_option("--n-max", n_max, "Last step")->required();

  auto* ulam_cmd = app.add_subcommand("ulam", "Floating-point Ulam profile of an interval map");
  ulam_cmd->add_option("--map", map_name, "doubling, tent or rotation:ALPHA")->required();
  ulam_cmd->add_option("--bins", bins, "Number of bins");
  ulam_cmd->add_option("--n-max", ulam_steps, "Last step");
  ulam_cmd->add_option("--tol", tol, "Verdict threshold");
  ulam_cmd->add_option("--bin-set", bin_set, "Bins forming B (default: bin 0)")->delimiter(',');
  ulam_cmd->add_option("--emit-matrix", emit, "Write the matrix as CSV to this path");

  auto* audit = app.add_subcommand("audit", "Randomized audits of the equivalence theorems");
  audit->add_option("--theorem", theorem, "main, prop21, thm22, lemma23, structural or all")
      ->check(CLI::IsMember({"main", "prop21", "thm22", "lemma23", "structural", "all"}));
  audit->add_option("--count", count, "Number of systems");
  auto* seed_opt = audit->add_option("--seed", seed, "Base seed (default: $PFKIT_SEED or 0)");
  audit->add_option("--jobs", jobs, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*classify) return run_classify(file, echo);
    if (*orbit) return run_orbit(file, set_name, direction, n_max);
    if (*limit) return run_limit(file, density, echo);
    if (*profile) return run_mixing_profile(file, set_name, trace, c_text, n_max);
    if (*dyadic_cmd) return run_dyadic(dyadic_set, n_max);
    if (*ulam_cmd) return run_ulam(map_name, bins, ulam_steps, tol, bin_set, emit);
    if (*audit) return run_audit_cmd(theorem, count, seed_opt->count() ? seed : default_seed(), jobs);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotMeasurePreserving& e) {
    auto j = io::error_json("NotMeasurePreserving", e.what());
    j["error"]["atom"] = e.label;
    std::cout << j.dump(2) << '\n';
    return kExitFailure;
  } catch (const ParseError& e) {
    print_error("ParseError", e.what());
    return kExitFailure;
  } catch (const ValidationError& e) {
    print_error("ValidationError", e.what());
    return kExitFailure;
  } catch (const Error& e) {
    print_error("Error", e.what());
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    print_error("ParseError", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
