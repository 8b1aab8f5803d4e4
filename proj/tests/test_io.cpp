#include "pfkit/io.hpp"
#include "support/generators.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <sstream>
#include <sys/wait.h>

using namespace pfkit;
using Catch::Matchers::ContainsSubstring;

namespace {

const std::string kData = PFKIT_DATA_DIR;
const std::string kCli = PFKIT_CLI_PATH;

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string system_text(const std::string& masses, const std::string& map) {
  return R"({"atoms": [{"label": "a", "mass": ")" + masses.substr(0, masses.find(',')) +
         R"("}, {"label": "b", "mass": ")" + masses.substr(masses.find(',') + 1) + R"("}], "map": )" + map + "}";
}

} // namespace

TEST_CASE("bundled three-atom file parses") {
  auto d = io::parse_system(kData + "/paper_ex1.json");
  CHECK(d.space().atom_count() == 3);
  CHECK(d.map.targets() == std::vector<std::size_t>{0, 2, 2});
  CHECK(d.named_sets.at("A12") == d.space().make_set({0, 1}));
  CHECK(d.densities.at("f").values == std::vector<Rational>{Rational(1), Rational(-1, 2)});
}

TEST_CASE("parse errors carry context") {
  CHECK_THROWS_WITH(io::parse_system_text(system_text("1/2,1/3", R"(["a", "b"])")), ContainsSubstring("masses sum to 5/6"));
  CHECK_THROWS_AS(io::parse_system_text(system_text("1/2,1/2", R"(["a", "zz"])")), ParseError);
  CHECK_THROWS_WITH(io::parse_system_text(system_text("1/2,1/2", R"(["a", "zz"])")), ContainsSubstring("'zz'"));
  CHECK_THROWS_WITH(io::parse_system_text("{\n  \"atoms\": [\n  oops ]\n}", "f.json"), ContainsSubstring("f.json:3:"));
  CHECK_THROWS_AS(io::parse_system_text(system_text("1/2,1/2", R"(["a"])")), ParseError);
  CHECK_THROWS_AS(io::parse_system_text(system_text("0.5,1/2", R"(["a", "b"])")), ParseError);
  try {
    io::parse_system_text(system_text("1/2,1/2", R"(["a", "a"])"));
    FAIL("expected NotMeasurePreserving");
  } catch (const NotMeasurePreserving& e) {
    CHECK(e.label == "a");
  }
}

TEST_CASE("emit then parse round-trips") {
  auto systems = testgen::systems(100, 5);
  for (std::size_t i = 0; i < systems.size(); ++i) {
    io::SystemDescription d{systems[i], {}, {}};
    d.named_sets.emplace("S", d.space().make_set({0}));
    pfkit::Rng rng(i);
    d.densities.emplace("g", testgen::density(rng, d.space()));
    auto back = io::parse_system_text(io::emit_system(d));
    INFO("system " << i);
    CHECK(back.space().labels() == d.space().labels());
    CHECK(back.space().masses() == d.space().masses());
    CHECK(back.map.targets() == d.map.targets());
    CHECK(back.named_sets.at("S").bits() == d.named_sets.at("S").bits());
    CHECK(back.densities.at("g") == d.densities.at("g"));
    CHECK(io::emit_system(back) == io::emit_system(d));
  }
}

TEST_CASE("CSV helpers") {
  std::ostringstream os;
  io::write_defect_csv(os, std::vector<Rational>{Rational(1, 4), Rational(0)});
  CHECK(os.str() == "n,defect\n0,1/4\n1,0\n");
  CHECK(io::csv_field("{1,3}") == "\"{1,3}\"");
  CHECK(io::digest("") == "cbf29ce484222325");
}

TEST_CASE("cli classify") {
  auto r = run("classify " + kData + "/paper_ex1.json");
  REQUIRE(r.status == 0);
  auto j = io::json::parse(r.out);
  CHECK(j["flags"]["ergodic"] == false);
  CHECK(j["flags"]["mixing"] == false);
  CHECK(j["flags"]["exact"] == false);
  CHECK(j["flags"]["powers_converge"] == true);
  CHECK(j["schema_version"] == "1");
  CHECK(j["routes"]["fixed_space_dimension"]["provenance"] == "exact");
}

TEST_CASE("cli orbit") {
  auto r = run("orbit " + kData + "/paper_ex1.json --set A12 --direction fwd --n-max 4");
  REQUIRE(r.status == 0);
  CHECK_THAT(r.out, ContainsSubstring("1,\"{1,3}\",1,0\n"));
  CHECK_THAT(r.out, ContainsSubstring("4,\"{1,3}\",1,0\n"));
  CHECK_THAT(r.out, ContainsSubstring("# limit_class={1,3}"));
  CHECK_THAT(r.out, ContainsSubstring("# A*={1,2,3}"));
}

TEST_CASE("cli limit, profiles and audit") {
  auto lim = run("limit " + kData + "/paper_ex1.json --density A12");
  REQUIRE(lim.status == 0);
  CHECK(io::json::parse(lim.out)["limit_equals_expectation"] == true);

  auto prof = run("mixing-profile " + kData + "/paper_ex1.json --set A1 --n-max 2");
  REQUIRE(prof.status == 0);
  CHECK_THAT(prof.out, ContainsSubstring("# section=uniform"));
  CHECK_THAT(prof.out, ContainsSubstring("n,defect\n0,1/4\n"));

  auto dy = run("dyadic --set \"0,1/4\" --n-max 3");
  REQUIRE(dy.status == 0);
  CHECK_THAT(dy.out, ContainsSubstring("n,defect\n0,3/16\n1,1/8\n2,0\n3,0\n"));

  auto ul = run("ulam --map doubling --bins 64 --n-max 8");
  REQUIRE(ul.status == 0);
  CHECK_THAT(ul.out, ContainsSubstring("# verdict=exact-like"));

  auto au = run("audit --theorem all --count 25 --seed 42 --jobs 2");
  REQUIRE(au.status == 0);
  auto j = io::json::parse(au.out);
  CHECK(j["failures"].empty());
  CHECK(j["seed"] == 42);
  CHECK(j["count"] == 25);
}

TEST_CASE("cli exit codes") {
  CHECK(run("classify").status == 2);
  CHECK(run("classify " + kData + "/paper_ex1.json --bogus").status == 2);
  CHECK(run("ulam --map spiral").status == 2);
  auto missing = run("classify " + kData + "/does_not_exist.json");
  CHECK(missing.status == 1);
  CHECK(io::json::parse(missing.out)["error"]["type"] == "ParseError");
  auto noset = run("orbit " + kData + "/paper_ex1.json --set Nope");
  CHECK(noset.status == 1);
  auto bins = run("ulam --map doubling --bins 1");
  CHECK(bins.status == 1);
}
