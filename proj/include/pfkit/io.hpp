#pragma once

/**
 * @file io.hpp
 * @brief JSON system files, JSON reports and CSV tables.
 *
 * System file:
 *
 *     {
 *       "atoms": [{"label": "1", "mass": "1/2"}, ...],
 *       "map": ["1", "3", "3"],                 // target label of each atom, in order
 *       "named_sets": {"A12": ["1", "2"]},
 *       "densities": {"f": {"1": "1", "3": "-1/2"}}   // optional, missing labels are 0
 *     }
 *
 * Rationals are always "p/q" strings. Numeric report values are wrapped as
 * {"value": ..., "provenance": "exact" | "float"}.
 */

#include "pfkit/audit.hpp"
#include "pfkit/errors.hpp"
#include "pfkit/finite_dynamics.hpp"
#include "pfkit/transfer_operators.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace pfkit::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

struct SystemDescription {
  MeasurePreservingMap map;
  std::map<std::string, MeasurableSet> named_sets;
  std::map<std::string, Density> densities;

  [[nodiscard]] const FiniteProbabilitySpace& space() const { return map.space(); }
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

inline std::string string_of(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

inline Rational rational_of(const json& v, const std::string& where) {
  auto s = string_of(v, where);
  try {
    return Rational::parse(s);
  } catch (const std::exception&) {
    throw ParseError(where + ": '" + s + "' is not a rational \"p/q\"");
  }
}

inline std::size_t atom_of(const FiniteProbabilitySpace& space, const json& v, const std::string& where) {
  auto label = string_of(v, where);
  auto idx = space.index_of(label);
  if (!idx) throw ParseError(where + ": unknown label '" + label + "'");
  return *idx;
}

} // namespace detail

/// Parses and validates a system file body. `source` prefixes messages.
inline SystemDescription parse_system_text(const std::string& text, const std::string& source = "<input>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                     e.what() + ")");
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");

  const auto& atoms = detail::field(doc, "atoms", source);
  if (!atoms.is_array() || atoms.empty()) throw ParseError(source + ": 'atoms' must be a nonempty array");
  std::vector<std::string> labels;
  std::vector<Rational> masses;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto where = source + ": atoms[" + std::to_string(i) + "]";
    labels.push_back(detail::string_of(detail::field(atoms[i], "label", where), where + ".label"));
    masses.push_back(detail::rational_of(detail::field(atoms[i], "mass", where), where + ".mass"));
  }
  FiniteProbabilitySpace space(std::move(labels), std::move(masses));

  const auto& map = detail::field(doc, "map", source);
  if (!map.is_array()) throw ParseError(source + ": 'map' must be an array of labels");
  if (map.size() != space.atom_count())
    throw ParseError(source + ": 'map' has " + std::to_string(map.size()) + " entries for " +
                     std::to_string(space.atom_count()) + " atoms");
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < map.size(); ++i)
    targets.push_back(detail::atom_of(space, map[i], source + ": map[" + std::to_string(i) + "]"));

  SystemDescription out{check_measure_preserving(space, targets), {}, {}};

  if (doc.contains("named_sets")) {
    const auto& sets = doc.at("named_sets");
    if (!sets.is_object()) throw ParseError(source + ": 'named_sets' must be an object");
    for (const auto& [name, members] : sets.items()) {
      auto where = source + ": named_sets." + name;
      if (!members.is_array()) throw ParseError(where + ": expected an array of labels");
      std::vector<std::size_t> idx;
      for (const auto& m : members) idx.push_back(detail::atom_of(space, m, where));
      out.named_sets.emplace(name, space.make_set(idx));
    }
  }
  if (doc.contains("densities")) {
    const auto& dens = doc.at("densities");
    if (!dens.is_object()) throw ParseError(source + ": 'densities' must be an object");
    for (const auto& [name, values] : dens.items()) {
      auto where = source + ": densities." + name;
      if (!values.is_object()) throw ParseError(where + ": expected an object label -> \"p/q\"");
      Density f{std::vector<Rational>(space.positive_count())};
      for (const auto& [label, v] : values.items()) {
        auto idx = space.index_of(label);
        if (!idx) throw ParseError(where + ": unknown label '" + label + "'");
        auto value = detail::rational_of(v, where + "." + label);
        if (!space.is_null_atom(*idx)) f.values[space.positive_index(*idx)] = value;
      }
      out.densities.emplace(name, std::move(f));
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SystemDescription parse_system(const std::string& path) { return parse_system_text(read_file(path), path); }

inline json emit_system_json(const SystemDescription& d) {
  const auto& space = d.space();
  json atoms = json::array();
  json map = json::array();
  for (std::size_t i = 0; i < space.atom_count(); ++i) {
    atoms.push_back({{"label", space.label(i)}, {"mass", space.mass(i).str()}});
    map.push_back(space.label(d.map(i)));
  }
  json doc{{"atoms", atoms}, {"map", map}};
  if (!d.named_sets.empty()) {
    json sets = json::object();
    for (const auto& [name, s] : d.named_sets) {
      json members = json::array();
      s.bits().for_each([&](std::size_t i) { members.push_back(space.label(i)); });
      sets[name] = members;
    }
    doc["named_sets"] = sets;
  }
  if (!d.densities.empty()) {
    json dens = json::object();
    for (const auto& [name, f] : d.densities) {
      json values = json::object();
      for (std::size_t k = 0; k < f.size(); ++k) values[space.label(space.positive_atoms()[k])] = f.values[k].str();
      dens[name] = values;
    }
    doc["densities"] = dens;
  }
  return doc;
}

inline std::string emit_system(const SystemDescription& d) { return emit_system_json(d).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Report values

inline json exact(const Rational& r) { return {{"value", r.str()}, {"provenance", "exact"}}; }
inline json floating(double v) { return {{"value", v}, {"provenance", "float"}}; }

inline std::string set_string(const FiniteProbabilitySpace& space, const AtomSet& bits) {
  std::string s = "{";
  bool first = true;
  bits.for_each([&](std::size_t i) {
    if (!first) s += ",";
    s += space.label(i);
    first = false;
  });
  return s + "}";
}

inline json labels_json(const FiniteProbabilitySpace& space, const AtomSet& bits) {
  json out = json::array();
  bits.for_each([&](std::size_t i) { out.push_back(space.label(i)); });
  return out;
}

inline json blocks_json(const FiniteProbabilitySpace& space, const SigmaSubAlgebra& s) {
  json out = json::array();
  for (std::size_t b = 0; b < s.block_count(); ++b) out.push_back(labels_json(space, s.block_bits(b)));
  return out;
}

/// Density as {label: exact value} over the positive atoms.
inline json density_json(const FiniteProbabilitySpace& space, const Density& f) {
  json out = json::object();
  for (std::size_t k = 0; k < f.size(); ++k) out[space.label(space.positive_atoms()[k])] = exact(f.values[k]);
  return out;
}

/// Quotes a CSV field when it contains a comma or a quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// "n,defect" table.
inline void write_defect_csv(std::ostream& os, const std::vector<Rational>& values) {
  os << "n,defect\n";
  for (std::size_t n = 0; n < values.size(); ++n) os << n << ',' << values[n] << '\n';
}

inline void write_defect_csv(std::ostream& os, const std::vector<double>& values) {
  auto old = os.precision(17);
  os << "n,defect\n";
  for (std::size_t n = 0; n < values.size(); ++n) os << n << ',' << values[n] << '\n';
  os.precision(old);
}

/// "n,set,measure,d_to_limit" rows for n = 0..rows-1; d_to_limit is "none"
/// when the orbit has no limit in the measure algebra.
inline void write_orbit_csv(std::ostream& os, const FiniteProbabilitySpace& space, const OrbitReport& orbit,
                            std::size_t rows) {
  os << "n,set,measure,d_to_limit\n";
  std::optional<MeasurableSet> limit;
  if (orbit.limit_class) limit = orbit.limit_class->representative();
  for (std::size_t n = 0; n < rows; ++n) {
    const auto& s = orbit.at(n);
    os << n << ',' << csv_field(set_string(space, s.bits())) << ',' << measure(space, s) << ','
       << (limit ? algebra_distance(space, s, *limit).str() : std::string("none")) << '\n';
  }
}

inline json audit_report_json(const AuditReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"seed", f.seed}, {"theorem_id", f.theorem_id}, {"route_values", f.route_values}});
  return {{"schema_version", kSchemaVersion},
          {"theorem", r.theorem},
          {"seed", r.seed},
          {"count", r.count},
          {"systems_tested", r.systems_tested},
          {"failures", failures},
          {"elapsed_ms", r.elapsed_ms}};
}

/// Error object printed on validation failures.
inline json error_json(const std::string& type, const std::string& message) {
  return {{"schema_version", kSchemaVersion}, {"error", {{"type", type}, {"message", message}}}};
}

} // namespace pfkit::io
