#pragma once

// Scenario files (JSON, schema_version 1; see docs/scenario-format.md) and the
// built-in fixture library.

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flowcomp/completion.hpp"
#include "flowcomp/separability.hpp"

namespace flowcomp {

inline constexpr int kScenarioSchemaVersion = 1;

/// An expected result shipped with a scenario. `basis` records how the
/// expectation was obtained: "worked-example", "closed-form" or "direct".
struct Fixture {
  std::string kind;
  std::string basis;
  nlohmann::json data;
};

struct ScenarioConfig {
  CompletionConfig completion;
  SeparabilityConfig separability;
  TagGrid tags;
  BoxGrid base_grid;
  double horizon = 10.0;
};

struct Scenario {
  std::string name;
  std::string description;
  VectorFieldSpec field;
  std::vector<MorphismSpec> morphisms;
  std::vector<Fixture> fixtures;
  ScenarioConfig config;

  const MorphismSpec& morphism(std::string_view which) const {
    for (const auto& m : morphisms) {
      if (m.name == which) return m;
    }
    throw Error("scenario '" + name + "' has no morphism named '" + std::string(which) + "'");
  }

  std::vector<const Fixture*> fixtures_of(std::string_view kind) const {
    std::vector<const Fixture*> out;
    for (const auto& f : fixtures) {
      if (f.kind == kind) out.push_back(&f);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Point literals

/// Parses "1,0.5" (also accepts surrounding parentheses).
inline Point parse_point(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '(' || c == ')'; }), s.end());
  Point out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    double v = 0.0;
    const char* first = s.data() + pos;
    const char* last = s.data() + comma;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
      throw Error("malformed point literal '" + std::string(text) + "'");
    }
    out.push_back(v);
    pos = comma + 1;
    if (comma == s.size()) break;
  }
  return out;
}

/// Parses a tagged point "s:x1,...,xn".
inline TaggedPoint parse_tagged_point(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error("malformed tagged point '" + std::string(text) + "', expected s:x1,...,xn");
  }
  const Point s = parse_point(text.substr(0, colon));
  if (s.size() != 1) throw Error("malformed tag in '" + std::string(text) + "'");
  return TaggedPoint{s[0], parse_point(text.substr(colon + 1))};
}

inline std::string format_tagged_point(const TaggedPoint& p) {
  std::string out = detail::format_number(p.s) + ":";
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (i) out += ",";
    out += detail::format_number(p.x[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline const json& require(const json& obj, const std::string& base, const std::string& key) {
  if (!obj.is_object()) throw SchemaError(base.empty() ? "<root>" : base, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join_path(base, key), "missing required key");
  return *it;
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> get_strings(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Point get_point(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
  Point out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T>
T with_path(const std::string& path, auto&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw SchemaError(path, e.what());
  }
}

inline ManifoldSpec load_manifold(const json& j, const std::string& base) {
  const std::string path = join_path(base, "manifold");
  const json& m = require(j, base, "manifold");
  const int n = get_int(require(m, path, "dimension"), path + ".dimension");
  if (n <= 0) throw SchemaError(path + ".dimension", "must be positive");
  ManifoldSpec out;
  out.dimension = n;
  const std::string inside = get_string(require(m, path, "inside"), path + ".inside");
  out.inside = with_path<Predicate>(path + ".inside", [&] { return Predicate::parse(inside, ParseOptions{n, false}); });
  if (auto it = m.find("margin"); it != m.end() && !it->is_null()) {
    const std::string src = get_string(*it, path + ".margin");
    out.margin = with_path<Expression>(path + ".margin", [&] { return Expression::parse(src, ParseOptions{n, false}); });
  }
  return out;
}

inline VectorFieldSpec load_field(const json& j, const std::string& base) {
  VectorFieldSpec v;
  v.manifold = load_manifold(j, base);
  const int n = v.manifold.dimension;
  const std::string fpath = join_path(base, "field");
  const json& f = require(j, base, "field");
  const auto rhs = get_strings(require(f, fpath, "rhs"), fpath + ".rhs");
  if (static_cast<int>(rhs.size()) != n) {
    throw SchemaError(fpath + ".rhs", "expected " + std::to_string(n) + " components, got " + std::to_string(rhs.size()));
  }
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const std::string p = fpath + ".rhs[" + std::to_string(i) + "]";
    v.rhs.push_back(with_path<Expression>(p, [&] { return Expression::parse(rhs[i], ParseOptions{n, false}); }));
  }
  if (auto it = j.find("oracle"); it != j.end() && !it->is_null()) {
    const std::string opath = join_path(base, "oracle");
    const auto flow = get_strings(require(*it, opath, "flow"), opath + ".flow");
    if (static_cast<int>(flow.size()) != n) throw SchemaError(opath + ".flow", "expected " + std::to_string(n) + " components");
    std::vector<Expression> exprs;
    for (std::size_t i = 0; i < flow.size(); ++i) {
      const std::string p = opath + ".flow[" + std::to_string(i) + "]";
      exprs.push_back(with_path<Expression>(p, [&] { return Expression::parse(flow[i], ParseOptions{n, true}); }));
    }
    v.oracle_flow = std::move(exprs);
  }
  return v;
}

inline BoxGrid default_grid(int n) {
  BoxGrid g;
  const int count = n <= 2 ? 41 : (n == 3 ? 9 : 5);
  g.lo.assign(static_cast<std::size_t>(n), -2.0);
  g.hi.assign(static_cast<std::size_t>(n), 2.0);
  g.count.assign(static_cast<std::size_t>(n), count);
  return g;
}

inline void load_integrator(const json& j, const std::string& path, IntegratorConfig& c) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = path + "." + it.key();
    if (it.key() == "rel_tol") c.rel_tol = get_number(*it, p);
    else if (it.key() == "abs_tol") c.abs_tol = get_number(*it, p);
    else if (it.key() == "max_step") c.max_step = get_number(*it, p);
    else if (it.key() == "min_step") c.min_step = get_number(*it, p);
    else if (it.key() == "blowup_norm") c.blowup_norm = get_number(*it, p);
    else if (it.key() == "escape_refine_tol") c.escape_refine_tol = get_number(*it, p);
    else if (it.key() == "max_steps") c.max_steps = static_cast<std::size_t>(get_int(*it, p));
    else throw SchemaError(p, "unknown key");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

inline ScenarioConfig load_config(const json* j, int n) {
  ScenarioConfig c;
  c.base_grid = default_grid(n);
  if (j == nullptr || j->is_null()) return c;
  const std::string path = "config";
  if (!j->is_object()) throw SchemaError(path, "expected an object");
  for (auto it = j->begin(); it != j->end(); ++it) {
    const std::string p = path + "." + it.key();
    const std::string& k = it.key();
    if (k == "integrator") {
      load_integrator(*it, p, c.completion.integrator);
    } else if (k == "match_tol") {
      c.completion.match_tol = get_number(*it, p);
    } else if (k == "orbit_horizon") {
      c.completion.orbit_horizon = get_number(*it, p);
    } else if (k == "horizon") {
      c.horizon = get_number(*it, p);
    } else if (k == "tags") {
      c.tags.min = get_number(require(*it, p, "min"), p + ".min");
      c.tags.max = get_number(require(*it, p, "max"), p + ".max");
      c.tags.step = get_number(require(*it, p, "step"), p + ".step");
      if (!(c.tags.step > 0.0) || c.tags.max < c.tags.min) throw SchemaError(p, "need step > 0 and max >= min");
    } else if (k == "base_grid") {
      c.base_grid.lo = get_point(require(*it, p, "lo"), p + ".lo");
      c.base_grid.hi = get_point(require(*it, p, "hi"), p + ".hi");
      c.base_grid.count.clear();
      const json& cnt = require(*it, p, "count");
      if (!cnt.is_array()) throw SchemaError(p + ".count", "expected an array of integers");
      for (std::size_t i = 0; i < cnt.size(); ++i) {
        const int v = get_int(cnt[i], p + ".count[" + std::to_string(i) + "]");
        if (v < 1) throw SchemaError(p + ".count", "counts must be >= 1");
        c.base_grid.count.push_back(v);
      }
      if (c.base_grid.lo.size() != static_cast<std::size_t>(n) || c.base_grid.hi.size() != static_cast<std::size_t>(n) ||
          c.base_grid.count.size() != static_cast<std::size_t>(n)) {
        throw SchemaError(p, "lo, hi and count must each have one entry per dimension");
      }
    } else if (k == "separability") {
      auto& s = c.separability;
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        const std::string q = p + "." + jt.key();
        if (jt.key() == "radii") s.radii = get_point(*jt, q);
        else if (jt.key() == "directions") s.directions = get_int(*jt, q);
        else if (jt.key() == "merge_tol") s.merge_tol = get_number(*jt, q);
        else if (jt.key() == "refine_evals") s.refine_evals = get_int(*jt, q);
        else if (jt.key() == "escape_gap") s.escape_gap = get_number(*jt, q);
        else throw SchemaError(q, "unknown key");
      }
      if (s.radii.empty()) throw SchemaError(p + ".radii", "must not be empty");
    } else {
      throw SchemaError(p, "unknown key");
    }
  }
  return c;
}

}  // namespace detail

/// Parses and validates a scenario document. Errors name the offending field path.
inline Scenario parse_scenario(const nlohmann::json& doc) {
  using detail::require;
  Scenario sc;
  if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
  const int version = detail::get_int(require(doc, "", "schema_version"), "schema_version");
  if (version != kScenarioSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(version));
  }
  sc.name = detail::get_string(require(doc, "", "name"), "name");
  if (auto it = doc.find("description"); it != doc.end()) sc.description = detail::get_string(*it, "description");
  sc.field = detail::load_field(doc, "");
  const int n = sc.field.dimension();
  const auto cfg_it = doc.find("config");
  sc.config = detail::load_config(cfg_it == doc.end() ? nullptr : &*cfg_it, n);

  if (auto bad = find_rhs_failure(sc.field, sc.config.base_grid)) {
    throw SchemaError("field.rhs", "fails to evaluate at " + format_point(*bad) + " inside M");
  }

  if (auto it = doc.find("morphisms"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("morphisms", "expected an array");
    std::vector<Point> probe_points;
    for (std::size_t k = 0; k < sc.config.base_grid.size(); k += 7) probe_points.push_back(sc.config.base_grid.node(k));
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string base = "morphisms[" + std::to_string(i) + "]";
      const auto& mj = (*it)[i];
      MorphismSpec m;
      m.name = detail::get_string(require(mj, base, "name"), base + ".name");
      m.target = detail::load_field(require(mj, base, "target"), base + ".target");
      const auto map = detail::get_strings(require(mj, base, "map"), base + ".map");
      if (static_cast<int>(map.size()) != m.target.dimension()) {
        throw SchemaError(base + ".map", "expected one component per target dimension");
      }
      for (std::size_t k = 0; k < map.size(); ++k) {
        const std::string p = base + ".map[" + std::to_string(k) + "]";
        m.map.push_back(detail::with_path<Expression>(p, [&] { return Expression::parse(map[k], ParseOptions{n, false}); }));
      }
      if (auto c = mj.find("claimed_equivariant"); c != mj.end()) {
        if (!c->is_boolean()) throw SchemaError(base + ".claimed_equivariant", "expected a boolean");
        m.claimed_equivariant = c->get<bool>();
      }
      if (m.claimed_equivariant) {
        const double r = equivariance_residual(m, sc.field, probe_points);
        if (r > 1e-4) {
          throw SchemaError(base + ".map", "not equivariant: residual " + detail::format_number(r) + " exceeds 1e-4");
        }
      }
      sc.morphisms.push_back(std::move(m));
    }
  }

  if (auto it = doc.find("fixtures"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("fixtures", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string base = "fixtures[" + std::to_string(i) + "]";
      const auto& fj = (*it)[i];
      Fixture f;
      f.kind = detail::get_string(require(fj, base, "kind"), base + ".kind");
      f.basis = detail::get_string(require(fj, base, "basis"), base + ".basis");
      if (f.basis != "worked-example" && f.basis != "closed-form" && f.basis != "direct") {
        throw SchemaError(base + ".basis", "must be worked-example, closed-form or direct");
      }
      f.data = fj;
      f.data.erase("kind");
      f.data.erase("basis");
      sc.fixtures.push_back(std::move(f));
    }
  }
  return sc;
}

inline Scenario parse_scenario_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------
// Saving

namespace detail {

inline nlohmann::json save_field(const VectorFieldSpec& v) {
  nlohmann::json j;
  j["manifold"]["dimension"] = v.dimension();
  j["manifold"]["inside"] = v.manifold.inside.to_string();
  if (v.manifold.margin) j["manifold"]["margin"] = v.manifold.margin->to_string();
  for (const auto& e : v.rhs) j["field"]["rhs"].push_back(e.to_string());
  if (v.oracle_flow) {
    for (const auto& e : *v.oracle_flow) j["oracle"]["flow"].push_back(e.to_string());
  }
  return j;
}

}  // namespace detail

inline nlohmann::json save_scenario(const Scenario& sc) {
  nlohmann::json j = detail::save_field(sc.field);
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  for (const auto& m : sc.morphisms) {
    nlohmann::json mj;
    mj["name"] = m.name;
    mj["target"] = detail::save_field(m.target);
    for (const auto& e : m.map) mj["map"].push_back(e.to_string());
    mj["claimed_equivariant"] = m.claimed_equivariant;
    j["morphisms"].push_back(std::move(mj));
  }
  for (const auto& f : sc.fixtures) {
    nlohmann::json fj = f.data;
    fj["kind"] = f.kind;
    fj["basis"] = f.basis;
    j["fixtures"].push_back(std::move(fj));
  }
  const auto& c = sc.config;
  auto& cj = j["config"];
  const auto& ic = c.completion.integrator;
  cj["integrator"] = {{"rel_tol", ic.rel_tol},         {"abs_tol", ic.abs_tol},
                      {"max_step", ic.max_step},       {"min_step", ic.min_step},
                      {"blowup_norm", ic.blowup_norm}, {"escape_refine_tol", ic.escape_refine_tol},
                      {"max_steps", ic.max_steps}};
  cj["match_tol"] = c.completion.match_tol;
  cj["orbit_horizon"] = c.completion.orbit_horizon;
  cj["horizon"] = c.horizon;
  cj["tags"] = {{"min", c.tags.min}, {"max", c.tags.max}, {"step", c.tags.step}};
  cj["base_grid"] = {{"lo", c.base_grid.lo}, {"hi", c.base_grid.hi}, {"count", c.base_grid.count}};
  const auto& s = c.separability;
  cj["separability"] = {{"radii", s.radii},
                        {"directions", s.directions},
                        {"merge_tol", s.merge_tol},
                        {"refine_evals", s.refine_evals},
                        {"escape_gap", s.escape_gap}};
  return j;
}

// ---------------------------------------------------------------------------
// Built-ins

namespace detail {

inline constexpr std::string_view kExample2 = R"json({
  "schema_version": 1,
  "name": "example2",
  "description": "The punctured plane with the unit horizontal field; its completion doubles the x1-axis.",
  "manifold": {"dimension": 2, "inside": "x1^2 + x2^2 > 0", "margin": "sqrt(x1^2 + x2^2)"},
  "field": {"rhs": ["1", "0"]},
  "oracle": {"flow": ["x1 + t", "x2"]},
  "morphisms": [
    {"name": "inclusion", "map": ["x1", "x2"],
     "target": {"manifold": {"dimension": 2, "inside": "true"}, "field": {"rhs": ["1", "0"]},
                "oracle": {"flow": ["x1 + t", "x2"]}}},
    {"name": "projection", "map": ["x1"],
     "target": {"manifold": {"dimension": 1, "inside": "true"}, "field": {"rhs": ["1"]},
                "oracle": {"flow": ["x1 + t"]}}}
  ],
  "fixtures": [
    {"kind": "contains", "basis": "worked-example", "x": [0, 0], "expected": false},
    {"kind": "contains", "basis": "direct", "x": [1, 0], "expected": true},
    {"kind": "field", "basis": "worked-example", "x": [3, 4], "expected": [1, 0]},
    {"kind": "flow", "basis": "closed-form", "x0": [-1, 0.5], "t": 2, "status": "Completed", "endpoint": [1, 0.5], "tol": 1e-8},
    {"kind": "flow", "basis": "closed-form", "x0": [-1, 0], "t": 2, "status": "Escaped", "escape_time": 1.0, "tol": 1e-8},
    {"kind": "window", "basis": "closed-form", "x0": [-1, 0], "horizon": 10, "t_minus": null, "t_plus": 1.0, "tol": 1e-8},
    {"kind": "window", "basis": "closed-form", "x0": [-1, 0.5], "horizon": 10, "t_minus": null, "t_plus": null},
    {"kind": "same_point", "basis": "closed-form", "p": "0:1,0.5", "q": "2:3,0.5", "expected": true},
    {"kind": "same_point", "basis": "closed-form", "p": "-2:-1,0", "q": "0:1,0", "expected": false},
    {"kind": "separability", "basis": "worked-example", "p": "-2:-1,0", "q": "0:1,0", "expected": "NonSeparable"},
    {"kind": "lift", "basis": "closed-form", "morphism": "inclusion", "p": "0:1,0", "expected": [1, 0]},
    {"kind": "lift", "basis": "closed-form", "morphism": "inclusion", "p": "-2:-1,0", "expected": [1, 0]},
    {"kind": "nonseparable_pairs", "basis": "worked-example", "times": [1, 5, -3],
     "pairs": [["-2:-1,0", "0:1,0"], ["-3:-1,0", "0:2,0"], ["-1.5:-1,0", "0:0.5,0"], ["-1:-0.5,0", "0:0.5,0"],
               ["-4:-2,0", "0:2,0"], ["-0.5:-0.25,0", "0:0.25,0"], ["-3:-1.5,0", "1:2.5,0"], ["-2.5:-2,0", "0.5:1,0"],
               ["-1:-1,0", "1:1,0"], ["-5:-0.5,0", "0:4.5,0"]]},
    {"kind": "report", "basis": "worked-example", "doubled_nonseparable": [{"axis": 2, "value": 0}],
     "doubled_separated": [], "diagnostic": "locally_manifold", "sheet_counts": [1, 1]}
  ],
  "config": {"tags": {"min": -3, "max": 3, "step": 1},
             "base_grid": {"lo": [-2, -2], "hi": [2, 2], "count": [41, 41]}}
})json";

inline constexpr std::string_view kExample3 = R"json({
  "schema_version": 1,
  "name": "example3",
  "description": "The plane minus the segment {0} x [-1, 1] with the unit horizontal field; its completion doubles the strip |x2| < 1 and branches along |x2| = 1.",
  "manifold": {"dimension": 2, "inside": "x1 != 0 or abs(x2) > 1", "margin": "sqrt(x1^2 + max(abs(x2) - 1, 0)^2)"},
  "field": {"rhs": ["1", "0"]},
  "oracle": {"flow": ["x1 + t", "x2"]},
  "morphisms": [
    {"name": "inclusion", "map": ["x1", "x2"],
     "target": {"manifold": {"dimension": 2, "inside": "true"}, "field": {"rhs": ["1", "0"]},
                "oracle": {"flow": ["x1 + t", "x2"]}}}
  ],
  "fixtures": [
    {"kind": "contains", "basis": "worked-example", "x": [0, 1.5], "expected": true},
    {"kind": "contains", "basis": "worked-example", "x": [0, 0.5], "expected": false},
    {"kind": "flow", "basis": "closed-form", "x0": [-1, 0.5], "t": 2, "status": "Escaped", "escape_time": 1.0, "tol": 1e-8},
    {"kind": "separability", "basis": "worked-example", "p": "-2:-1,0.5", "q": "0:1,0.5", "expected": "Separated"},
    {"kind": "separability", "basis": "worked-example", "p": "-2:-1,1", "q": "0:1,1", "expected": "NonSeparable"},
    {"kind": "separability", "basis": "worked-example", "p": "-2:-1,-1", "q": "0:1,-1", "expected": "NonSeparable"},
    {"kind": "nonseparable_pairs", "basis": "worked-example", "times": [2, -1, 4],
     "pairs": [["-2:-1,1", "0:1,1"], ["-2:-1,-1", "0:1,-1"], ["-1:-0.5,1", "0:0.5,1"], ["-1:-0.5,-1", "0:0.5,-1"],
               ["-3:-1,1", "0:2,1"], ["-3:-2,-1", "0:1,-1"], ["-0.5:-0.25,1", "0:0.25,1"], ["-4:-2,-1", "0:2,-1"],
               ["-1:-1,1", "1:1,1"], ["0:-1.5,-1", "2:0.5,-1"]]},
    {"kind": "report", "basis": "worked-example", "doubled_nonseparable": [{"axis": 2, "value": 1}, {"axis": 2, "value": -1}],
     "doubled_separated": [{"axis": 2, "open_below": 1, "open_above": -1}], "diagnostic": "branching_detected",
     "sheet_counts": [1, 2]}
  ],
  "config": {"tags": {"min": -3, "max": 3, "step": 1},
             "base_grid": {"lo": [-2, -2], "hi": [2, 2], "count": [41, 41]}}
})json";

inline constexpr std::string_view kBlowup1d = R"json({
  "schema_version": 1,
  "name": "blowup1d",
  "description": "x' = x^2 on the line; trajectories from x > 0 leave every compact set at t = 1/x.",
  "manifold": {"dimension": 1, "inside": "true"},
  "field": {"rhs": ["x1^2"]},
  "oracle": {"flow": ["x1 / (1 - t * x1)"]},
  "morphisms": [
    {"name": "identity", "map": ["x1"],
     "target": {"manifold": {"dimension": 1, "inside": "true"}, "field": {"rhs": ["x1^2"]},
                "oracle": {"flow": ["x1 / (1 - t * x1)"]}}}
  ],
  "fixtures": [
    {"kind": "field", "basis": "direct", "x": [2], "expected": [4]},
    {"kind": "flow", "basis": "closed-form", "x0": [1], "t": 2, "status": "Escaped", "escape_time": 1.0, "tol": 1e-6},
    {"kind": "lift_incomplete", "basis": "direct", "morphism": "identity", "p": "-2:1"}
  ],
  "config": {"tags": {"min": -1, "max": 1, "step": 1},
             "base_grid": {"lo": [-2], "hi": [2], "count": [41]}}
})json";

inline constexpr std::string_view kRotation2d = R"json({
  "schema_version": 1,
  "name": "rotation2d",
  "description": "Rigid rotation of the plane; a complete field, so the completion is the plane itself.",
  "manifold": {"dimension": 2, "inside": "true"},
  "field": {"rhs": ["-x2", "x1"]},
  "oracle": {"flow": ["x1 * cos(t) - x2 * sin(t)", "x1 * sin(t) + x2 * cos(t)"]},
  "fixtures": [
    {"kind": "field", "basis": "direct", "x": [1, 0], "expected": [0, 1]},
    {"kind": "flow", "basis": "closed-form", "x0": [1, 0], "t": 6.283185307179586, "status": "Completed", "endpoint": [1, 0], "tol": 1e-6},
    {"kind": "window", "basis": "direct", "x0": [1, 0], "horizon": 10, "t_minus": null, "t_plus": null},
    {"kind": "report", "basis": "direct", "doubled_nonseparable": [], "doubled_separated": [], "diagnostic": "locally_manifold"}
  ],
  "config": {"tags": {"min": -3, "max": 3, "step": 1},
             "base_grid": {"lo": [-2, -2], "hi": [2, 2], "count": [41, 41]}}
})json";

inline constexpr std::string_view kLinear1d = R"json({
  "schema_version": 1,
  "name": "linear1d",
  "description": "x' = x on the line; complete, with flow e^t x.",
  "manifold": {"dimension": 1, "inside": "true"},
  "field": {"rhs": ["x1"]},
  "oracle": {"flow": ["exp(t) * x1"]},
  "fixtures": [
    {"kind": "flow", "basis": "closed-form", "x0": [1], "t": 1, "status": "Completed", "endpoint": [2.718281828459045], "tol": 1e-8}
  ],
  "config": {"tags": {"min": -3, "max": 3, "step": 1},
             "base_grid": {"lo": [-2], "hi": [2], "count": [41]}}
})json";

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kBuiltins{{
    {"example2", kExample2},
    {"example3", kExample3},
    {"blowup1d", kBlowup1d},
    {"rotation2d", kRotation2d},
    {"linear1d", kLinear1d},
}};

}  // namespace detail

inline std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : detail::kBuiltins) out.emplace_back(name);
  return out;
}

inline Scenario builtin(std::string_view name) {
  for (const auto& [n, text] : detail::kBuiltins) {
    if (n == name) return parse_scenario_text(text);
  }
  throw Error("unknown built-in scenario '" + std::string(name) + "'");
}

/// A built-in name or a path to a scenario file.
inline Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& [n, _] : detail::kBuiltins) {
    if (n == name_or_path) return builtin(name_or_path);
  }
  return load_scenario(name_or_path);
}

}  // namespace flowcomp
