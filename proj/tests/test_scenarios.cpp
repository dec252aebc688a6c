#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "flowcomp/flowcomp.hpp"
#include "test_support.hpp"

using namespace flowcomp;
using nlohmann::json;

namespace {

std::string schema_error_path(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

json minimal() {
  return json::parse(R"({
    "schema_version": 1, "name": "m",
    "manifold": {"dimension": 2, "inside": "x1 > 0"},
    "field": {"rhs": ["1", "x1"]}
  })");
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("flowcomp_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Builtin, Example2) {
  const auto sc = builtin("example2");
  EXPECT_EQ(sc.field.dimension(), 2);
  ASSERT_EQ(sc.field.rhs.size(), 2u);
  EXPECT_EQ(sc.field.rhs[0].to_string(), "1");
  EXPECT_EQ(sc.field.rhs[1].to_string(), "0");
  EXPECT_TRUE(sc.field.manifold.inside == parse_predicate("x1^2 + x2^2 > 0"));
  EXPECT_TRUE(sc.field.oracle_flow.has_value());
  EXPECT_NO_THROW(sc.morphism("inclusion"));
  EXPECT_THROW(sc.morphism("nope"), Error);
}

TEST(Builtin, Example3ExcludesSegment) {
  const auto m = builtin("example3").field.manifold;
  for (double y : {-1.0, -0.5, 0.0, 0.99, 1.0}) EXPECT_FALSE(m.contains(std::vector<double>{0, y})) << y;
  for (double y : {-1.01, 1.01, 3.0}) EXPECT_TRUE(m.contains(std::vector<double>{0, y})) << y;
  EXPECT_TRUE(m.contains(std::vector<double>{-1e-12, 0}));
}

TEST(Builtin, ReferenceFields) {
  const auto b = builtin("blowup1d");
  EXPECT_EQ(b.field.dimension(), 1);
  EXPECT_EQ(b.field.rhs[0].to_string(), "x1^2");
  EXPECT_DOUBLE_EQ(b.field.oracle(std::vector<double>{2}, 0.25)[0], 4.0);  // 2/(1 - 0.5)

  const auto r = builtin("rotation2d");
  const Point y = r.field.oracle(std::vector<double>{1, 0}, std::numbers::pi / 2);
  EXPECT_NEAR(y[0], 0.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);

  const auto l = builtin("linear1d");
  EXPECT_DOUBLE_EQ(l.field.oracle(std::vector<double>{2}, 1.0)[0], 2 * std::numbers::e);
}

TEST(Builtin, Names) {
  const auto names = builtin_names();
  EXPECT_EQ(names, (std::vector<std::string>{"example2", "example3", "blowup1d", "rotation2d", "linear1d"}));
  EXPECT_THROW(builtin("example4"), Error);
}

TEST(Builtin, FixtureBasisIsRecorded) {
  for (const auto& name : builtin_names()) {
    for (const auto& f : builtin(name).fixtures) {
      EXPECT_TRUE(f.basis == "worked-example" || f.basis == "closed-form" || f.basis == "direct");
      EXPECT_FALSE(f.data.contains("kind"));
    }
  }
}

TEST(Schema, MissingRhsNamesField) {
  json doc = minimal();
  doc["field"].erase("rhs");
  EXPECT_EQ(schema_error_path(doc), "field.rhs");
}

TEST(Schema, Violations) {
  {
    json d = minimal();
    d["field"]["rhs"] = {"1"};
    EXPECT_EQ(schema_error_path(d), "field.rhs");
  }
  {
    json d = minimal();
    d["manifold"]["inside"] = "x1 == 0";
    EXPECT_EQ(schema_error_path(d), "manifold.inside");
  }
  {
    json d = minimal();
    d["manifold"]["dimension"] = 0;
    EXPECT_EQ(schema_error_path(d), "manifold.dimension");
  }
  {
    json d = minimal();
    d["field"]["rhs"][1] = "x3";
    EXPECT_EQ(schema_error_path(d), "field.rhs[1]");
  }
  {
    json d = minimal();
    d["field"]["rhs"][1] = "t";  // the field is autonomous
    EXPECT_EQ(schema_error_path(d), "field.rhs[1]");
  }
  {
    json d = minimal();
    d["field"]["rhs"][0] = "1/(x1 - 1)";  // singular inside M on the default grid
    EXPECT_EQ(schema_error_path(d), "field.rhs");
  }
  {
    json d = minimal();
    d["schema_version"] = 2;
    EXPECT_EQ(schema_error_path(d), "schema_version");
  }
  {
    json d = minimal();
    d.erase("name");
    EXPECT_EQ(schema_error_path(d), "name");
  }
  {
    json d = minimal();
    d["oracle"] = {{"flow", {"x1 + t"}}};
    EXPECT_EQ(schema_error_path(d), "oracle.flow");
  }
  {
    json d = minimal();
    d["config"] = {{"integrator", {{"rel_tol", -1}}}};
    EXPECT_EQ(schema_error_path(d), "config.integrator");
  }
  {
    json d = minimal();
    d["config"] = {{"colour", 1}};
    EXPECT_EQ(schema_error_path(d), "config.colour");
  }
  {
    json d = minimal();
    d["fixtures"] = json::array({{{"kind", "flow"}, {"basis", "guess"}}});
    EXPECT_EQ(schema_error_path(d), "fixtures[0].basis");
  }
  {
    json d = minimal();
    d["config"] = {{"base_grid", {{"lo", {0, 0}}, {"hi", {1, 1}}, {"count", {3}}}}};
    EXPECT_EQ(schema_error_path(d), "config.base_grid");
  }
  EXPECT_THROW(parse_scenario_text("{ not json"), SchemaError);
}

TEST(Schema, MorphismEquivarianceIsSpotChecked) {
  json d = save_scenario(builtin("example2"));
  d["morphisms"][0]["map"] = {"2*x1", "x2"};
  EXPECT_EQ(schema_error_path(d), "morphisms[0].map");
  d["morphisms"][0]["claimed_equivariant"] = false;
  EXPECT_NO_THROW(parse_scenario(d));
}

TEST(Schema, ErrorMessageNamesPath) {
  json doc = minimal();
  doc["field"].erase("rhs");
  try {
    parse_scenario(doc);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("rhs"), std::string::npos);
  }
}

TEST(Files, LoadFromDisk) {
  const auto path = temp_file("ok.json");
  {
    std::ofstream f(path);
    f << save_scenario(builtin("example3")).dump(2);
  }
  const auto sc = load_scenario(path.string());
  EXPECT_EQ(sc.name, "example3");
  EXPECT_EQ(resolve_scenario(path.string()).name, "example3");
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path.string()), Error);

  const auto bad = temp_file("bad.json");
  {
    std::ofstream f(bad);
    json d = minimal();
    d["field"].erase("rhs");
    f << d.dump();
  }
  try {
    load_scenario(bad.string());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "field.rhs");
  }
  std::filesystem::remove(bad);
}

TEST(ScenarioProperty, SaveLoadIsIdentityOnBuiltins) {
  for (const auto& name : builtin_names()) {
    const auto sc = builtin(name);
    const json saved = save_scenario(sc);
    const auto again = parse_scenario_text(saved.dump());
    EXPECT_EQ(save_scenario(again), saved) << name;
    EXPECT_EQ(again.name, sc.name);
    EXPECT_TRUE(again.field.manifold.inside == sc.field.manifold.inside);
    for (std::size_t i = 0; i < sc.field.rhs.size(); ++i) EXPECT_TRUE(again.field.rhs[i] == sc.field.rhs[i]);
    EXPECT_EQ(again.fixtures.size(), sc.fixtures.size());
    EXPECT_EQ(again.config.base_grid.count, sc.config.base_grid.count);
  }
}

TEST(ScenarioProperty, CorpusExpressionsRoundTrip) {
  for (const auto& name : builtin_names()) {
    const auto sc = builtin(name);
    std::vector<const Expression*> exprs;
    for (const auto& e : sc.field.rhs) exprs.push_back(&e);
    if (sc.field.oracle_flow) {
      for (const auto& e : *sc.field.oracle_flow) exprs.push_back(&e);
    }
    if (sc.field.manifold.margin) exprs.push_back(&*sc.field.manifold.margin);
    for (const auto& m : sc.morphisms) {
      for (const auto& e : m.map) exprs.push_back(&e);
    }
    for (const auto* e : exprs) EXPECT_TRUE(parse_expression(e->to_string()) == *e) << e->to_string();
    EXPECT_TRUE(parse_predicate(sc.field.manifold.inside.to_string()) == sc.field.manifold.inside);
  }
}

TEST(PointLiterals, Parse) {
  const auto p = parse_tagged_point("-2:-1,0");
  EXPECT_EQ(p.s, -2.0);
  EXPECT_EQ(p.x, (Point{-1, 0}));
  EXPECT_EQ(parse_point("(1.5, -2e-3)"), (Point{1.5, -0.002}));
  EXPECT_EQ(format_tagged_point(p), "-2:-1,0");
  EXPECT_THROW(parse_tagged_point("1,2"), Error);
  EXPECT_THROW(parse_tagged_point("a:1"), Error);
  EXPECT_THROW(parse_point("1,,2"), Error);
  EXPECT_THROW(parse_point(""), Error);
}

// Every light-weight fixture shipped with the built-ins holds.
TEST(ScenarioProperty, BuiltinFixturesHold) {
  for (const auto& name : builtin_names()) {
    const auto sc = builtin(name);
    const auto& v = sc.field;
    const auto& cfg = sc.config.completion;
    for (const auto& f : sc.fixtures) {
      const auto& d = f.data;
      SCOPED_TRACE(name + " " + f.kind + " " + d.dump());
      if (f.kind == "contains") {
        EXPECT_EQ(v.manifold.contains(d["x"].get<Point>()), d["expected"].get<bool>());
      } else if (f.kind == "field") {
        EXPECT_EQ(field_at(v, d["x"].get<Point>()), d["expected"].get<Point>());
      } else if (f.kind == "flow") {
        const auto o = flow(v, d["x0"].get<Point>(), d["t"].get<double>(), cfg.integrator);
        const double tol = d["tol"].get<double>();
        if (d["status"] == "Completed") {
          ASSERT_TRUE(o.completed());
          EXPECT_LE(flowcomp::testing::max_abs_diff(o.endpoint, d["endpoint"].get<Point>()), tol);
        } else {
          ASSERT_TRUE(o.escaped());
          EXPECT_NEAR(o.escape_time, d["escape_time"].get<double>(), tol);
        }
      } else if (f.kind == "window") {
        const auto w = existence_window(v, d["x0"].get<Point>(), d["horizon"].get<double>(), cfg.integrator);
        for (const auto& [key, b] : {std::pair{"t_minus", w.t_minus}, std::pair{"t_plus", w.t_plus}}) {
          if (d[key].is_null()) {
            EXPECT_TRUE(b.unbounded()) << key;
          } else {
            ASSERT_EQ(b.kind, WindowBound::Kind::escape) << key;
            EXPECT_NEAR(b.value, d[key].get<double>(), d["tol"].get<double>());
          }
        }
      } else if (f.kind == "same_point") {
        const auto p = parse_tagged_point(d["p"].get<std::string>());
        const auto q = parse_tagged_point(d["q"].get<std::string>());
        EXPECT_EQ(same_point(v, CompletionPoint{p}, CompletionPoint{q}, cfg), d["expected"].get<bool>());
      } else if (f.kind == "separability") {
        const auto p = parse_tagged_point(d["p"].get<std::string>());
        const auto q = parse_tagged_point(d["q"].get<std::string>());
        const auto r = separability_test(v, CompletionPoint{p}, CompletionPoint{q}, cfg, sc.config.separability);
        EXPECT_EQ(to_string(r.kind), d["expected"].get<std::string>());
      } else if (f.kind == "lift") {
        const auto p = parse_tagged_point(d["p"].get<std::string>());
        const Point y = lift_morphism(sc.morphism(d["morphism"].get<std::string>()), CompletionPoint{p}, cfg);
        EXPECT_LE(flowcomp::testing::max_abs_diff(y, d["expected"].get<Point>()), 1e-6);
      } else if (f.kind == "lift_incomplete") {
        const auto p = parse_tagged_point(d["p"].get<std::string>());
        EXPECT_THROW(lift_morphism(sc.morphism(d["morphism"].get<std::string>()), CompletionPoint{p}, cfg),
                     TargetNotComplete);
      }
    }
  }
}
