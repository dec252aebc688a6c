#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "flowcomp/flowcomp.hpp"
#include "test_support.hpp"

using namespace flowcomp;
using flowcomp::testing::Gen;
using flowcomp::testing::max_abs_diff;
using flowcomp::testing::shift_flow;

namespace {

const Scenario& ex2s() {
  static const auto s = builtin("example2");
  return s;
}
const VectorFieldSpec& ex2() { return ex2s().field; }
const VectorFieldSpec& rot() {
  static const auto v = builtin("rotation2d").field;
  return v;
}

CompletionPoint pt(double s, Point x) { return embed(ex2(), s, x); }

// (1,0) on the negative and positive branch of the doubled axis.
CompletionPoint minus_branch() { return pt(-2, {-1, 0}); }
CompletionPoint plus_branch() { return pt(0, {1, 0}); }

}  // namespace

TEST(Embed, RepresentativeIsKept) {
  const auto p = plus_branch();
  EXPECT_EQ(p.tag(), 0.0);
  EXPECT_EQ(p.x(), (Point{1, 0}));
  EXPECT_THROW(embed(ex2(), 0, std::vector<double>{0, 0}), OutsideDomain);
  EXPECT_THROW(embed(ex2(), std::nan(""), std::vector<double>{1, 0}), Error);
}

TEST(Embed, NegativeBranchHasShadowOne) {
  // (s, x) ~ (s + t, x + t) off the axis; on the x < 0 branch the invariant x - s is 1.
  const auto p = minus_branch();
  EXPECT_EQ(p.x()[0] - p.tag(), 1.0);
  EXPECT_FALSE(same_point(ex2(), p, plus_branch()));
  // It is equal to the tag -1.5 point over x = -0.5.
  EXPECT_TRUE(same_point(ex2(), p, pt(-1.5, {-0.5, 0})));
}

TEST(Embed, CompleteFieldChartZeroIsEverything) {
  const auto p = embed(rot(), 3.0, std::vector<double>{1, 0});
  EXPECT_TRUE(in_chart(rot(), p, ChartHandle{0}));
  const auto q = embed(rot(), 0.0, to_chart(rot(), p, ChartHandle{0}));
  EXPECT_TRUE(same_point(rot(), p, q));
}

TEST(SamePoint, Examples) {
  EXPECT_TRUE(same_point(ex2(), pt(0, {1, 0.5}), pt(2, {3, 0.5})));
  EXPECT_FALSE(same_point(ex2(), minus_branch(), plus_branch()));
  EXPECT_TRUE(same_point(ex2(), minus_branch(), minus_branch()));
  EXPECT_FALSE(same_point(ex2(), pt(0, {1, 0.5}), pt(2, {3, 0.51})));
}

TEST(SamePoint, Symmetric) {
  EXPECT_TRUE(same_point(ex2(), pt(2, {3, 0.5}), pt(0, {1, 0.5})));
  EXPECT_FALSE(same_point(ex2(), plus_branch(), minus_branch()));
}

TEST(SamePoint, InconclusiveIsAnError) {
  CompletionConfig cfg;
  cfg.integrator.max_steps = 2;
  EXPECT_THROW(same_point(rot(), embed(rot(), 0, std::vector<double>{1, 0}),
                          embed(rot(), 50, std::vector<double>{1, 0}), cfg),
               Undecided);
}

TEST(Chart, Membership) {
  EXPECT_FALSE(in_chart(ex2(), minus_branch(), ChartHandle{0}));
  EXPECT_TRUE(in_chart(ex2(), minus_branch(), ChartHandle{-2}));
  EXPECT_TRUE(in_chart(ex2(), pt(0, {1, 0.5}), ChartHandle{7}));
}

TEST(Chart, Coordinates) {
  const Point y = to_chart(ex2(), pt(0, {1, 0.5}), ChartHandle{3});
  EXPECT_NEAR(y[0], 4.0, 1e-8);
  EXPECT_NEAR(y[1], 0.5, 1e-8);
  const Point x{0.123456789, -1.9};
  EXPECT_EQ(to_chart(ex2(), pt(5, x), ChartHandle{5}), x);
}

TEST(Chart, BoundaryHitIsNotInChart) {
  // The trajectory reaches the origin exactly at the chart's time.
  try {
    to_chart(ex2(), minus_branch(), ChartHandle{-1});
    FAIL() << "expected NotInChart";
  } catch (const NotInChart& e) {
    EXPECT_NE(std::string(e.what()).find("["), std::string::npos);
  }
}

TEST(Transition, Examples) {
  const Point y = transition(ex2(), 0, 3, std::vector<double>{1, 0.5});
  EXPECT_NEAR(y[0], 4.0, 1e-8);
  EXPECT_NEAR(y[1], 0.5, 1e-8);
  const Point x{-1, 0};
  EXPECT_EQ(transition(ex2(), 2.5, 2.5, x), x);
  EXPECT_THROW(transition(ex2(), 0, 3, x), NotInOverlap);
  const Point a = transition(ex2(), 3, 7, transition(ex2(), 0, 3, std::vector<double>{1, 0.5}));
  const Point b = transition(ex2(), 0, 7, std::vector<double>{1, 0.5});
  EXPECT_LE(max_abs_diff(a, b), 1e-6);
}

TEST(CompleteFlow, Examples) {
  const auto p = plus_branch();
  const auto p0 = complete_flow(p, 0);
  EXPECT_EQ(p0.tag(), p.tag());
  EXPECT_EQ(p0.x(), p.x());
  EXPECT_TRUE(same_point(ex2(), complete_flow(p, 5), pt(0, {6, 0})));
  for (double t : {0.0, 0.5, 3.0, 10.0}) {
    const auto m = complete_flow(minus_branch(), t);
    EXPECT_FALSE(same_point(ex2(), m, pt(0, {1 + t, 0}))) << t;
  }
}

TEST(Lift, InclusionExamples) {
  const auto& inc = ex2s().morphism("inclusion");
  EXPECT_EQ(lift_morphism(inc, plus_branch()), (Point{1, 0}));
  const Point y = lift_morphism(inc, minus_branch());
  EXPECT_LE(max_abs_diff(y, Point{1, 0}), 1e-8);
}

TEST(Lift, IncompleteTarget) {
  const auto sc = builtin("blowup1d");
  const auto& id = sc.morphism("identity");
  EXPECT_THROW(lift_morphism(id, embed(sc.field, -2, std::vector<double>{1})), TargetNotComplete);
  // Backwards along y' = y^2 from 1 is fine.
  const Point y = lift_morphism(id, embed(sc.field, 2, std::vector<double>{1}));
  EXPECT_NEAR(y[0], 1.0 / 3.0, 1e-8);
  EXPECT_THROW(lift_morphism(id, embed(sc.field, 2, std::vector<double>{1}), {}, 1.0), Error);
}

TEST(Lift, EquivarianceResidual) {
  std::vector<Point> pts;
  Gen g(40);
  for (int i = 0; i < 50; ++i) pts.push_back(g.in_manifold(ex2(), -2, 2));
  EXPECT_LE(equivariance_residual(ex2s().morphism("inclusion"), ex2(), pts), 1e-8);
  EXPECT_LE(equivariance_residual(ex2s().morphism("projection"), ex2(), pts), 1e-8);
  MorphismSpec bad = ex2s().morphism("inclusion");
  bad.map[0] = parse_expression("2*x1");
  EXPECT_GT(equivariance_residual(bad, ex2(), pts), 0.5);
}

TEST(Orbit, InM) {
  const CompletionConfig cfg;
  EXPECT_EQ(same_orbit_M(ex2(), std::vector<double>{1, 0.5}, std::vector<double>{4, 0.5}, 10, cfg), Tri::yes);
  EXPECT_EQ(same_orbit_M(ex2(), std::vector<double>{1, 0}, std::vector<double>{-1, 0}, 10, cfg), Tri::no);
  EXPECT_EQ(same_orbit_M(ex2(), std::vector<double>{1, 0.5}, std::vector<double>{1, 0.5}, 10, cfg), Tri::yes);
  EXPECT_EQ(same_orbit_M(ex2(), std::vector<double>{1, 0.5}, std::vector<double>{4, 0.6}, 10, cfg), Tri::no);
  EXPECT_EQ(same_orbit_M(rot(), std::vector<double>{1, 0}, std::vector<double>{0, -1}, 10, cfg), Tri::yes);
  EXPECT_EQ(same_orbit_M(rot(), std::vector<double>{1, 0}, std::vector<double>{0, -1.1}, 10, cfg), Tri::no);
}

TEST(Orbit, InCompletion) {
  const auto p = pt(0.3, {1, 0.5});
  EXPECT_EQ(same_orbit_completion(ex2(), p, complete_flow(p, 17)), Tri::yes);
  EXPECT_EQ(same_orbit_completion(ex2(), plus_branch(), minus_branch()), Tri::no);
  EXPECT_EQ(same_orbit_completion(ex2(), pt(0, {1, 0.5}), pt(5, {2, 0.5})), Tri::yes);
}

TEST(CompletionProperty, PerSliceInjectivity) {
  Gen g(41);
  const CompletionConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const auto& v = i % 2 ? ex2() : rot();
    const double s = g.uniform(-5, 5);
    const Point x = g.in_manifold(v, -2, 2);
    Point y = g.in_manifold(v, -2, 2);
    if (i % 4 == 0) {
      y = x;
      y[0] += g.uniform(20, 1000) * cfg.match_tol * (g.integer(0, 1) ? 1 : -1);
      if (!v.manifold.contains(y)) continue;
    }
    if (distance(x, y) <= 10 * cfg.match_tol) continue;
    EXPECT_FALSE(same_point(v, embed(v, s, x), embed(v, s, y), cfg));
  }
}

TEST(CompletionProperty, TransitionCocycle) {
  Gen g(42);
  int checked = 0;
  while (checked < 200) {
    const Point x = g.in_manifold(ex2(), -2, 2);
    const double r = g.uniform(-3, 3), s = g.uniform(-3, 3), u = g.uniform(-3, 3);
    // Independent oracle decides whether x lies in the triple overlap.
    if (!shift_flow(x, s - r, 0.0) || !shift_flow(x, u - r, 0.0)) continue;
    const Point xs = transition(ex2(), r, s, x);
    const Point a = transition(ex2(), s, u, xs);
    const Point b = transition(ex2(), r, u, x);
    EXPECT_LE(max_abs_diff(a, b), 1e-6);
    ++checked;
  }
}

TEST(CompletionProperty, JRelatedness) {
  Gen g(43);
  int defined = 0;
  for (int i = 0; i < 200; ++i) {
    const auto& v = i % 2 ? ex2() : rot();
    const double s = g.uniform(-5, 5);
    const double t = g.uniform(-5, 5);
    const Point x = g.in_manifold(v, -2, 2);
    const auto o = flow(v, x, t);
    if (!o.completed()) continue;
    ++defined;
    EXPECT_TRUE(same_point(v, complete_flow(embed(v, s, x), t), embed(v, s, o.endpoint)));
  }
  EXPECT_GT(defined, 150);
}

TEST(CompletionProperty, CompleteFlowIsTotal) {
  Gen g(44);
  for (int i = 0; i < 10000; ++i) {
    const CompletionPoint p{TaggedPoint{g.uniform(-1e6, 1e6), g.box(2, -5, 5)}};
    const double t = g.uniform(-1e6, 1e6);
    const auto q = complete_flow(p, t);
    ASSERT_EQ(q.tag(), p.tag() - t);
    ASSERT_EQ(q.x(), p.x());
  }
}

TEST(CompletionProperty, CompleteFieldDegeneracy) {
  Gen g(45);
  for (int i = 0; i < 100; ++i) {
    const double s = g.uniform(-10, 10);
    const Point x = g.box(2, -2, 2);
    const auto p = embed(rot(), s, x);
    ASSERT_TRUE(in_chart(rot(), p, ChartHandle{0}));
    const Point y = to_chart(rot(), p, ChartHandle{0});
    EXPECT_LE(max_abs_diff(y, rot().oracle(x, -s)), 1e-6);
  }
}

TEST(CompletionProperty, LiftWellDefined) {
  Gen g(46);
  const auto& inc = ex2s().morphism("inclusion");
  for (int i = 0; i < 100; ++i) {
    const double s = g.uniform(-4, 4);
    const double t = g.uniform(-4, 4);
    Point x = g.in_manifold(ex2(), -2, 2);
    if (i % 3 == 0) x[1] = 0.0;
    if (!ex2().manifold.contains(x)) continue;
    const auto fx = shift_flow(x, t, 0.0);
    if (!fx) continue;
    const Point a = lift_morphism(inc, embed(ex2(), s, x));
    const Point b = lift_morphism(inc, embed(ex2(), s + t, *fx));
    EXPECT_LE(max_abs_diff(a, b), 1e-6);
  }
}

TEST(CompletionProperty, LiftEquivariance) {
  Gen g(47);
  const auto& inc = ex2s().morphism("inclusion");
  for (int i = 0; i < 100; ++i) {
    const auto p = embed(ex2(), g.uniform(-4, 4), g.in_manifold(ex2(), -2, 2));
    const double t = g.uniform(-4, 4);
    const Point lhs = lift_morphism(inc, complete_flow(p, t));
    const Point rhs = inc.target.oracle(lift_morphism(inc, p), t);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-6);
  }
}

TEST(CompletionProperty, Functoriality) {
  // f: example 2 -> (R^2, d/dx1) inclusion, g: (R^2, d/dx1) -> (R, d/dx1) projection.
  const auto& f = ex2s().morphism("inclusion");
  const auto& gf = ex2s().morphism("projection");
  MorphismSpec g_map;
  g_map.name = "g";
  g_map.target = gf.target;
  g_map.map = {parse_expression("x1")};
  Gen gen(48);
  for (int i = 0; i < 100; ++i) {
    Point x = gen.in_manifold(ex2(), -2, 2);
    if (i % 2 == 0) x[1] = 0.0;
    if (!ex2().manifold.contains(x)) continue;
    const auto p = embed(ex2(), gen.uniform(-4, 4), x);
    const Point lf = lift_morphism(f, p);
    const Point lhs = lift_morphism(gf, p);
    const Point rhs = lift_morphism(g_map, embed(f.target, 0, lf));
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-6);
  }
}

TEST(CompletionProperty, OrbitCorrespondence) {
  Gen g(49);
  int unknown = 0;
  for (int i = 0; i < 50; ++i) {
    Point x = g.in_manifold(ex2(), -2, 2);
    Point y = g.in_manifold(ex2(), -2, 2);
    if (i % 2 == 0) {
      y = {x[0] + g.uniform(-3, 3), x[1]};  // same horizontal line
      if (i % 4 == 0) x[1] = y[1] = 0.0;
      if (!ex2().manifold.contains(x) || !ex2().manifold.contains(y)) continue;
    }
    const Tri in_m = same_orbit_M(ex2(), x, y, 10.0);
    const Tri in_c = same_orbit_completion(ex2(), embed(ex2(), 0, x), embed(ex2(), 0, y));
    if (in_m == Tri::unknown || in_c == Tri::unknown) {
      ++unknown;
      continue;
    }
    EXPECT_EQ(in_m, in_c) << format_point(x) << " " << format_point(y);
    // Independent check of the answer itself.
    const bool same_line = x[1] == y[1] && (x[1] != 0.0 || (x[0] > 0) == (y[0] > 0));
    EXPECT_EQ(in_m == Tri::yes, same_line) << format_point(x) << " " << format_point(y);
  }
  EXPECT_LE(unknown, 5);
}
