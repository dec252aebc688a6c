#pragma once

// Points of the flow completion M_R = R x_{Xbar} M, represented by tagged
// points (s, x) modulo (s, x) ~ (s + t, Fl_t(x)). There is no canonical
// representative: equality is a flow predicate. The induced flow of the
// complete field X_R is tag arithmetic and never integrates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "flowcomp/errors.hpp"
#include "flowcomp/geometry.hpp"
#include "flowcomp/integrator.hpp"

namespace flowcomp {

struct CompletionConfig {
  IntegratorConfig integrator;
  /// Base tolerance of same_point; scaled by (1 + |tag difference|) and field magnitude.
  double match_tol = 1e-6;
  /// Half-width H of the chart grid {-H, ..., H} used by orbit searches.
  double orbit_horizon = 10.0;
  /// Sub-steps per unit of the chart grid.
  int chart_subdivisions = 8;
};

struct CompletionPoint {
  TaggedPoint rep;

  double tag() const noexcept { return rep.s; }
  const Point& x() const noexcept { return rep.x; }
};

/// The chart j_s : M -> M_R, x |-> [(s, x)].
struct ChartHandle {
  double s = 0.0;
};

enum class Tri { yes, no, unknown };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "true";
    case Tri::no: return "false";
    case Tri::unknown: return "Unknown";
  }
  return "?";
}

inline CompletionPoint embed(const VectorFieldSpec& v, double s, std::span<const double> x) {
  if (!std::isfinite(s)) throw Error("tag must be finite");
  if (!v.manifold.contains(x)) throw OutsideDomain("point " + format_point(x) + " is not in M");
  return CompletionPoint{TaggedPoint{s, Point(x.begin(), x.end())}};
}

namespace detail {

inline double match_tolerance(const VectorFieldSpec& v, const CompletionConfig& cfg, double dt,
                              std::span<const double> at) {
  double speed = 1.0;
  try {
    Point f(at.size());
    v.evaluate(at, f);
    speed = std::max(1.0, norm(f));
  } catch (const EvalError&) {
  }
  return cfg.match_tol * (1.0 + std::fabs(dt)) * speed;
}

inline std::string bracket_text(const FlowOutcome& o) {
  return "[" + format_number(o.escape_bracket.first) + ", " + format_number(o.escape_bracket.second) + "]";
}

}  // namespace detail

/// Whether p and q are the same point of M_R: Fl_{q.s - p.s}(p.x) = q.x.
/// Throws Undecided when neither direction of integration is conclusive.
inline bool same_point(const VectorFieldSpec& v, const CompletionPoint& p, const CompletionPoint& q,
                       const CompletionConfig& cfg = {}) {
  const double dt = q.tag() - p.tag();
  const FlowOutcome fwd = flow(v, p.x(), dt, cfg.integrator);
  if (fwd.completed()) {
    return distance(fwd.endpoint, q.x()) <= detail::match_tolerance(v, cfg, dt, q.x());
  }
  // Cross-check from the other end; a grazing exit may be resolved differently.
  const FlowOutcome bwd = flow(v, q.x(), -dt, cfg.integrator);
  if (bwd.completed()) {
    return distance(bwd.endpoint, p.x()) <= detail::match_tolerance(v, cfg, dt, p.x());
  }
  if (fwd.escaped() || bwd.escaped()) return false;
  throw Undecided("same_point: integration inconclusive in both directions (" + fwd.note + ")");
}

/// Whether p lies in the image j_c(M).
inline bool in_chart(const VectorFieldSpec& v, const CompletionPoint& p, ChartHandle c,
                     const CompletionConfig& cfg = {}) {
  const FlowOutcome o = flow(v, p.x(), c.s - p.tag(), cfg.integrator);
  if (o.status == FlowStatus::inconclusive) throw Undecided("in_chart: " + o.note);
  return o.completed();
}

/// The coordinate j_c^{-1}(p). Exact when p is represented with tag c.
inline Point to_chart(const VectorFieldSpec& v, const CompletionPoint& p, ChartHandle c,
                      const CompletionConfig& cfg = {}) {
  if (c.s == p.tag()) return p.x();
  const FlowOutcome o = flow(v, p.x(), c.s - p.tag(), cfg.integrator);
  switch (o.status) {
    case FlowStatus::completed: return o.endpoint;
    case FlowStatus::escaped:
      throw NotInChart("point is not in chart " + detail::format_number(c.s) + ": trajectory leaves M at t in " +
                       detail::bracket_text(o));
    case FlowStatus::inconclusive: break;
  }
  throw Undecided("to_chart: " + o.note);
}

/// Chart change j_s^{-1} o j_r, which is Fl_{s - r} on the overlap.
inline Point transition(const VectorFieldSpec& v, double r, double s, std::span<const double> x,
                        const CompletionConfig& cfg = {}) {
  if (!v.manifold.contains(x)) throw OutsideDomain("point " + format_point(x) + " is not in M");
  if (r == s) return Point(x.begin(), x.end());
  const FlowOutcome o = flow(v, x, s - r, cfg.integrator);
  switch (o.status) {
    case FlowStatus::completed: return o.endpoint;
    case FlowStatus::escaped:
      throw NotInOverlap("point is not in the overlap of charts " + detail::format_number(r) + " and " +
                         detail::format_number(s) + ": escape at t in " + detail::bracket_text(o));
    case FlowStatus::inconclusive: break;
  }
  throw Undecided("transition: " + o.note);
}

/// Flow of X_R. Total: (s, x) |-> (s - t, x), so that
/// complete_flow(embed(s, x), t) = embed(s, Fl_t(x)) wherever the right side exists.
inline CompletionPoint complete_flow(const CompletionPoint& p, double t) {
  return CompletionPoint{TaggedPoint{p.tag() - t, p.x()}};
}

/// An equivariant map f : (M, X) -> (N, Y).
struct MorphismSpec {
  std::string name;
  VectorFieldSpec target;
  std::vector<Expression> map;  // one expression in x1..xn per coordinate of N
  bool claimed_equivariant = true;

  Point apply(std::span<const double> x) const {
    Point y(map.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = map[i](x);
    return y;
  }
};

/// Largest |Df(x) X(x) - Y(f(x))| over the points, by central differences.
/// Points outside M or mapped outside N are skipped.
inline double equivariance_residual(const MorphismSpec& f, const VectorFieldSpec& source,
                                    std::span<const Point> points, double fd_step = 1e-5) {
  double worst = 0.0;
  const std::size_t m = f.map.size();
  for (const Point& x : points) {
    try {
      if (!source.manifold.contains(x)) continue;
      const Point fx = f.apply(x);
      if (!f.target.manifold.contains(fx)) continue;
      Point X(x.size());
      source.evaluate(x, X);
      const double len = norm(X);
      Point push(m, 0.0);
      if (len > 0.0) {
        const double h = fd_step / len;
        Point xp = x, xm = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
          xp[i] += h * X[i];
          xm[i] -= h * X[i];
        }
        const Point fp = f.apply(xp);
        const Point fm = f.apply(xm);
        for (std::size_t i = 0; i < m; ++i) push[i] = (fp[i] - fm[i]) / (2.0 * h);
      }
      Point Y(m);
      f.target.evaluate(fx, Y);
      worst = std::max(worst, distance(push, Y));
    } catch (const EvalError&) {
    }
  }
  return worst;
}

/// f_R(p) = Fl^Y_{-s}(f(x)) for the representative (s, x) of p.
inline Point lift_morphism(const MorphismSpec& f, const CompletionPoint& p, const CompletionConfig& cfg = {},
                           double horizon = std::numeric_limits<double>::infinity()) {
  if (std::fabs(p.tag()) > horizon) {
    throw Error("lift: tag " + detail::format_number(p.tag()) + " exceeds horizon " + detail::format_number(horizon));
  }
  const Point fx = f.apply(p.x());
  if (!f.target.manifold.contains(fx)) throw OutsideDomain("f(x) = " + format_point(fx) + " is not in N");
  if (p.tag() == 0.0) return fx;
  const FlowOutcome o = flow(f.target, fx, -p.tag(), cfg.integrator);
  switch (o.status) {
    case FlowStatus::completed: return o.endpoint;
    case FlowStatus::escaped:
      throw TargetNotComplete("target flow from " + format_point(fx) + " escapes at t = " +
                              detail::format_number(o.escape_time) + " before reaching " +
                              detail::format_number(-p.tag()));
    case FlowStatus::inconclusive: break;
  }
  throw Undecided("lift: " + o.note);
}

namespace detail {

template <typename F>
double golden_min(F&& f, double a, double b, int iters, double& fbest) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  if (fc < fd) {
    fbest = fc;
    return c;
  }
  fbest = fd;
  return d;
}

}  // namespace detail

/// Whether x and y lie on one X-orbit in M, looking up to |t| <= horizon.
/// Uses the dense output of one trajectory per direction; candidate times are
/// local minima of |x(t) - y| refined by golden-section search, then verified
/// with a fresh integration.
inline Tri same_orbit_M(const VectorFieldSpec& v, std::span<const double> x, std::span<const double> y,
                        double horizon, const CompletionConfig& cfg = {}) {
  if (!v.manifold.contains(x)) throw OutsideDomain("point " + format_point(x) + " is not in M");
  if (!v.manifold.contains(y)) throw OutsideDomain("point " + format_point(y) + " is not in M");
  if (distance(x, y) <= cfg.match_tol) return Tri::yes;
  bool inconclusive = false;
  for (double dir : {1.0, -1.0}) {
    auto [o, dense] = flow_dense(v, x, dir * horizon, cfg.integrator);
    if (o.status == FlowStatus::inconclusive) inconclusive = true;
    if (dense.empty()) continue;
    const double t_stop = o.completed() ? o.t_reached : o.escape_bracket.first;
    constexpr int kSub = 8;
    std::vector<std::pair<double, double>> samples;  // (t, distance)
    for (const auto& seg : dense.segments()) {
      for (int j = 0; j < kSub; ++j) {
        const double t = seg.t0 + seg.h * j / kSub;
        if (std::fabs(t) > std::fabs(t_stop)) break;
        samples.emplace_back(t, distance(dense.at(t), y));
      }
    }
    samples.emplace_back(t_stop, distance(dense.at(t_stop), y));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const bool left_ok = i == 0 || samples[i].second <= samples[i - 1].second;
      const bool right_ok = i + 1 == samples.size() || samples[i].second <= samples[i + 1].second;
      if (!left_ok || !right_ok) continue;
      const double a = samples[i == 0 ? 0 : i - 1].first;
      const double b = samples[i + 1 == samples.size() ? i : i + 1].first;
      double best = samples[i].second;
      double t_star = samples[i].first;
      if (a != b) {
        double fb = 0.0;
        const double tc = detail::golden_min([&](double t) { return distance(dense.at(t), y); }, std::min(a, b),
                                             std::max(a, b), 60, fb);
        if (fb < best) {
          best = fb;
          t_star = tc;
        }
      }
      const double tol = detail::match_tolerance(v, cfg, t_star, y);
      if (best > 10.0 * tol) continue;
      const FlowOutcome check = flow(v, x, t_star, cfg.integrator);
      if (check.completed() && distance(check.endpoint, y) <= tol) return Tri::yes;
      if (check.status == FlowStatus::inconclusive) inconclusive = true;
    }
  }
  return inconclusive ? Tri::unknown : Tri::no;
}

/// Whether p and q lie on one X_R-orbit. The X_R-orbit of p is {[(sigma, p.x)]};
/// the tag sigma is searched over the chart grid q.s + [-H, H] with independent
/// integrations per grid tag, refined by golden-section search, and decided by
/// same_point(complete_flow(p, p.s - sigma), q).
inline Tri same_orbit_completion(const VectorFieldSpec& v, const CompletionPoint& p, const CompletionPoint& q,
                                 const CompletionConfig& cfg = {}) {
  const double H = cfg.orbit_horizon;
  const int n_grid = static_cast<int>(std::ceil(H)) * cfg.chart_subdivisions;
  const double step = H / n_grid;
  bool inconclusive = false;
  // g(tau) = |Fl_tau(p.x) - q.x| where tau = q.s - sigma; NaN where undefined.
  auto g = [&](double tau) {
    const FlowOutcome o = flow(v, p.x(), tau, cfg.integrator);
    if (o.status == FlowStatus::inconclusive) inconclusive = true;
    return o.completed() ? distance(o.endpoint, q.x()) : std::numeric_limits<double>::quiet_NaN();
  };
  auto decide = [&](double tau) {
    const double sigma = q.tag() - tau;
    try {
      return same_point(v, complete_flow(p, p.tag() - sigma), q, cfg);
    } catch (const Undecided&) {
      inconclusive = true;
      return false;
    }
  };
  std::vector<double> taus;
  std::vector<double> vals;
  for (int i = -n_grid; i <= n_grid; ++i) {
    taus.push_back(i * step);
    vals.push_back(g(i * step));
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (std::isnan(vals[i])) continue;
    const bool left_ok = i == 0 || std::isnan(vals[i - 1]) || vals[i] <= vals[i - 1];
    const bool right_ok = i + 1 == taus.size() || std::isnan(vals[i + 1]) || vals[i] <= vals[i + 1];
    if (!left_ok || !right_ok) continue;
    if (vals[i] <= detail::match_tolerance(v, cfg, taus[i], q.x()) && decide(taus[i])) return Tri::yes;
    // Coarse screen: the grid spacing bounds how far a true match can hide.
    double speed = 1.0;
    try {
      speed = std::max(1.0, norm(field_at(v, q.x())));
    } catch (const Error&) {
    }
    if (vals[i] > 2.0 * step * speed * 4.0) continue;
    const double a = i == 0 ? taus[i] : taus[i - 1];
    const double b = i + 1 == taus.size() ? taus[i] : taus[i + 1];
    double fb = 0.0;
    const double tau = detail::golden_min(
        [&](double t) {
          const double r = g(t);
          return std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
        },
        a, b, 50, fb);
    if (std::isfinite(fb) && fb <= 10.0 * detail::match_tolerance(v, cfg, tau, q.x()) && decide(tau)) {
      return Tri::yes;
    }
  }
  return inconclusive ? Tri::unknown : Tri::no;
}

}  // namespace flowcomp
