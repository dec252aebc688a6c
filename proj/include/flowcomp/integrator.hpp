#pragma once

// Adaptive Dormand-Prince 5(4) realization of the flow Fl_t of a vector field,
// with detection of finite-time escape from M (domain exit or norm blow-up).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flowcomp/errors.hpp"
#include "flowcomp/geometry.hpp"

namespace flowcomp {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double min_step = 1e-13;
  double blowup_norm = 1e8;
  /// Width of the final bracket around an escape time.
  double escape_refine_tol = 1e-10;
  std::size_t max_steps = 200000;
  /// When false the domain predicate is ignored (only blow-up ends a trajectory).
  bool check_domain = true;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("integrator tolerances must be positive");
    if (!(min_step > 0.0) || !(min_step < max_step)) throw Error("require 0 < min_step < max_step");
    if (!(blowup_norm > 0.0) || !(escape_refine_tol > 0.0)) throw Error("blowup_norm and escape_refine_tol must be positive");
  }
};

enum class FlowStatus { completed, escaped, inconclusive };
enum class EscapeCause { none, left_domain, blow_up };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::completed: return "Completed";
    case FlowStatus::escaped: return "Escaped";
    case FlowStatus::inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char* to_string(EscapeCause c) {
  switch (c) {
    case EscapeCause::none: return "none";
    case EscapeCause::left_domain: return "left_domain";
    case EscapeCause::blow_up: return "blow_up";
  }
  return "?";
}

struct FlowStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double max_error = 0.0;  // largest accepted scaled error estimate
};

struct FlowSample {
  double t;
  Point x;
};

/// Continuous extension of one accepted step (Hairer's 4th-order dense output).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> coef;  // 5 blocks of n

  void eval(double t, std::span<double> out) const {
    const std::size_t n = out.size();
    const double th = h != 0.0 ? (t - t0) / h : 0.0;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = coef[i] + th * (coef[n + i] + th1 * (coef[2 * n + i] + th * (coef[3 * n + i] + th1 * coef[4 * n + i])));
    }
  }
};

/// Piecewise dense output of a whole integration, valid on [0, t_end] (signed).
class DenseTrajectory {
 public:
  explicit DenseTrajectory(std::size_t dim = 0) : dim_(dim) {}

  void append(DenseSegment seg) { segs_.push_back(std::move(seg)); }
  bool empty() const noexcept { return segs_.empty(); }
  double t_end() const noexcept { return segs_.empty() ? 0.0 : segs_.back().t0 + segs_.back().h; }
  const std::vector<DenseSegment>& segments() const noexcept { return segs_; }

  Point at(double t) const {
    Point out(dim_);
    if (segs_.empty()) return out;
    // Segments are ordered along the direction of integration.
    const bool forward = segs_.front().h > 0.0;
    auto it = std::lower_bound(segs_.begin(), segs_.end(), t, [&](const DenseSegment& s, double v) {
      const double end = s.t0 + s.h;
      return forward ? end < v : end > v;
    });
    if (it == segs_.end()) it = std::prev(segs_.end());
    it->eval(t, out);
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<DenseSegment> segs_;
};

struct FlowOutcome {
  FlowStatus status = FlowStatus::inconclusive;
  double t_requested = 0.0;
  double t_reached = 0.0;
  Point endpoint;  // valid iff completed
  /// Valid iff escaped; signed like t_requested. Midpoint of escape_bracket.
  double escape_time = std::numeric_limits<double>::quiet_NaN();
  std::pair<double, double> escape_bracket{0.0, 0.0};  // (last inside, first outside)
  EscapeCause cause = EscapeCause::none;
  std::vector<FlowSample> samples;
  FlowStats stats;
  std::string note;

  bool completed() const noexcept { return status == FlowStatus::completed; }
  bool escaped() const noexcept { return status == FlowStatus::escaped; }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct InsideProbe {
  bool inside;
  double margin;  // +inf when the manifold has no margin hint
  EscapeCause cause;
};

class Stepper {
 public:
  Stepper(const VectorFieldSpec& v, const IntegratorConfig& cfg)
      : v_(v), cfg_(cfg), n_(static_cast<std::size_t>(v.dimension())) {
    for (auto& k : k_) k.resize(n_);
    tmp_.resize(n_);
    y1_.resize(n_);
    err_.resize(n_);
    probe_.resize(n_);
  }

  InsideProbe probe(std::span<const double> x) const {
    for (double c : x) {
      if (!std::isfinite(c)) return {false, 0.0, EscapeCause::blow_up};
    }
    if (norm(x) > cfg_.blowup_norm) return {false, 0.0, EscapeCause::blow_up};
    if (!cfg_.check_domain) return {true, std::numeric_limits<double>::infinity(), EscapeCause::none};
    try {
      if (!v_.manifold.inside(x)) return {false, 0.0, EscapeCause::left_domain};
      double m = std::numeric_limits<double>::infinity();
      if (v_.manifold.margin) {
        m = (*v_.manifold.margin)(x);
        if (m <= cfg_.escape_refine_tol) return {false, m, EscapeCause::left_domain};
      }
      return {true, m, EscapeCause::none};
    } catch (const EvalError&) {
      return {false, 0.0, EscapeCause::left_domain};
    }
  }

  bool has_margin() const noexcept { return cfg_.check_domain && v_.manifold.margin.has_value(); }

  // Returns false when a stage evaluation failed or produced non-finite values.
  bool step(std::span<const double> y0, double h, std::vector<double>& k1_in) {
    auto& k1 = k_[0];
    k1 = k1_in;
    auto stage = [&](std::vector<double>& out, auto&& combine) {
      for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y0[i] + h * combine(i);
      for (double c : tmp_) {
        if (!std::isfinite(c)) return false;
      }
      try {
        v_.evaluate(tmp_, out);
      } catch (const EvalError&) {
        return false;
      }
      for (double c : out) {
        if (!std::isfinite(c)) return false;
      }
      return true;
    };
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    if (!stage(k2, [&](std::size_t i) { return a21 * k1[i]; })) return false;
    if (!stage(k3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; })) return false;
    if (!stage(k4, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; })) return false;
    if (!stage(k5, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; }))
      return false;
    if (!stage(k6, [&](std::size_t i) {
          return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
        }))
      return false;
    for (std::size_t i = 0; i < n_; ++i) {
      y1_[i] = y0[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    for (double c : y1_) {
      if (!std::isfinite(c)) return false;
    }
    try {
      v_.evaluate(y1_, k7);
    } catch (const EvalError&) {
      return false;
    }
    for (double c : k7) {
      if (!std::isfinite(c)) return false;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      err_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::fabs(y0[i]), std::fabs(y1_[i]));
      sq += (err_[i] / sc) * (err_[i] / sc);
    }
    error_ = std::sqrt(sq / static_cast<double>(n_));
    speed_ = 0.0;
    for (const auto& k : k_) speed_ = std::max(speed_, norm(k));
    return true;
  }

  DenseSegment dense(double t0, std::span<const double> y0, double h) const {
    DenseSegment seg;
    seg.t0 = t0;
    seg.h = h;
    seg.coef.resize(5 * n_);
    const auto& k1 = k_[0];
    const auto& k3 = k_[2];
    const auto& k4 = k_[3];
    const auto& k5 = k_[4];
    const auto& k6 = k_[5];
    const auto& k7 = k_[6];
    for (std::size_t i = 0; i < n_; ++i) {
      const double ydiff = y1_[i] - y0[i];
      const double bspl = h * k1[i] - ydiff;
      seg.coef[i] = y0[i];
      seg.coef[n_ + i] = ydiff;
      seg.coef[2 * n_ + i] = bspl;
      seg.coef[3 * n_ + i] = ydiff - h * k7[i] - bspl;
      seg.coef[4 * n_ + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    return seg;
  }

  double error() const noexcept { return error_; }
  double speed() const noexcept { return speed_; }
  const std::vector<double>& y1() const noexcept { return y1_; }
  const std::vector<double>& k7() const noexcept { return k_[6]; }

  double initial_step(std::span<const double> y0, const std::vector<double>& f0, double span) {
    double d0 = 0.0, d1v = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::fabs(y0[i]);
      d0 += (y0[i] / sc) * (y0[i] / sc);
      d1v += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n_);
    d1v = std::sqrt(d1v / n_);
    double h0 = (d0 < 1e-5 || d1v < 1e-5) ? 1e-6 : 0.01 * d0 / d1v;
    h0 = std::min(h0, span);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y0[i] + h0 * f0[i];
    try {
      v_.evaluate(tmp_, probe_);
      for (std::size_t i = 0; i < n_; ++i) {
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::fabs(y0[i]);
        d2 += ((probe_[i] - f0[i]) / sc) * ((probe_[i] - f0[i]) / sc);
      }
      d2 = std::sqrt(d2 / n_) / h0;
    } catch (const EvalError&) {
      return std::max(cfg_.min_step, h0 * 1e-3);
    }
    const double dm = std::max(d1v, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, cfg_.max_step, span});
  }

 private:
  const VectorFieldSpec& v_;
  const IntegratorConfig& cfg_;
  std::size_t n_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> tmp_, y1_, err_;
  mutable std::vector<double> probe_;
  double error_ = 0.0;
  double speed_ = 0.0;
};

// Locates the first exit from M along one accepted step. When the manifold
// carries a margin hint, a sub-interval is certified inside if the balls of
// radius margin around its ends cover an upper bound of the path length.
class ExitScanner {
 public:
  ExitScanner(const Stepper& st, const DenseSegment& seg, double speed, const IntegratorConfig& cfg, std::size_t n)
      : st_(st), seg_(seg), speed_(speed), cfg_(cfg), x_(n) {}

  struct Node {
    double t;
    Point x;
    InsideProbe p;
  };

  Node at(double t) {
    seg_.eval(t, x_);
    return Node{t, x_, st_.probe(x_)};
  }

  // a is inside; returns (t_in, t_out, cause) of the first exit in (a.t, tb].
  std::optional<std::tuple<double, double, EscapeCause>> scan(const Node& a, const Node& b, int depth = 0) {
    if (!b.p.inside) return refine(a, b, depth);
    if (!st_.has_margin()) return std::nullopt;
    const double dt = std::fabs(b.t - a.t);
    const double path = std::max(distance(a.x, b.x), dt * speed_) * 1.05;
    if (a.p.margin + b.p.margin > path) return std::nullopt;
    if (depth > 80 || dt <= 1e-15 * std::max(1.0, std::fabs(a.t))) return std::nullopt;
    const Node m = at(0.5 * (a.t + b.t));
    if (auto r = scan(a, m, depth + 1)) return r;
    return scan(m, b, depth + 1);
  }

 private:
  std::optional<std::tuple<double, double, EscapeCause>> refine(Node a, Node b, int depth) {
    while (std::fabs(b.t - a.t) > cfg_.escape_refine_tol) {
      Node m = at(0.5 * (a.t + b.t));
      if (m.t == a.t || m.t == b.t) break;
      if (!m.p.inside) {
        b = std::move(m);
        continue;
      }
      if (st_.has_margin() && depth < 80) {
        // An earlier exit may hide between a and m.
        if (auto r = scan(a, m, depth + 1)) return r;
      }
      a = std::move(m);
    }
    return std::make_tuple(a.t, b.t, b.p.cause);
  }

  const Stepper& st_;
  const DenseSegment& seg_;
  double speed_;
  const IntegratorConfig& cfg_;
  Point x_;
};

inline FlowOutcome integrate(const VectorFieldSpec& v, std::span<const double> x0, double t,
                             const IntegratorConfig& cfg, DenseTrajectory* dense_out) {
  cfg.validate();
  v.manifold.check_dimension(x0);
  if (cfg.check_domain && !v.manifold.contains(x0)) {
    throw OutsideDomain("initial point " + format_point(x0) + " is not in M");
  }
  const std::size_t n = x0.size();
  FlowOutcome out;
  out.t_requested = t;
  Point y(x0.begin(), x0.end());
  out.samples.push_back({0.0, y});
  if (t == 0.0) {
    out.status = FlowStatus::completed;
    out.endpoint = y;
    return out;
  }
  Stepper st(v, cfg);
  {
    const InsideProbe p0 = st.probe(y);
    if (!p0.inside) {
      out.status = FlowStatus::escaped;
      out.cause = p0.cause;
      out.escape_time = 0.0;
      out.escape_bracket = {0.0, 0.0};
      out.note = "initial point lies within escape_refine_tol of the complement";
      return out;
    }
  }
  std::vector<double> k1(n);
  v.evaluate(y, k1);  // x0 is in M: errors here are genuine and propagate

  const double dir = t > 0.0 ? 1.0 : -1.0;
  const double span = std::fabs(t);
  double h = st.initial_step(y, k1, span);
  double tcur = 0.0;
  bool rejected_last = false;

  while (true) {
    if (out.stats.steps + out.stats.rejected >= cfg.max_steps) {
      out.status = FlowStatus::inconclusive;
      out.t_reached = tcur;
      out.note = "step budget exhausted";
      return out;
    }
    const double remaining = span - std::fabs(tcur);
    bool last = false;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      last = true;
    } else if (h < cfg.min_step) {
      out.status = FlowStatus::inconclusive;
      out.t_reached = tcur;
      out.note = "step size fell below min_step at t=" + detail::format_number(tcur);
      return out;
    }
    const double hs = dir * h;
    if (!st.step(y, hs, k1)) {
      ++out.stats.rejected;
      h *= 0.5;
      rejected_last = true;
      continue;
    }
    const double err = st.error();
    if (err > 1.0) {
      ++out.stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      rejected_last = true;
      continue;
    }

    DenseSegment seg = st.dense(tcur, y, hs);
    ExitScanner scanner(st, seg, st.speed(), cfg, n);
    ExitScanner::Node prev{tcur, y, st.probe(y)};
    prev.p.inside = true;
    std::optional<std::tuple<double, double, EscapeCause>> exit;
    constexpr int kSubdiv = 5;  // 4 interior dense points plus the endpoint
    for (int j = 1; j <= kSubdiv && !exit; ++j) {
      ExitScanner::Node cur = j == kSubdiv ? ExitScanner::Node{tcur + hs, st.y1(), st.probe(st.y1())}
                                           : scanner.at(tcur + hs * j / kSubdiv);
      exit = scanner.scan(prev, cur);
      prev = std::move(cur);
    }
    ++out.stats.steps;
    out.stats.max_error = std::max(out.stats.max_error, err);
    if (exit) {
      auto [t_in, t_out, cause] = *exit;
      if (dense_out) dense_out->append(seg);
      out.status = FlowStatus::escaped;
      out.cause = cause;
      out.escape_bracket = {t_in, t_out};
      out.escape_time = 0.5 * (t_in + t_out);
      out.t_reached = t_in;
      Point xin(n);
      seg.eval(t_in, xin);
      out.samples.push_back({t_in, std::move(xin)});
      return out;
    }
    if (dense_out) dense_out->append(seg);
    tcur = last ? t : tcur + hs;
    y = st.y1();
    k1 = st.k7();
    out.samples.push_back({tcur, y});
    if (last) {
      out.status = FlowStatus::completed;
      out.t_reached = t;
      out.endpoint = y;
      return out;
    }
    double fac = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
    if (rejected_last) fac = std::min(fac, 1.0);
    rejected_last = false;
    h = std::min(h * fac, cfg.max_step);
  }
}

}  // namespace detail

/// Fl_t(x0) with escape detection. Throws OutsideDomain if x0 is not in M.
inline FlowOutcome flow(const VectorFieldSpec& v, std::span<const double> x0, double t,
                        const IntegratorConfig& cfg = {}) {
  return detail::integrate(v, x0, t, cfg, nullptr);
}

/// As flow(), also returning the continuous extension of the trajectory.
inline std::pair<FlowOutcome, DenseTrajectory> flow_dense(const VectorFieldSpec& v, std::span<const double> x0,
                                                          double t, const IntegratorConfig& cfg = {}) {
  DenseTrajectory d(x0.size());
  auto out = detail::integrate(v, x0, t, cfg, &d);
  return {std::move(out), std::move(d)};
}

/// Flow of the rhs on all of R^n, ignoring membership in M (blow-up still ends it).
inline FlowOutcome ambient_flow(const VectorFieldSpec& v, std::span<const double> x0, double t,
                                IntegratorConfig cfg = {}) {
  cfg.check_domain = false;
  return detail::integrate(v, x0, t, cfg, nullptr);
}

enum class WindowQuality { certified_by_oracle, numerically_estimated };

inline const char* to_string(WindowQuality q) {
  return q == WindowQuality::certified_by_oracle ? "certified_by_oracle" : "numerically_estimated";
}

struct WindowBound {
  enum class Kind { escape, horizon, inconclusive };
  Kind kind = Kind::horizon;
  /// Escape time, or +-horizon when kind == horizon (meaning "infinite as far as we looked").
  double value = 0.0;

  bool unbounded() const noexcept { return kind == Kind::horizon; }
};

/// The open interval of times for which Fl_t(x0) is defined, within a horizon.
struct ExistenceWindow {
  WindowBound t_minus;
  WindowBound t_plus;
  WindowQuality quality = WindowQuality::numerically_estimated;
  double horizon = 0.0;
};

namespace detail {

inline WindowBound bound_from(const FlowOutcome& o, double horizon_signed) {
  switch (o.status) {
    case FlowStatus::completed: return {WindowBound::Kind::horizon, horizon_signed};
    case FlowStatus::escaped: return {WindowBound::Kind::escape, o.escape_time};
    case FlowStatus::inconclusive: return {WindowBound::Kind::inconclusive, o.t_reached};
  }
  return {};
}

// Max deviation between a numerical trajectory and the closed form at its samples;
// samples where the closed form cannot be evaluated are skipped.
inline std::optional<double> oracle_deviation(const VectorFieldSpec& v, std::span<const double> x0,
                                              const FlowOutcome& o) {
  if (!v.oracle_flow) return std::nullopt;
  double worst = 0.0;
  for (const auto& s : o.samples) {
    try {
      const Point ref = v.oracle(x0, s.t);
      worst = std::max(worst, distance(ref, s.x) / (1.0 + norm(ref)));
    } catch (const EvalError&) {
    }
  }
  return worst;
}

}  // namespace detail

inline ExistenceWindow existence_window(const VectorFieldSpec& v, std::span<const double> x0, double horizon,
                                        const IntegratorConfig& cfg = {}) {
  if (!(horizon > 0.0)) throw Error("horizon must be positive");
  const FlowOutcome fwd = flow(v, x0, horizon, cfg);
  const FlowOutcome bwd = flow(v, x0, -horizon, cfg);
  ExistenceWindow w;
  w.horizon = horizon;
  w.t_plus = detail::bound_from(fwd, horizon);
  w.t_minus = detail::bound_from(bwd, -horizon);
  const auto df = detail::oracle_deviation(v, x0, fwd);
  const auto db = detail::oracle_deviation(v, x0, bwd);
  if (df && db && *df <= 1e-6 && *db <= 1e-6) w.quality = WindowQuality::certified_by_oracle;
  return w;
}

struct OrderEstimate {
  double order = std::numeric_limits<double>::quiet_NaN();  // NaN when every error is zero
  std::vector<double> tolerances;
  std::vector<double> errors;
  std::vector<std::size_t> steps;
};

/// Convergence study against the closed-form flow: the endpoint error at
/// t_end is recorded under successive tolerance refinement, and the order is
/// the least-squares slope of -log(error) against log(step count).
inline OrderEstimate order_check(const VectorFieldSpec& v, std::span<const double> x0, double t_end,
                                 IntegratorConfig cfg = {}) {
  if (!v.oracle_flow) throw Error("order_check needs a closed-form flow");
  const Point exact = v.oracle(x0, t_end);
  OrderEstimate est;
  for (double tol = 1e-5; tol >= 1e-10 * 0.99; tol /= 10.0) {
    cfg.rel_tol = tol;
    cfg.abs_tol = tol;
    const FlowOutcome o = flow(v, x0, t_end, cfg);
    if (!o.completed()) throw Error("order_check trajectory did not complete");
    est.tolerances.push_back(tol);
    est.errors.push_back(distance(o.endpoint, exact));
    est.steps.push_back(o.stats.steps);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < est.errors.size(); ++i) {
    // Errors near round-off no longer reflect truncation.
    if (est.errors[i] <= 1e-13 * (1.0 + norm(exact))) continue;
    const double lx = std::log(static_cast<double>(est.steps[i]));
    const double ly = std::log(est.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) est.order = -(m * sxy - sx * sy) / denom;
  }
  return est;
}

}  // namespace flowcomp
