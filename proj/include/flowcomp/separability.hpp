#pragma once

// Non-separability of completion points by limit-merge probing, and the
// identification report that classifies doubled loci over a sample grid.
//
// Both verdicts are heuristic: NonSeparable rests on a finite sequence of
// shrinking probe radii, Separated on the absence of merging at the smallest
// radius. Unknown absorbs everything else.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowcomp/completion.hpp"
#include "flowcomp/parallel.hpp"
#include "flowcomp/union_find.hpp"

namespace flowcomp {

struct SeparabilityConfig {
  std::vector<double> radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5};
  /// Probe directions per radius; 0 selects 16 in 2-D, 2 in 1-D and 8n otherwise.
  int directions = 0;
  double merge_tol = 1e-4;
  std::uint64_t seed = 0;
  /// Objective evaluations of the local refinement around the best probe.
  int refine_evals = 24;
  /// Escapes this close to the requested time are not evidence of separation.
  double escape_gap = 1e-3;
};

enum class Separation { equal, separated, non_separable, unknown };

inline const char* to_string(Separation s) {
  switch (s) {
    case Separation::equal: return "Equal";
    case Separation::separated: return "Separated";
    case Separation::non_separable: return "NonSeparable";
    case Separation::unknown: return "Unknown";
  }
  return "?";
}

struct ProbeLevel {
  double radius = 0.0;
  Point best_probe;  // empty when no probe completed
  double image_distance = std::numeric_limits<double>::infinity();
  int completed = 0;
  int escaped = 0;
  int inconclusive = 0;
  double max_abs_escape = 0.0;
};

struct SeparabilityVerdict {
  Separation kind = Separation::unknown;
  std::vector<ProbeLevel> evidence;          // probing around p towards q
  std::vector<ProbeLevel> reverse_evidence;  // probing around q towards p
  /// For Separated: smallest probe radius and the least image distance seen there.
  double smallest_radius = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  std::string note;
};

namespace detail {

inline std::vector<Point> probe_directions(int n, int k, std::uint64_t seed) {
  std::vector<Point> dirs;
  if (n == 1) return {{1.0}, {-1.0}};
  std::mt19937_64 rng(seed);
  if (n == 2) {
    if (k <= 0) k = 16;
    double offset = 0.0;
    if (seed != 0) offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi / k)(rng);
    for (int j = 0; j < k; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / k + offset;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  if (k <= 0) k = 8 * n;
  std::normal_distribution<double> gauss;
  while (static_cast<int>(dirs.size()) < k) {
    Point d(static_cast<std::size_t>(n));
    for (auto& c : d) c = gauss(rng);
    const double len = norm(d);
    if (len < 1e-12) continue;
    for (auto& c : d) c /= len;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

// Nelder-Mead over unnormalized directions u; the probe is center + radius * u/|u|.
template <typename F>
std::pair<Point, double> refine_direction(F&& objective, const Point& start, double spread, int budget) {
  const std::size_t n = start.size();
  std::vector<Point> simplex{start};
  for (std::size_t i = 0; i < n; ++i) {
    Point u = start;
    u[i] += spread;
    simplex.push_back(std::move(u));
  }
  std::vector<double> vals;
  for (const auto& u : simplex) vals.push_back(objective(u));
  int evals = static_cast<int>(simplex.size());
  auto order = [&] {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Point> s2;
    std::vector<double> v2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(vals[i]);
    }
    simplex = std::move(s2);
    vals = std::move(v2);
  };
  auto along = [&](const Point& c, const Point& w, double coef) {
    Point r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = c[i] + coef * (w[i] - c[i]);
    return r;
  };
  while (evals < budget) {
    order();
    Point centroid(n, 0.0);
    for (std::size_t j = 0; j + 1 < simplex.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[j][i] / static_cast<double>(n);
    }
    const Point& worst = simplex.back();
    Point refl = along(centroid, worst, -1.0);
    const double fr = objective(refl);
    ++evals;
    if (fr < vals.front()) {
      Point exp = along(centroid, worst, -2.0);
      const double fe = objective(exp);
      ++evals;
      if (fe < fr) {
        simplex.back() = std::move(exp);
        vals.back() = fe;
      } else {
        simplex.back() = std::move(refl);
        vals.back() = fr;
      }
    } else if (fr < vals[vals.size() - 2]) {
      simplex.back() = std::move(refl);
      vals.back() = fr;
    } else {
      Point con = along(centroid, worst, 0.5);
      const double fc = objective(con);
      ++evals;
      if (fc < vals.back()) {
        simplex.back() = std::move(con);
        vals.back() = fc;
      } else {
        for (std::size_t j = 1; j < simplex.size(); ++j) {
          simplex[j] = along(simplex.front(), simplex[j], 0.5);
          vals[j] = objective(simplex[j]);
          ++evals;
        }
      }
    }
  }
  order();
  return {simplex.front(), vals.front()};
}

struct SideResult {
  Separation kind = Separation::unknown;
  std::vector<ProbeLevel> levels;
  double gap = std::numeric_limits<double>::infinity();
};

inline SideResult probe_side(const VectorFieldSpec& v, const Point& center, double dt, const Point& target,
                             const CompletionConfig& cfg, const SeparabilityConfig& sep) {
  const int n = v.dimension();
  const auto dirs = probe_directions(n, sep.directions, sep.seed);
  SideResult res;
  bool any_completed = false;
  bool all_escaped_far = true;
  Point x(static_cast<std::size_t>(n));
  for (double rho : sep.radii) {
    ProbeLevel lvl;
    lvl.radius = rho;
    std::optional<std::size_t> best_dir;
    // Image distance of the probe center + rho * u / |u|; +inf when it does not complete.
    auto image = [&](const Point& u, bool count) {
      const double len = norm(u);
      if (len == 0.0) return std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = center[i] + rho * u[i] / len;
      try {
        if (!v.manifold.contains(x)) return std::numeric_limits<double>::infinity();
      } catch (const EvalError&) {
        return std::numeric_limits<double>::infinity();
      }
      const FlowOutcome o = flow(v, x, dt, cfg.integrator);
      if (count) {
        switch (o.status) {
          case FlowStatus::completed: ++lvl.completed; break;
          case FlowStatus::escaped:
            ++lvl.escaped;
            lvl.max_abs_escape = std::max(lvl.max_abs_escape, std::fabs(o.escape_time));
            break;
          case FlowStatus::inconclusive: ++lvl.inconclusive; break;
        }
      }
      if (!o.completed()) return std::numeric_limits<double>::infinity();
      const double d = distance(o.endpoint, target);
      if (d < lvl.image_distance) {
        lvl.image_distance = d;
        lvl.best_probe = x;
      }
      return d;
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const double d = image(dirs[j], true);
      if (d < best) {
        best = d;
        best_dir = j;
      }
    }
    if (best_dir && n >= 2 && sep.refine_evals > 0) {
      const double spread = std::numbers::pi / static_cast<double>(dirs.size());
      refine_direction([&](const Point& u) { return image(u, false); }, dirs[*best_dir], spread, sep.refine_evals);
    }
    if (lvl.completed > 0) any_completed = true;
    if (lvl.inconclusive > 0) all_escaped_far = false;
    if (lvl.escaped > 0 && lvl.max_abs_escape > std::fabs(dt) - sep.escape_gap) all_escaped_far = false;
    res.levels.push_back(std::move(lvl));
  }

  const auto& L = res.levels;
  if (L.size() >= 3) {
    const double a = L[L.size() - 3].image_distance;
    const double b = L[L.size() - 2].image_distance;
    const double c = L.back().image_distance;
    if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && a >= 2.0 * b && b >= 2.0 * c &&
        c <= sep.merge_tol) {
      res.kind = Separation::non_separable;
      return res;
    }
  }
  const ProbeLevel& last = L.back();
  const bool far_at_smallest = last.image_distance >= 10.0 * sep.merge_tol;
  const bool smallest_decided = last.completed + last.escaped > 0;
  res.gap = last.image_distance;
  if (far_at_smallest && smallest_decided && (any_completed || all_escaped_far)) {
    res.kind = Separation::separated;
  }
  return res;
}

}  // namespace detail

inline SeparabilityVerdict separability_test(const VectorFieldSpec& v, const CompletionPoint& p,
                                             const CompletionPoint& q, const CompletionConfig& cfg = {},
                                             const SeparabilityConfig& sep = {}) {
  SeparabilityVerdict out;
  if (sep.radii.empty()) throw Error("separability: empty radius schedule");
  try {
    if (same_point(v, p, q, cfg)) {
      out.kind = Separation::equal;
      return out;
    }
  } catch (const Undecided& e) {
    out.kind = Separation::unknown;
    out.note = e.what();
    return out;
  }
  const double dt = q.tag() - p.tag();
  auto fwd = detail::probe_side(v, p.x(), dt, q.x(), cfg, sep);
  auto bwd = detail::probe_side(v, q.x(), -dt, p.x(), cfg, sep);
  out.evidence = std::move(fwd.levels);
  out.reverse_evidence = std::move(bwd.levels);
  out.smallest_radius = sep.radii.back();
  out.gap = std::min(fwd.gap, bwd.gap);
  if (fwd.kind == bwd.kind) {
    out.kind = fwd.kind;
  } else {
    out.kind = Separation::unknown;
    out.note = std::string("forward probing says ") + to_string(fwd.kind) + ", reverse says " + to_string(bwd.kind);
  }
  return out;
}

struct InvarianceResult {
  enum class Outcome { confirmed, refuted, unconfirmed };
  Outcome outcome = Outcome::confirmed;
  std::vector<std::pair<double, Separation>> verdicts;

  bool confirmed() const noexcept { return outcome == Outcome::confirmed; }
};

/// Checks that Fl^{X_R}_t keeps the non-separable pair (p, q) non-separable.
/// Unknown verdicts make the result unconfirmed, which is distinct from refuted.
inline InvarianceResult nonseparability_flow_invariance(const VectorFieldSpec& v, const CompletionPoint& p,
                                                        const CompletionPoint& q, std::span<const double> times,
                                                        const CompletionConfig& cfg = {},
                                                        const SeparabilityConfig& sep = {}) {
  if (separability_test(v, p, q, cfg, sep).kind != Separation::non_separable) {
    throw Error("nonseparability_flow_invariance: the pair is not non-separable");
  }
  InvarianceResult r;
  for (double t : times) {
    const auto kind = separability_test(v, complete_flow(p, t), complete_flow(q, t), cfg, sep).kind;
    r.verdicts.emplace_back(t, kind);
    if (kind == Separation::unknown) {
      if (r.outcome == InvarianceResult::Outcome::confirmed) r.outcome = InvarianceResult::Outcome::unconfirmed;
    } else if (kind != Separation::non_separable) {
      r.outcome = InvarianceResult::Outcome::refuted;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Identification report

enum class LocusClass { single, doubled_separated, doubled_nonseparable, unknown };
enum class QuotientDiagnostic { locally_manifold, branching_detected };

inline const char* to_string(LocusClass c) {
  switch (c) {
    case LocusClass::single: return "single";
    case LocusClass::doubled_separated: return "doubled_separated";
    case LocusClass::doubled_nonseparable: return "doubled_nonseparable";
    case LocusClass::unknown: return "unknown";
  }
  return "?";
}

inline const char* to_string(QuotientDiagnostic d) {
  return d == QuotientDiagnostic::locally_manifold ? "locally_manifold" : "branching_detected";
}

struct TagGrid {
  double min = -3.0;
  double max = 3.0;
  double step = 1.0;

  std::vector<double> values() const {
    std::vector<double> out;
    const long n = std::lround((max - min) / step);
    for (long i = 0; i <= n; ++i) out.push_back(min + step * static_cast<double>(i));
    return out;
  }
};

struct ReportConfig {
  TagGrid tags;
  BoxGrid grid;
  CompletionConfig completion;
  SeparabilityConfig separability;
  unsigned jobs = 1;
  /// Ring radius for sheet counting, in grid spacings.
  double ring_spacings = 5.0;
};

/// Local sheet counts on a ring of base points around an identified location.
struct SheetCounts {
  std::vector<int> ring;  // classes over each ring point, counter-clockwise from +x1
  // Counts on the two sides of the locus: the antipodal ring pair most nearly
  // orthogonal to X, or the pair with the largest difference when X vanishes.
  int side_a = 0;
  int side_b = 0;
  bool asymmetric = false;
};

struct ClassPair {
  std::size_t class_a = 0;
  std::size_t class_b = 0;
  TaggedPoint rep_a;
  TaggedPoint rep_b;
  Separation kind = Separation::unknown;
  std::optional<SheetCounts> sheets;
};

struct LocationReport {
  std::size_t node = 0;
  Point x;
  int samples = 0;
  int classes = 0;
  LocusClass classification = LocusClass::single;
  std::vector<ClassPair> pairs;
  std::string note;
};

struct IdentificationReport {
  std::vector<double> tags;
  BoxGrid grid;
  std::size_t samples = 0;
  std::size_t unlocated_samples = 0;  // shadow off the base grid or undefined
  std::size_t total_classes = 0;
  std::vector<LocationReport> locations;  // ordered by grid node
  std::size_t nonseparable_edges = 0;
  QuotientDiagnostic diagnostic = QuotientDiagnostic::locally_manifold;

  std::size_t count(LocusClass c) const {
    return static_cast<std::size_t>(std::count_if(locations.begin(), locations.end(),
                                                  [&](const LocationReport& l) { return l.classification == c; }));
  }
};

namespace detail {

inline std::vector<Point> ring_offsets(int n, double r) {
  std::vector<Point> out;
  if (n == 1) return {{r}, {-r}};
  for (int k = 0; k < 8; ++k) {
    const double th = std::numbers::pi * k / 4.0;
    Point d(static_cast<std::size_t>(n), 0.0);
    // Exact zeros keep axis-aligned offsets on the axes.
    const double c = std::fabs(std::cos(th)) < 1e-12 ? 0.0 : std::cos(th);
    const double sn = std::fabs(std::sin(th)) < 1e-12 ? 0.0 : std::sin(th);
    d[0] = r * c;
    d[1] = r * sn;
    out.push_back(std::move(d));
  }
  return out;
}

// Doubled loci are unions of orbits, so they run along X. The two sides of a
// locus are read off the antipodal ring pair most nearly orthogonal to X (in
// the x1-x2 plane). Returns nullopt when X has no component in that plane.
inline std::optional<std::size_t> transverse_index(const VectorFieldSpec& v, const Point& location,
                                                   const Point& fallback, const std::vector<Point>& ring) {
  if (v.dimension() < 2) return std::nullopt;
  Point f(location.size());
  try {
    v.evaluate(location, f);
  } catch (const EvalError&) {
    try {
      v.evaluate(fallback, f);
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }
  const double fn = std::hypot(f[0], f[1]);
  if (!(fn > 0.0) || !std::isfinite(fn)) return std::nullopt;
  std::optional<std::size_t> best;
  double best_cos = 2.0;
  for (std::size_t k = 0; k < ring.size() / 2; ++k) {
    const double c = std::fabs(ring[k][0] * f[0] + ring[k][1] * f[1]) / (std::hypot(ring[k][0], ring[k][1]) * fn);
    if (c < best_cos - 1e-12) {
      best_cos = c;
      best = k;
    }
  }
  return best;
}

// Number of distinct completion points over base point w: the lifts
// (s, Fl_s(w)) for every tag, merged by same_point.
inline int sheets_over(const VectorFieldSpec& v, const Point& w, std::span<const double> tags,
                       const CompletionConfig& cfg, bool& unknown) {
  std::vector<CompletionPoint> lifts;
  for (double s : tags) {
    Point x = w;
    if (s != 0.0) {
      const FlowOutcome o = ambient_flow(v, w, s, cfg.integrator);
      if (!o.completed()) continue;
      x = o.endpoint;
    }
    try {
      if (!v.manifold.contains(x)) continue;
      // Round-off can leave a lift of an excluded point just inside M.
      if (const auto m = v.manifold.margin_at(x); m && *m <= cfg.match_tol) continue;
    } catch (const EvalError&) {
      continue;
    }
    lifts.push_back(CompletionPoint{TaggedPoint{s, std::move(x)}});
  }
  UnionFind uf(lifts.size());
  for (std::size_t i = 0; i < lifts.size(); ++i) {
    for (std::size_t j = i + 1; j < lifts.size(); ++j) {
      if (uf.same(i, j)) continue;
      try {
        if (same_point(v, lifts[i], lifts[j], cfg)) uf.unite(i, j);
      } catch (const Undecided&) {
        unknown = true;
      }
    }
  }
  return static_cast<int>(uf.sets());
}

}  // namespace detail

/// Builds embed(s, x) for s in the tag grid and x in the base grid, groups them
/// by base location (the tag-0 shadow Fl_{-s}(x) of the ambient flow, snapped
/// to the grid), merges equal points, and probes separability between the
/// distinct classes over each location.
inline IdentificationReport identification_report(const VectorFieldSpec& v, const ReportConfig& rc) {
  IdentificationReport rep;
  rep.tags = rc.tags.values();
  rep.grid = rc.grid;
  const auto& cfg = rc.completion;
  const double h = rc.grid.min_spacing();
  const double snap_tol = 1e-6 * (h > 0.0 ? h : 1.0);

  struct Sample {
    double s;
    Point x;
    std::optional<std::size_t> location;
  };
  std::vector<Sample> samples;
  for (double s : rep.tags) {
    for (std::size_t k = 0; k < rc.grid.size(); ++k) {
      Point x = rc.grid.node(k);
      try {
        if (!v.manifold.contains(x)) continue;
      } catch (const EvalError&) {
        continue;
      }
      samples.push_back({s, std::move(x), std::nullopt});
    }
  }
  rep.samples = samples.size();

  parallel_for(samples.size(), rc.jobs, [&](std::size_t i) {
    Sample& smp = samples[i];
    if (smp.s == 0.0) {
      smp.location = rc.grid.snap(smp.x, snap_tol);
      return;
    }
    const FlowOutcome o = ambient_flow(v, smp.x, -smp.s, cfg.integrator);
    if (o.completed()) smp.location = rc.grid.snap(o.endpoint, snap_tol);
  });

  std::map<std::size_t, std::vector<std::size_t>> by_location;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].location) {
      by_location[*samples[i].location].push_back(i);
    } else {
      ++rep.unlocated_samples;
    }
  }

  // Equal points share a shadow, so merging within each location gives the
  // global classes. Locations are independent; merges are replayed serially.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups(by_location.begin(), by_location.end());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> merges(groups.size());
  std::vector<char> undecided(groups.size(), 0);
  auto as_point = [&](std::size_t i) { return CompletionPoint{TaggedPoint{samples[i].s, samples[i].x}}; };
  parallel_for(groups.size(), rc.jobs, [&](std::size_t g) {
    const auto& members = groups[g].second;
    UnionFind local(members.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (local.same(a, b)) continue;
        try {
          if (same_point(v, as_point(members[a]), as_point(members[b]), cfg)) {
            local.unite(a, b);
            merges[g].emplace_back(members[a], members[b]);
          }
        } catch (const Undecided&) {
          undecided[g] = 1;
        }
      }
    }
  });
  UnionFind uf(samples.size());
  for (const auto& m : merges) {
    for (auto [a, b] : m) uf.unite(a, b);
  }

  // Class ids are numbered by first appearance in sample order.
  std::map<std::size_t, std::size_t> class_id;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].location) continue;
    class_id.try_emplace(uf.find(i), class_id.size());
  }
  rep.total_classes = class_id.size();

  rep.locations.resize(groups.size());
  struct PairJob {
    std::size_t loc;
    std::size_t pair;
  };
  std::vector<PairJob> jobs;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    LocationReport& L = rep.locations[g];
    L.node = groups[g].first;
    L.x = rc.grid.node(L.node);
    L.samples = static_cast<int>(groups[g].second.size());
    // Representative of each class: smallest |s|, then smallest s.
    std::map<std::size_t, std::size_t> reps;
    for (std::size_t i : groups[g].second) {
      const std::size_t c = class_id.at(uf.find(i));
      auto it = reps.find(c);
      if (it == reps.end()) {
        reps.emplace(c, i);
      } else {
        const double s_old = samples[it->second].s;
        const double s_new = samples[i].s;
        if (std::fabs(s_new) < std::fabs(s_old) || (std::fabs(s_new) == std::fabs(s_old) && s_new < s_old)) {
          it->second = i;
        }
      }
    }
    L.classes = static_cast<int>(reps.size());
    if (undecided[g]) L.note = "same_point undecided for some sample pairs";
    for (auto a = reps.begin(); a != reps.end(); ++a) {
      for (auto b = std::next(a); b != reps.end(); ++b) {
        ClassPair cp;
        cp.class_a = a->first;
        cp.class_b = b->first;
        cp.rep_a = TaggedPoint{samples[a->second].s, samples[a->second].x};
        cp.rep_b = TaggedPoint{samples[b->second].s, samples[b->second].x};
        L.pairs.push_back(std::move(cp));
        jobs.push_back({g, L.pairs.size() - 1});
      }
    }
  }

  const auto ring = detail::ring_offsets(v.dimension(), rc.ring_spacings * h);
  parallel_for(jobs.size(), rc.jobs, [&](std::size_t j) {
    LocationReport& L = rep.locations[jobs[j].loc];
    ClassPair& cp = L.pairs[jobs[j].pair];
    cp.kind = separability_test(v, CompletionPoint{cp.rep_a}, CompletionPoint{cp.rep_b}, cfg, rc.separability).kind;
    if (cp.kind != Separation::non_separable) return;
    SheetCounts sc;
    bool unknown = false;
    for (const auto& off : ring) {
      Point w = L.x;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += off[i];
      sc.ring.push_back(detail::sheets_over(v, w, rep.tags, cfg, unknown));
    }
    const std::size_t half = sc.ring.size() / 2;
    if (const auto k = detail::transverse_index(v, L.x, cp.rep_a.x, ring)) {
      sc.side_a = sc.ring[*k + half];
      sc.side_b = sc.ring[*k];
    } else {
      int best_diff = -1;
      for (std::size_t k = 0; k < half; ++k) {
        const int a = sc.ring[k + half];
        const int b = sc.ring[k];
        if (std::abs(a - b) > best_diff) {
          best_diff = std::abs(a - b);
          sc.side_a = a;
          sc.side_b = b;
        }
      }
    }
    sc.asymmetric = sc.side_a != sc.side_b;
    cp.sheets = std::move(sc);
  });

  for (auto& L : rep.locations) {
    bool any_unknown = !L.note.empty();
    bool any_nonsep = false;
    for (const auto& cp : L.pairs) {
      if (cp.kind == Separation::unknown || cp.kind == Separation::equal) any_unknown = true;
      if (cp.kind == Separation::non_separable) {
        any_nonsep = true;
        ++rep.nonseparable_edges;
        if (cp.sheets && cp.sheets->asymmetric) rep.diagnostic = QuotientDiagnostic::branching_detected;
      }
    }
    if (any_unknown) {
      L.classification = LocusClass::unknown;
    } else if (L.classes <= 1) {
      L.classification = LocusClass::single;
    } else {
      L.classification = any_nonsep ? LocusClass::doubled_nonseparable : LocusClass::doubled_separated;
    }
  }
  return rep;
}

}  // namespace flowcomp
