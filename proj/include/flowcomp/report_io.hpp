#pragma once

// Serialization of identification reports and trajectories: structured text,
// CSV (RFC 4180 quoting) and a static SVG sketch of the doubled loci.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flowcomp/scenarios.hpp"
#include "flowcomp/separability.hpp"

namespace flowcomp {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

inline std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

/// t, x1..xn per sample; header row included.
inline void write_samples_csv(std::ostream& os, const std::vector<FlowSample>& samples, int n) {
  std::vector<std::string> header{"t"};
  for (auto& c : coordinate_names(n)) header.push_back(c);
  write_csv_row(os, header);
  for (const auto& s : samples) {
    std::vector<std::string> row{detail::format_number(s.t)};
    for (double c : s.x) row.push_back(detail::format_number(c));
    write_csv_row(os, row);
  }
}

namespace detail {

// Report text rounds to 10 significant digits so grid round-off stays out of it.
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::string(buf) == "-0" ? "0" : buf;
}

inline std::string short_point(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += short_number(x[i]);
  }
  return out + ")";
}

inline std::string short_tagged(const TaggedPoint& p) {
  std::string out = short_number(p.s) + ":";
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (i) out += ",";
    out += short_number(p.x[i]);
  }
  return out;
}

inline std::string axis_text(const BoxGrid& g) {
  std::string box, counts;
  for (std::size_t i = 0; i < g.count.size(); ++i) {
    if (i) {
      box += " x ";
      counts += " x ";
    }
    box += "[" + format_number(g.lo[i]) + ", " + format_number(g.hi[i]) + "]";
    counts += std::to_string(g.count[i]);
  }
  return box + ", " + counts + " nodes";
}

inline std::string sheets_text(const ClassPair& cp) {
  if (!cp.sheets) return "-";
  return std::to_string(cp.sheets->side_a) + "/" + std::to_string(cp.sheets->side_b);
}

}  // namespace detail

/// Human-readable report. Deterministic for fixed inputs, so it is pinned by golden files.
inline std::string format_report(const IdentificationReport& r, std::string_view scenario) {
  std::ostringstream os;
  os << "identification report\n";
  os << "scenario: " << scenario << "\n";
  os << "tags: " << r.tags.size() << " values";
  if (!r.tags.empty()) {
    os << " from " << detail::format_number(r.tags.front()) << " to " << detail::format_number(r.tags.back());
  }
  os << "\n";
  os << "base grid: " << detail::axis_text(r.grid) << "\n";
  os << "samples: " << r.samples << " (unlocated " << r.unlocated_samples << ")\n";
  os << "classes: " << r.total_classes << "\n";
  os << "locations: " << r.locations.size() << "\n";
  for (auto c : {LocusClass::single, LocusClass::doubled_separated, LocusClass::doubled_nonseparable,
                 LocusClass::unknown}) {
    os << "  " << to_string(c) << ": " << r.count(c) << "\n";
  }
  os << "nonseparable edges: " << r.nonseparable_edges << "\n";
  os << "quotient diagnostic: " << to_string(r.diagnostic) << "\n";
  os << "note: separability verdicts are heuristic (limit-merge probing), not certificates\n";
  if (r.diagnostic == QuotientDiagnostic::branching_detected) {
    os << "note: sheet counts differ across a non-separable locus, so the Hausdorff quotient is not a manifold "
          "there; alternative manifold quotients are not computed\n";
  }
  os << "\n";
  os << "# location | classes | classification | pairs (rep_a ~ rep_b: verdict, sheets)\n";
  for (const auto& L : r.locations) {
    if (L.classification == LocusClass::single) continue;
    os << detail::short_point(L.x) << " | " << L.classes << " | " << to_string(L.classification) << " |";
    for (std::size_t i = 0; i < L.pairs.size(); ++i) {
      const auto& cp = L.pairs[i];
      os << (i ? "; " : " ") << detail::short_tagged(cp.rep_a) << " ~ " << detail::short_tagged(cp.rep_b) << ": "
         << to_string(cp.kind) << ", " << detail::sheets_text(cp);
    }
    if (!L.note.empty()) os << " (" << L.note << ")";
    os << "\n";
  }
  return os.str();
}

inline void write_classes_csv(std::ostream& os, const IdentificationReport& r) {
  const int n = static_cast<int>(r.grid.count.size());
  std::vector<std::string> header{"node"};
  for (auto& c : coordinate_names(n)) header.push_back(c);
  for (const char* c : {"samples", "classes", "classification", "note"}) header.emplace_back(c);
  write_csv_row(os, header);
  for (const auto& L : r.locations) {
    std::vector<std::string> row{std::to_string(L.node)};
    for (double c : L.x) row.push_back(detail::format_number(c));
    row.push_back(std::to_string(L.samples));
    row.push_back(std::to_string(L.classes));
    row.emplace_back(to_string(L.classification));
    row.push_back(L.note);
    write_csv_row(os, row);
  }
}

inline void write_edges_csv(std::ostream& os, const IdentificationReport& r) {
  const int n = static_cast<int>(r.grid.count.size());
  std::vector<std::string> header;
  for (auto& c : coordinate_names(n)) header.push_back(c);
  for (const char* c : {"class_a", "class_b", "rep_a", "rep_b", "verdict", "sheets_a", "sheets_b"}) {
    header.emplace_back(c);
  }
  write_csv_row(os, header);
  for (const auto& L : r.locations) {
    for (const auto& cp : L.pairs) {
      std::vector<std::string> row;
      for (double c : L.x) row.push_back(detail::format_number(c));
      row.push_back(std::to_string(cp.class_a));
      row.push_back(std::to_string(cp.class_b));
      row.push_back(format_tagged_point(cp.rep_a));
      row.push_back(format_tagged_point(cp.rep_b));
      row.emplace_back(to_string(cp.kind));
      row.push_back(cp.sheets ? std::to_string(cp.sheets->side_a) : "");
      row.push_back(cp.sheets ? std::to_string(cp.sheets->side_b) : "");
      write_csv_row(os, row);
    }
  }
}

/// SVG 1.1 sketch over the first two base coordinates: one dot per location,
/// colored by classification, and a segment between the chart coordinates of
/// each non-separable pair.
inline std::string report_svg(const IdentificationReport& r) {
  constexpr double size = 480.0;
  constexpr double pad = 20.0;
  const auto& g = r.grid;
  const bool two_d = g.count.size() >= 2;
  auto sx = [&](double x) {
    const double w = g.hi[0] - g.lo[0];
    return pad + (w > 0.0 ? (x - g.lo[0]) / w : 0.5) * (size - 2 * pad);
  };
  auto sy = [&](double y) {
    if (!two_d) return size / 2;
    const double w = g.hi[1] - g.lo[1];
    return size - pad - (w > 0.0 ? (y - g.lo[1]) / w : 0.5) * (size - 2 * pad);
  };
  auto color = [](LocusClass c) {
    switch (c) {
      case LocusClass::single: return "#c8c8c8";
      case LocusClass::doubled_separated: return "#2b7bba";
      case LocusClass::doubled_nonseparable: return "#d7301f";
      case LocusClass::unknown: return "#f0a030";
    }
    return "#000000";
  };
  const double h = g.min_spacing();
  const double dot = std::clamp(0.3 * (h > 0.0 ? h / (g.hi[0] - g.lo[0]) : 0.01) * (size - 2 * pad), 1.0, 6.0);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  os << "<g stroke=\"#d7301f\" stroke-opacity=\"0.15\" stroke-width=\"0.5\">\n";
  for (const auto& L : r.locations) {
    for (const auto& cp : L.pairs) {
      if (cp.kind != Separation::non_separable) continue;
      const double ya = two_d ? cp.rep_a.x[1] : 0.0;
      const double yb = two_d ? cp.rep_b.x[1] : 0.0;
      os << "<line x1=\"" << sx(cp.rep_a.x[0]) << "\" y1=\"" << sy(ya) << "\" x2=\"" << sx(cp.rep_b.x[0])
         << "\" y2=\"" << sy(yb) << "\"/>\n";
    }
  }
  os << "</g>\n<g>\n";
  for (const auto& L : r.locations) {
    os << "<circle cx=\"" << sx(L.x[0]) << "\" cy=\"" << sy(two_d ? L.x[1] : 0.0) << "\" r=\"" << dot
       << "\" fill=\"" << color(L.classification) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

/// Dense trajectories through a few base nodes on the lower x1 face, resampled
/// uniformly; columns t, x1..xn, trajectory.
inline void write_trajectories_csv(std::ostream& os, const VectorFieldSpec& v, const BoxGrid& g, double duration,
                                   const IntegratorConfig& cfg, int max_lines = 9, int points = 101) {
  std::vector<std::string> header{"t"};
  for (auto& c : coordinate_names(v.dimension())) header.push_back(c);
  header.emplace_back("trajectory");
  write_csv_row(os, header);
  std::vector<Point> starts;
  const std::size_t stride = static_cast<std::size_t>(g.count[0]);
  for (std::size_t k = 0; k < g.size(); k += stride) {
    Point x = g.node(k);
    try {
      if (v.manifold.contains(x)) starts.push_back(std::move(x));
    } catch (const EvalError&) {
    }
  }
  if (static_cast<int>(starts.size()) > max_lines) {
    std::vector<Point> picked;
    for (int i = 0; i < max_lines; ++i) {
      picked.push_back(starts[static_cast<std::size_t>(i) * (starts.size() - 1) / static_cast<std::size_t>(max_lines - 1)]);
    }
    starts = std::move(picked);
  }
  for (std::size_t id = 0; id < starts.size(); ++id) {
    auto [o, dense] = flow_dense(v, starts[id], duration, cfg);
    const double t_end = o.completed() ? o.t_requested : o.escape_bracket.first;
    for (int i = 0; i < points; ++i) {
      const double t = t_end * i / (points - 1);
      const Point x = dense.empty() ? starts[id] : dense.at(t);
      std::vector<std::string> row{detail::format_number(t)};
      for (double c : x) row.push_back(detail::format_number(c));
      row.push_back(std::to_string(id));
      write_csv_row(os, row);
    }
  }
}

}  // namespace flowcomp
