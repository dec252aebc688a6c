#pragma once

// Command-line front end. `run` takes the argument list without the program
// name so tests can drive it in-process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowcomp/flowcomp.hpp"
#include "flowcomp/report_io.hpp"

namespace flowcomp::cli {

enum ExitCode : int {
  ok = 0,            // Equal / true / completed query
  inconclusive = 1,  // Inconclusive integration, TargetNotComplete, other runtime failure
  bad_args = 2,
  separated = 3,  // Separated / false / not in chart
  non_separable = 4,
  unknown = 5,
};

namespace detail {

struct Common {
  std::string scenario;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> match_tol;
  std::uint64_t seed = 0;
};

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("scenario", c.scenario, "built-in name or path to a scenario file")->required();
  sub->add_option("--rel-tol", c.rel_tol, "integrator relative tolerance");
  sub->add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance");
  sub->add_option("--match-tol", c.match_tol, "same_point base tolerance");
  sub->add_option("--seed", c.seed, "seed for probe directions");
}

inline Scenario load(const Common& c) {
  Scenario sc = resolve_scenario(c.scenario);
  auto& ic = sc.config.completion.integrator;
  if (c.rel_tol) ic.rel_tol = *c.rel_tol;
  if (c.abs_tol) ic.abs_tol = *c.abs_tol;
  ic.validate();
  if (c.match_tol) sc.config.completion.match_tol = *c.match_tol;
  sc.config.separability.seed = c.seed;
  return sc;
}

inline Point parse_axis_values(const std::string& text, std::size_t n, const char* what) {
  Point v = parse_point(text);
  if (v.size() == 1 && n > 1) v.assign(n, v[0]);
  if (v.size() != n) throw CLI::ValidationError(what, "expected 1 or " + std::to_string(n) + " values");
  return v;
}

inline void print_outcome(std::ostream& out, const FlowOutcome& o) {
  out << "status: " << to_string(o.status) << "\n";
  out << "t_requested: " << flowcomp::detail::format_number(o.t_requested) << "\n";
  out << "t_reached: " << flowcomp::detail::format_number(o.t_reached) << "\n";
  if (o.completed()) out << "endpoint: " << format_point(o.endpoint) << "\n";
  if (o.escaped()) {
    out << "cause: " << to_string(o.cause) << "\n";
    out << "escape_time: " << flowcomp::detail::format_number(o.escape_time) << "\n";
    out << "escape_bracket: [" << flowcomp::detail::format_number(o.escape_bracket.first) << ", "
        << flowcomp::detail::format_number(o.escape_bracket.second) << "]\n";
  }
  out << "steps: " << o.stats.steps << " (rejected " << o.stats.rejected << ")\n";
  if (!o.note.empty()) out << "note: " << o.note << "\n";
}

inline void print_bound(std::ostream& out, const char* name, const WindowBound& b) {
  out << name << ": ";
  switch (b.kind) {
    case WindowBound::Kind::escape: out << flowcomp::detail::format_number(b.value); break;
    case WindowBound::Kind::horizon:
      out << (b.value < 0 ? "-inf" : "+inf") << " (horizon " << flowcomp::detail::format_number(std::fabs(b.value))
          << ")";
      break;
    case WindowBound::Kind::inconclusive:
      out << "inconclusive after " << flowcomp::detail::format_number(b.value);
      break;
  }
  out << "\n";
}

inline int verdict_code(Separation s) {
  switch (s) {
    case Separation::equal: return ok;
    case Separation::separated: return separated;
    case Separation::non_separable: return non_separable;
    case Separation::unknown: return unknown;
  }
  return unknown;
}

inline int tri_code(Tri t) {
  switch (t) {
    case Tri::yes: return ok;
    case Tri::no: return separated;
    case Tri::unknown: return unknown;
  }
  return unknown;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flow completion engine: tagged points, charts, separability and identification reports"};
  app.name("flowcomp");
  app.require_subcommand(1);

  detail::Common common;

  auto* list = app.add_subcommand("list", "list built-in scenarios");

  auto* dump = app.add_subcommand("scenario", "print a scenario as JSON");
  dump->add_option("scenario", common.scenario)->required();

  std::string x0_text;
  double t = 0.0;
  std::optional<std::string> csv_path;
  auto* flow_cmd = app.add_subcommand("flow", "integrate X from x0 for time t");
  detail::add_common(flow_cmd, common);
  flow_cmd->add_option("--x0", x0_text, "initial point x1,...,xn")->required();
  flow_cmd->add_option("--t", t, "signed integration time")->required();
  flow_cmd->add_option("--csv", csv_path, "write samples (t, x1..xn) to this file, '-' for stdout");

  double horizon = 10.0;
  auto* window_cmd = app.add_subcommand("window", "existence window of the trajectory through x0");
  detail::add_common(window_cmd, common);
  window_cmd->add_option("--x0", x0_text, "point x1,...,xn")->required();
  window_cmd->add_option("--horizon", horizon, "search horizon")->capture_default_str();

  std::string p_text, q_text;
  auto* same_cmd = app.add_subcommand("same-point", "whether two tagged points are one point of the completion");
  detail::add_common(same_cmd, common);
  same_cmd->add_option("--p", p_text, "tagged point s:x1,...,xn")->required();
  same_cmd->add_option("--q", q_text, "tagged point s:x1,...,xn")->required();

  auto* sep_cmd = app.add_subcommand("separability", "limit-merge probing of two completion points");
  detail::add_common(sep_cmd, common);
  sep_cmd->add_option("--p", p_text, "tagged point s:x1,...,xn")->required();
  sep_cmd->add_option("--q", q_text, "tagged point s:x1,...,xn")->required();

  bool in_m = false;
  auto* orbit_cmd = app.add_subcommand("orbit", "whether two points lie on one orbit");
  detail::add_common(orbit_cmd, common);
  orbit_cmd->add_option("--p", p_text, "tagged point s:x1,...,xn (or a point of M with --in-m)")->required();
  orbit_cmd->add_option("--q", q_text, "tagged point s:x1,...,xn (or a point of M with --in-m)")->required();
  orbit_cmd->add_flag("--in-m", in_m, "compare X-orbits in M instead of orbits of the completion");
  orbit_cmd->add_option("--horizon", horizon, "search horizon")->capture_default_str();

  double chart_s = 0.0;
  auto* chart_cmd = app.add_subcommand("chart", "coordinates of a completion point in the chart j_s");
  detail::add_common(chart_cmd, common);
  chart_cmd->add_option("--p", p_text, "tagged point s:x1,...,xn")->required();
  chart_cmd->add_option("--chart", chart_s, "chart tag s")->required();

  std::string morphism;
  auto* lift_cmd = app.add_subcommand("lift", "lift an equivariant morphism to the completion");
  detail::add_common(lift_cmd, common);
  lift_cmd->add_option("--morphism", morphism, "morphism name from the scenario")->required();
  lift_cmd->add_option("--p", p_text, "tagged point s:x1,...,xn")->required();

  std::optional<std::string> out_dir, tags_text, lo_text, hi_text;
  std::optional<int> grid_count;
  unsigned jobs = 1;
  auto* report_cmd = app.add_subcommand("report", "identification report over tag and base grids");
  detail::add_common(report_cmd, common);
  report_cmd->add_option("--out", out_dir, "directory for report.txt, classes.csv, edges.csv, loci.svg, trajectories.csv");
  report_cmd->add_option("--tags", tags_text, "tag grid min:max:step");
  report_cmd->add_option("--grid-count", grid_count, "nodes per axis")->check(CLI::PositiveNumber);
  report_cmd->add_option("--lo", lo_text, "lower box corner (one value or one per axis)");
  report_cmd->add_option("--hi", hi_text, "upper box corner (one value or one per axis)");
  report_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return bad_args;
  }

  try {
    if (list->parsed()) {
      for (const auto& n : builtin_names()) out << n << "\n";
      return ok;
    }
    if (dump->parsed()) {
      out << save_scenario(resolve_scenario(common.scenario)).dump(2) << "\n";
      return ok;
    }

    // Argument-shaped failures (scenario schema, literals, points outside M) map to exit 2.
    Scenario sc;
    CompletionPoint p, q;
    try {
      sc = detail::load(common);
      auto tagged = [&](const std::string& text) {
        const TaggedPoint tp = parse_tagged_point(text);
        sc.field.manifold.check_dimension(tp.x);
        return embed(sc.field, tp.s, tp.x);
      };
      if (!p_text.empty() && !(orbit_cmd->parsed() && in_m)) p = tagged(p_text);
      if (!q_text.empty() && !(orbit_cmd->parsed() && in_m)) q = tagged(q_text);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return bad_args;
    } catch (const CLI::ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return bad_args;
    }
    const auto& v = sc.field;
    const auto& cfg = sc.config.completion;

    auto point_arg = [&](const std::string& text) {
      Point x = parse_point(text);
      v.manifold.check_dimension(x);
      if (!v.manifold.contains(x)) throw OutsideDomain("point " + format_point(x) + " is not in M");
      return x;
    };

    if (flow_cmd->parsed() || window_cmd->parsed()) {
      Point x0;
      try {
        x0 = point_arg(x0_text);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
      }
      if (window_cmd->parsed()) {
        const ExistenceWindow w = existence_window(v, x0, horizon, cfg.integrator);
        detail::print_bound(out, "t_minus", w.t_minus);
        detail::print_bound(out, "t_plus", w.t_plus);
        out << "quality: " << to_string(w.quality) << "\n";
        const bool inc = w.t_minus.kind == WindowBound::Kind::inconclusive ||
                         w.t_plus.kind == WindowBound::Kind::inconclusive;
        return inc ? inconclusive : ok;
      }
      const FlowOutcome o = flow(v, x0, t, cfg.integrator);
      if (csv_path && *csv_path == "-") {
        write_samples_csv(out, o.samples, v.dimension());
      } else {
        detail::print_outcome(out, o);
        if (csv_path) {
          std::ofstream f(*csv_path, std::ios::binary);
          if (!f) throw Error("cannot write '" + *csv_path + "'");
          write_samples_csv(f, o.samples, v.dimension());
        }
      }
      return o.status == FlowStatus::inconclusive ? inconclusive : ok;
    }

    if (same_cmd->parsed()) {
      try {
        const bool eq = same_point(v, p, q, cfg);
        out << (eq ? "Equal" : "Distinct") << "\n";
        return eq ? ok : separated;
      } catch (const Undecided& e) {
        out << "Unknown\n";
        err << "note: " << e.what() << "\n";
        return unknown;
      }
    }

    if (sep_cmd->parsed()) {
      const SeparabilityVerdict r = separability_test(v, p, q, cfg, sc.config.separability);
      out << to_string(r.kind) << "\n";
      if (r.kind == Separation::non_separable) {
        out << "# radius, best_probe, image_distance\n";
        for (const auto& lv : r.evidence) {
          out << flowcomp::detail::format_number(lv.radius) << ", " << format_point(lv.best_probe) << ", "
              << flowcomp::detail::format_number(lv.image_distance) << "\n";
        }
      } else if (r.kind == Separation::separated) {
        out << "smallest_radius: " << flowcomp::detail::format_number(r.smallest_radius) << "\n";
        out << "gap: " << flowcomp::detail::format_number(r.gap) << "\n";
      }
      if (!r.note.empty()) out << "note: " << r.note << "\n";
      out << "note: heuristic verdict from limit-merge probing\n";
      return detail::verdict_code(r.kind);
    }

    if (orbit_cmd->parsed()) {
      Tri r;
      if (in_m) {
        Point x, y;
        try {
          x = point_arg(p_text);
          y = point_arg(q_text);
        } catch (const Error& e) {
          err << "error: " << e.what() << "\n";
          return bad_args;
        }
        r = same_orbit_M(v, x, y, horizon, cfg);
      } else {
        CompletionConfig c = cfg;
        c.orbit_horizon = horizon;
        r = same_orbit_completion(v, p, q, c);
      }
      out << to_string(r) << "\n";
      return detail::tri_code(r);
    }

    if (chart_cmd->parsed()) {
      try {
        const Point x = to_chart(v, p, ChartHandle{chart_s}, cfg);
        out << format_point(x) << "\n";
        return ok;
      } catch (const NotInChart& e) {
        out << "NotInChart\n";
        err << "note: " << e.what() << "\n";
        return separated;
      } catch (const Undecided& e) {
        out << "Unknown\n";
        err << "note: " << e.what() << "\n";
        return unknown;
      }
    }

    if (lift_cmd->parsed()) {
      const MorphismSpec* f = nullptr;
      try {
        f = &sc.morphism(morphism);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
      }
      try {
        out << format_point(lift_morphism(*f, p, cfg)) << "\n";
        return ok;
      } catch (const TargetNotComplete& e) {
        out << "TargetNotComplete\n";
        err << "error: " << e.what() << "\n";
        return inconclusive;
      } catch (const Undecided& e) {
        out << "Unknown\n";
        err << "error: " << e.what() << "\n";
        return inconclusive;
      }
    }

    if (report_cmd->parsed()) {
      ReportConfig rc;
      rc.completion = cfg;
      rc.separability = sc.config.separability;
      rc.tags = sc.config.tags;
      rc.grid = sc.config.base_grid;
      rc.jobs = jobs;
      try {
        const std::size_t n = static_cast<std::size_t>(v.dimension());
        if (tags_text) {
          std::string s = *tags_text;
          std::replace(s.begin(), s.end(), ':', ',');
          const Point tv = parse_point(s);
          if (tv.size() != 3 || !(tv[2] > 0.0) || tv[1] < tv[0]) {
            throw CLI::ValidationError("--tags", "expected min:max:step with step > 0 and max >= min");
          }
          rc.tags = TagGrid{tv[0], tv[1], tv[2]};
        }
        if (grid_count) rc.grid.count.assign(n, *grid_count);
        if (lo_text) rc.grid.lo = detail::parse_axis_values(*lo_text, n, "--lo");
        if (hi_text) rc.grid.hi = detail::parse_axis_values(*hi_text, n, "--hi");
        for (std::size_t i = 0; i < n; ++i) {
          if (!(rc.grid.hi[i] > rc.grid.lo[i])) throw CLI::ValidationError("--hi", "must exceed --lo on every axis");
        }
      } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
      }
      const IdentificationReport r = identification_report(v, rc);
      const std::string text = format_report(r, sc.name);
      out << text;
      if (out_dir) {
        namespace fs = std::filesystem;
        const fs::path dir(*out_dir);
        fs::create_directories(dir);
        auto open = [&](const char* name) {
          std::ofstream f(dir / name, std::ios::binary);
          if (!f) throw Error("cannot write '" + (dir / name).string() + "'");
          return f;
        };
        open("report.txt") << text;
        {
          auto f = open("classes.csv");
          write_classes_csv(f, r);
        }
        {
          auto f = open("edges.csv");
          write_edges_csv(f, r);
        }
        open("loci.svg") << report_svg(r);
        {
          auto f = open("trajectories.csv");
          write_trajectories_csv(f, v, rc.grid, rc.tags.max - rc.tags.min, cfg.integrator);
        }
      }
      if (const auto u = r.count(LocusClass::unknown); u > 0) {
        err << "warning: " << u << " locations classified Unknown\n";
      }
      return ok;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return inconclusive;
  }
  return bad_args;
}

}  // namespace flowcomp::cli
