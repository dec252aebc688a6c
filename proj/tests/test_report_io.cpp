#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "flowcomp/report_io.hpp"

using namespace flowcomp;

namespace {

std::vector<std::string> lines_of(const std::string& s, const char* eol = "\r\n") {
  std::vector<std::string> out;
  std::size_t pos = 0;
  const std::string sep(eol);
  while (pos < s.size()) {
    const auto e = s.find(sep, pos);
    if (e == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, e - pos));
    pos = e + sep.size();
  }
  return out;
}

std::size_t occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + needle.size())) ++n;
  return n;
}

// Two locations on a 3x3 grid, one of them a non-separable pair.
IdentificationReport handmade() {
  IdentificationReport r;
  r.tags = {-1.0, 0.0, 1.0};
  r.grid = BoxGrid{{-1.0, -1.0}, {1.0, 1.0}, {3, 3}};
  r.samples = 27;
  r.unlocated_samples = 2;
  r.total_classes = 10;
  LocationReport a;
  a.node = 3;
  a.x = {-1.0, 0.0};
  a.samples = 3;
  a.classes = 1;
  LocationReport b;
  b.node = 4;
  b.x = {0.0, 0.0};
  b.samples = 3;
  b.classes = 2;
  b.classification = LocusClass::doubled_nonseparable;
  ClassPair cp;
  cp.class_a = 4;
  cp.class_b = 7;
  cp.rep_a = TaggedPoint{-1.0, {-1.0, 0.0}};
  cp.rep_b = TaggedPoint{1.0, {1.0, 0.0}};
  cp.kind = Separation::non_separable;
  cp.sheets = SheetCounts{{1, 1, 1, 1, 1, 1, 1, 1}, 1, 1, false};
  b.pairs.push_back(cp);
  b.note = "edge, of grid";
  r.locations = {a, b};
  r.nonseparable_edges = 1;
  return r;
}

}  // namespace

TEST(Csv, FieldsNeedingQuotesAreQuoted) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field(""), "");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_field("cr\r"), "\"cr\r\"");
}

TEST(Csv, RowsEndWithCrlf) {
  std::ostringstream os;
  write_csv_row(os, {"a", "b,c", "d"});
  EXPECT_EQ(os.str(), "a,\"b,c\",d\r\n");
}

TEST(Csv, SamplesHaveHeaderAndOneRowEach) {
  std::ostringstream os;
  write_samples_csv(os, {{0.0, {1.0, 2.0}}, {0.5, {1.5, -2.0}}}, 2);
  const auto rows = lines_of(os.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "t,x1,x2");
  EXPECT_EQ(rows[1], "0,1,2");
  EXPECT_EQ(rows[2], "0.5,1.5,-2");
}

TEST(Csv, ClassesTableListsEveryLocation) {
  std::ostringstream os;
  write_classes_csv(os, handmade());
  const auto rows = lines_of(os.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "node,x1,x2,samples,classes,classification,note");
  EXPECT_EQ(rows[1], "3,-1,0,3,1,single,");
  EXPECT_EQ(rows[2], "4,0,0,3,2,doubled_nonseparable,\"edge, of grid\"");
}

TEST(Csv, EdgesTableQuotesTaggedPoints) {
  std::ostringstream os;
  write_edges_csv(os, handmade());
  const auto rows = lines_of(os.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "x1,x2,class_a,class_b,rep_a,rep_b,verdict,sheets_a,sheets_b");
  EXPECT_EQ(rows[1], "0,0,4,7,\"-1:-1,0\",\"1:1,0\",NonSeparable,1,1");
}

TEST(ReportText, HeaderAndPairLines) {
  const auto text = format_report(handmade(), "demo");
  const auto rows = lines_of(text, "\n");
  ASSERT_GE(rows.size(), 4u);
  EXPECT_EQ(rows[0], "identification report");
  EXPECT_EQ(rows[1], "scenario: demo");
  EXPECT_EQ(rows[2], "tags: 3 values from -1 to 1");
  EXPECT_EQ(rows[3], "base grid: [-1, 1] x [-1, 1], 3 x 3 nodes");
  EXPECT_NE(text.find("samples: 27 (unlocated 2)"), std::string::npos);
  EXPECT_NE(text.find("  doubled_nonseparable: 1\n"), std::string::npos);
  EXPECT_NE(text.find("quotient diagnostic: locally_manifold"), std::string::npos);
  EXPECT_NE(text.find("(0, 0) | 2 | doubled_nonseparable | -1:-1,0 ~ 1:1,0: NonSeparable, 1/1 (edge, of grid)"),
            std::string::npos);
  // single locations are left out of the listing
  EXPECT_EQ(text.find("(-1, 0) |"), std::string::npos);
}

TEST(ReportText, BranchingAddsNote) {
  auto r = handmade();
  EXPECT_EQ(format_report(r, "x").find("not a manifold"), std::string::npos);
  r.diagnostic = QuotientDiagnostic::branching_detected;
  EXPECT_NE(format_report(r, "x").find("not a manifold"), std::string::npos);
}

TEST(Svg, WellFormedWithOneDotPerLocation) {
  const auto svg = report_svg(handmade());
  EXPECT_EQ(svg.rfind("<?xml version=\"1.0\"", 0), 0u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""), std::string::npos);
  EXPECT_EQ(occurrences(svg, "<circle"), 2u);
  EXPECT_EQ(occurrences(svg, "<line"), 1u);
  EXPECT_EQ(occurrences(svg, "<g"), occurrences(svg, "</g>"));
  EXPECT_NE(svg.find("</svg>\n"), std::string::npos);
  EXPECT_NE(svg.find("#d7301f\"/>"), std::string::npos);
}

TEST(Svg, OneDimensionalGridIsDrawnOnAMidline) {
  IdentificationReport r;
  r.grid = BoxGrid{{-1.0}, {1.0}, {5}};
  for (int i = 0; i < 5; ++i) {
    LocationReport L;
    L.node = static_cast<std::size_t>(i);
    L.x = {-1.0 + 0.5 * i};
    r.locations.push_back(L);
  }
  const auto svg = report_svg(r);
  EXPECT_EQ(occurrences(svg, "<circle"), 5u);
  EXPECT_EQ(occurrences(svg, "cy=\"240\""), 5u);
}

TEST(Trajectories, HeaderAndRowCount) {
  const auto sc = builtin("rotation2d");
  const BoxGrid g{{-1.0, -1.0}, {1.0, 1.0}, {3, 3}};
  std::ostringstream os;
  write_trajectories_csv(os, sc.field, g, 1.0, sc.config.completion.integrator, 9, 11);
  const auto rows = lines_of(os.str());
  EXPECT_EQ(rows[0], "t,x1,x2,trajectory");
  // one start per x1 face row
  EXPECT_EQ(rows.size(), 1u + 3u * 11u);
  EXPECT_EQ(rows[1], "0,-1,-1,0");
  EXPECT_EQ(rows.back().substr(0, 2), "1,");
}

TEST(Trajectories, EscapingLinesStopAtTheEscapeTime) {
  const auto sc = builtin("blowup1d");
  const BoxGrid g{{1.0}, {1.0}, {1}};
  std::ostringstream os;
  write_trajectories_csv(os, sc.field, g, 5.0, sc.config.completion.integrator, 9, 5);
  const auto rows = lines_of(os.str());
  ASSERT_EQ(rows.size(), 6u);
  const double t_last = std::stod(rows.back().substr(0, rows.back().find(',')));
  EXPECT_NEAR(t_last, 1.0, 1e-6);
}
