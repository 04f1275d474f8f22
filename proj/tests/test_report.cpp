#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace smc;
using namespace smc::testing;

namespace {

std::size_t occurrences(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(ReportCsv, ParsesBothKinds) {
  const auto c = parse_report_csv("leaves,df,loglik,c_lo,c_hi\n2,2,0,0,2.4\n1,1,-5.5,2.4,inf\n");
  EXPECT_EQ(c.kind, CsvKind::Champions);
  ASSERT_EQ(c.rows.size(), 2u);
  EXPECT_TRUE(std::isinf(c.rows[1][4]));
  const auto b = parse_report_csv("pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3\n0,1,2,100,0.1,0.2,0.3\n");
  EXPECT_EQ(b.kind, CsvKind::Bootstrap);
  EXPECT_EQ(b.rows[0][3], 100);
}

TEST(ReportCsv, RejectsMalformedInput) {
  EXPECT_THROW(parse_report_csv(""), DomainError);
  EXPECT_THROW(parse_report_csv("a,b\n"), DomainError);
  EXPECT_THROW(parse_report_csv("leaves,df,loglik,c_lo,c_hi\n1,2,3\n"), DomainError);
  EXPECT_THROW(parse_report_csv("leaves,df,loglik,c_lo,c_hi\n1,2,x,0,1\n"), DomainError);
  EXPECT_THROW(parse_report_csv("leaves,df,loglik,c_lo,c_hi\n1,2,3,0,\n"), DomainError);
}

TEST(Svg, ChampionCurve) {
  const auto trie = CountTrie::build(simulate(make_paper_model(), 20000, 1), 5, 4);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::PaperSum);
  const auto svg = render_svg(parse_report_csv(champions_csv(set)));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(occurrences(svg, "<polyline"), 1u);
  EXPECT_EQ(occurrences(svg, "<circle"), set.size());
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, BootstrapBoxes) {
  const std::string csv =
      "pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3\n"
      "0,1,2,100,0.1,0.2,0.3\n0,1,2,200,0.1,0.15,0.2\n0,1,2,300,0.05,0.1,0.12\n"
      "1,2,4,100,0.01,0.02,0.03\n1,2,4,200,0.0,0.01,0.02\n1,2,4,300,0.0,0.0,0.01\n";
  const auto svg = render_svg(parse_report_csv(csv));
  EXPECT_EQ(occurrences(svg, "<rect class=\"box\""), 6u);
  EXPECT_EQ(occurrences(svg, "class=\"median\""), 6u);
}

TEST(Svg, EmptyBodyDrawsAxesOnly) {
  for (const char* header : {"leaves,df,loglik,c_lo,c_hi\n", "pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3\n"}) {
    const auto svg = render_svg(parse_report_csv(header));
    EXPECT_EQ(occurrences(svg, "class=\"axis\""), 2u);
    EXPECT_EQ(occurrences(svg, "<polyline"), 0u);
    EXPECT_EQ(occurrences(svg, "<circle"), 0u);
    EXPECT_EQ(occurrences(svg, "class=\"box\""), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(v)), v);
}
