#include <gtest/gtest.h>

#include <cmath>

#include "hvd/error.hpp"
#include "hvd/hvd_index.hpp"
#include "hvd/report.hpp"
#include "hvd/svg.hpp"
#include "test_support.hpp"

using namespace hvd;
using testing_support::Element;
using testing_support::num;
using testing_support::record;
using testing_support::snapshot;
using testing_support::with_class;

namespace {

std::vector<Element> parse_ok(const std::string& svg) {
  std::vector<Element> els;
  EXPECT_TRUE(testing_support::parse_xml(svg, els)) << svg.substr(0, 400);
  EXPECT_FALSE(els.empty());
  if (!els.empty()) {
    EXPECT_EQ(els[0].name, "svg");
    EXPECT_TRUE(els[0].attrs.count("width"));
    EXPECT_TRUE(els[0].attrs.count("height"));
  }
  return els;
}

std::vector<std::string> bar_rows(const std::vector<Element>& els) {
  std::vector<std::string> out;
  for (const auto& b : with_class(els, "bar")) out.push_back(b.attrs.at("data-row"));
  return out;
}

// Three categories for which each ordering key gives a different order,
// plus uncategorized datasets that would otherwise dominate.
PortalSnapshot ordering_fixture() {
  std::vector<DatasetRecord> recs;
  int id = 0;
  auto add = [&](std::optional<std::string> cat, std::vector<std::int64_t> downloads) {
    for (auto d : downloads) recs.push_back(record("r" + std::to_string(id++), cat, d));
  };
  add("Alpha", {500, 1});
  add("Bravo", {100, 100, 500, 5, 50});
  add("Charlie", {0, 1000, 50, 5});
  add(std::nullopt, {90000, 90000, 90000, 90000, 90000, 90000});
  return snapshot(recs);
}

}  // namespace

TEST(Csv, QuotesAndCrlf) {
  Table t{{"a", "b"}, {{"plain", "has,comma"}, {"say \"hi\"", "two\nlines"}}};
  EXPECT_EQ(to_csv(t), "a,b\r\nplain,\"has,comma\"\r\n\"say \"\"hi\"\"\",\"two\nlines\"\r\n");
  Table empty{{"category", "n_datasets"}, {}};
  EXPECT_EQ(to_csv(empty), "category,n_datasets\r\n");
}

TEST(Csv, ShapeErrors) {
  EXPECT_THROW(to_csv(Table{}), InvalidArgument);
  EXPECT_THROW(to_csv(Table{{"a", "b"}, {{"only one"}}}), InvalidArgument);
}

TEST(Text, AlignsColumns) {
  Table t{{"name", "value"}, {{"Économie", "5"}, {"ab", "123.5"}}};
  EXPECT_EQ(to_text(t),
            "name      value\n"
            "--------  -----\n"
            "Économie      5\n"
            "ab        123.5\n");
}

TEST(Formats, ParseNames) {
  EXPECT_EQ(parse_table_format("csv"), TableFormat::csv);
  EXPECT_EQ(parse_table_format("text"), TableFormat::text);
  EXPECT_THROW(parse_table_format("xml"), InvalidArgument);
  EXPECT_EQ(parse_measure("views"), Measure::views);
  EXPECT_THROW(parse_measure("likes"), InvalidArgument);
  EXPECT_EQ(format_fixed(17.2, 3), "17.200");
  EXPECT_EQ(format_fixed(-0.0001, 2), "0.00");
}

TEST(Tables, StatsRow) {
  auto snap = snapshot({record("1", "A", 1), record("2", "A", 2), record("3", "B", 3),
                        record("4", std::nullopt, 4), record("5", "C", 5)});
  std::vector<PortalSnapshot> snaps{snap};
  auto t = stats_table(snaps, Measure::downloads);
  ASSERT_EQ(t.rows.size(), 1u);
  const auto& r = t.rows[0];
  EXPECT_EQ(t.columns[5], "mean");
  EXPECT_EQ(r[3], "5");
  EXPECT_EQ(r[4], "15");
  EXPECT_EQ(r[5], "3.000");
  EXPECT_EQ(r[7], "1");
  EXPECT_EQ(r[8], "2.000");
  EXPECT_EQ(r[11], "4.800");
  EXPECT_EQ(r[12], "5");
}

TEST(Tables, HvdiSchemaAndValues) {
  auto table = rank_portal(snapshot({record("1", "A", 10), record("2", "A", 20), record("3", "A", 30),
                                     record("4", "A", 40), record("5", "A", 100), record("6", std::nullopt, 0),
                                     record("7", "B", 0), record("8", "B", 0), record("9", "B", 0),
                                     record("10", "B", 0)}));
  auto t = hvdi_table(table);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"category", "n_datasets", "share", "median", "p95", "hvdi"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"A", "5", "0.500000", "30.000", "88.000", "17.200"}));
  EXPECT_EQ(to_csv(t).substr(0, 44), "category,n_datasets,share,median,p95,hvdi\r\nA");
}

TEST(Tables, TopCategoriesPadsShortRows) {
  auto a = rank_portal(snapshot({record("1", "A", 10), record("2", "B", 5)}, "a.org"));
  auto b = rank_portal(snapshot({record("1", "Z", 1)}, "b.org"));
  std::vector<HvdiTable> tables{a, b};
  auto t = top_categories_table(tables, 3);
  ASSERT_EQ(t.columns.size(), 4u);
  EXPECT_EQ(t.rows[0][1], "A (5.2)");
  EXPECT_EQ(t.rows[1][2], "");
}

TEST(Tables, CategoryMetricsPutsUnspecifiedLast) {
  auto rows = category_metrics(ordering_fixture());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows.back().unspecified);
  EXPECT_EQ(rows.back().n_datasets, 6u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) EXPECT_FALSE(rows[i].unspecified);
}

TEST(Tables, AlignmentMatrixShape) {
  ComprehensiveCategorySet csc({{"Parks", 2}, {"Zoning", 1}});
  AlignmentMap map;
  AlignmentRow r1;
  r1.portal = "a.org";
  r1.category = "Parks & Recreation";
  r1.csc_category = "Parks";
  r1.tally = {{"Parks", 6}};
  AlignmentRow r2 = r1;
  r2.category = "Parks";
  AlignmentRow r3 = r1;
  r3.portal = "b.org";
  map.rows = {r2, r1, r3};
  std::vector<std::pair<std::string, std::string>> cols{{"a.org", "Alpha"}, {"b.org", "Beta"}};
  auto t = alignment_matrix(map, csc, cols);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"category", "Alpha", "Beta", "portals"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"Parks", "Parks; Parks & Recreation", "Parks & Recreation", "2"}));
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"Zoning", "", "", "0"}));
}

TEST(Svg, DistributionSingleClassFullHeight) {
  std::vector<std::int64_t> v(10, 50);
  std::vector<DistributionSeries> series{{"Views", bin_distribution(v)}, {"Downloads", bin_distribution(v)}};
  auto els = parse_ok(render_svg(render_distribution(series, "Distribution")));
  auto bars = with_class(els, "bar");
  ASSERT_EQ(bars.size(), 10u);
  double full = 0;
  for (const auto& b : bars) {
    if (b.attrs.at("data-row") == "10-100") {
      EXPECT_EQ(num(b, "data-value"), 100.0);
      full = std::max(full, num(b, "height"));
    } else {
      EXPECT_EQ(num(b, "data-value"), 0.0);
      EXPECT_EQ(num(b, "height"), 0.0);
    }
  }
  EXPECT_GT(full, 0.0);
}

TEST(Svg, DistributionPercentagesSumPerSeriesAndScaleWithHeight) {
  std::vector<std::int64_t> a{0, 5, 10, 99, 100, 10000, 20000, 3};
  std::vector<std::int64_t> b{1000, 1001, 5, 7};
  std::vector<DistributionSeries> series{{"Austin", bin_distribution(a)}, {"Boston", bin_distribution(b)}};
  auto els = parse_ok(render_svg(render_distribution(series, "Two portals")));
  auto bars = with_class(els, "bar");
  ASSERT_EQ(bars.size(), 10u);
  std::map<std::string, double> sums;
  double ratio = -1;
  for (const auto& bar : bars) {
    sums[bar.attrs.at("data-series")] += num(bar, "data-value");
    if (num(bar, "data-value") > 0) {
      const double r = num(bar, "height") / num(bar, "data-value");
      if (ratio < 0) ratio = r;
      EXPECT_NEAR(r, ratio, ratio * 1e-3);
    }
  }
  EXPECT_NEAR(sums["Austin"], 100.0, 1e-6);
  EXPECT_NEAR(sums["Boston"], 100.0, 1e-6);
}

TEST(Svg, CategoryBarsFiveDistinctOrderings) {
  auto rows = category_metrics(ordering_fixture());
  using V = std::vector<std::string>;
  const std::map<OrderingKey, V> expected{
      {OrderingKey::datasets, {"Bravo", "Charlie", "Alpha"}},
      {OrderingKey::downloads, {"Charlie", "Bravo", "Alpha"}},
      {OrderingKey::mean, {"Charlie", "Alpha", "Bravo"}},
      {OrderingKey::median, {"Alpha", "Bravo", "Charlie"}},
      {OrderingKey::hvdi, {"Bravo", "Alpha", "Charlie"}}};
  std::set<V> distinct;
  for (const auto& [key, order] : expected) {
    auto spec = render_category_bars(rows, key, "By " + std::string(ordering_key_name(key)));
    EXPECT_EQ(spec.row_labels, order) << ordering_key_name(key);
    auto els = parse_ok(render_svg(spec));
    EXPECT_EQ(bar_rows(els), order);
    EXPECT_EQ(with_class(els, "bubble").size(), key == OrderingKey::hvdi ? 3u : 0u);
    distinct.insert(order);
  }
  EXPECT_EQ(distinct.size(), 5u);
  auto with_unspecified = render_category_bars(rows, OrderingKey::datasets, "t", true);
  EXPECT_EQ(with_unspecified.row_labels.front(), "Unspecified");
  auto hvdi_with = render_category_bars(rows, OrderingKey::hvdi, "t", true);
  EXPECT_EQ(hvdi_with.row_labels.size(), 3u);
}

TEST(Svg, SingleCategorySingleBar) {
  auto rows = category_metrics(snapshot({record("1", "Only", 4)}));
  auto els = parse_ok(render_svg(render_category_bars(rows, OrderingKey::median, "one")));
  EXPECT_EQ(with_class(els, "bar").size(), 1u);
}

TEST(Svg, BarLengthsAreAffineInData) {
  std::vector<std::pair<std::string, double>> values{{"a", 10}, {"b", 25}, {"c", 40}};
  auto doubled = values;
  for (auto& [_, v] : doubled) v *= 2;
  auto one = with_class(parse_ok(render_svg(render_ordered_values(values, "x", "v", false))), "bar");
  auto two = with_class(parse_ok(render_svg(render_ordered_values(doubled, "x", "v", false))), "bar");
  ASSERT_EQ(one.size(), 3u);
  ASSERT_EQ(two.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(num(one[i], "width") / num(one[0], "width"), values[i].second / values[0].second, 1e-3);
    EXPECT_NEAR(num(two[i], "width") / num(two[0], "width"), values[i].second / values[0].second, 1e-3);
    EXPECT_EQ(num(two[i], "data-value"), 2 * num(one[i], "data-value"));
  }
}

TEST(Svg, BoxplotOutlierBeyondWhisker) {
  std::vector<std::int64_t> v{0, 0, 0, 0, 1000};
  auto b = box_stats(v);
  EXPECT_NEAR(b.p95, 800, 1e-9);
  EXPECT_EQ(b.outliers, std::vector<double>{1000});
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> cats{{"Skewed", v}, {"Flat", {7, 7, 7}}};
  auto els = parse_ok(render_svg(render_boxplot(cats, "Downloads")));
  auto outliers = with_class(els, "outlier");
  ASSERT_EQ(outliers.size(), 1u);
  EXPECT_EQ(outliers[0].attrs.at("data-row"), "Skewed");
  EXPECT_EQ(num(outliers[0], "data-value"), 1000);
  EXPECT_EQ(with_class(els, "box").size(), 2u);
  EXPECT_EQ(with_class(els, "median").size(), 2u);
  auto flat = box_stats(std::vector<std::int64_t>{7, 7, 7});
  EXPECT_EQ(flat.p5, 7);
  EXPECT_EQ(flat.q1, 7);
  EXPECT_EQ(flat.p95, 7);
  EXPECT_TRUE(flat.outliers.empty());
  EXPECT_THROW(box_stats(std::vector<std::int64_t>{}), EmptyCategory);
}

TEST(Svg, PureAndEscaped) {
  std::vector<std::pair<std::string, std::size_t>> counts{{"Parks & <Rec>", 3}, {"\"Quoted\"", 1}};
  auto spec = render_coverage(counts, "Coverage & more", "portals");
  auto a = render_svg(spec);
  EXPECT_EQ(a, render_svg(spec));
  auto els = parse_ok(a);
  EXPECT_EQ(bar_rows(els), (std::vector<std::string>{"Parks &amp; &lt;Rec&gt;", "&quot;Quoted&quot;"}));
}

TEST(Svg, Errors) {
  ChartSpec empty;
  EXPECT_THROW(render_svg(empty), EmptyData);
  ChartSpec bad;
  bad.row_labels = {"a", "b"};
  bad.values = {{1}};
  EXPECT_THROW(render_svg(bad), InvalidArgument);
  EXPECT_THROW(parse_ordering_key("popularity"), UnknownKey);
  EXPECT_EQ(parse_ordering_key("hvdi"), OrderingKey::hvdi);
}
