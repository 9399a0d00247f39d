#pragma once

// Standalone SVG charts, rendered directly from a ChartSpec.
//
// Every drawn bar is a <rect class="bar"> carrying data-row, data-series and
// data-value attributes, so tests and downstream tools can read the chart
// back without pixel measurements. Boxplots use class="box", "median",
// "whisker" and "outlier" elements instead.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hvd/report.hpp"
#include "hvd/stats.hpp"

namespace hvd {

enum class ChartKind { grouped_bars, ordered_bars, boxplot, coverage_bars };

struct BoxStats {
  double p5 = 0, q1 = 0, median = 0, q3 = 0, p95 = 0;
  std::vector<double> outliers;  // values outside [p5, p95]
};

// Throws EmptyCategory for an empty sample.
BoxStats box_stats(std::span<const std::int64_t> values);

struct ChartSpec {
  ChartKind kind = ChartKind::ordered_bars;
  std::string title;
  std::vector<std::string> series;      // grouped_bars: one per bar in a group
  std::vector<std::string> row_labels;  // categories / classes, drawing order
  std::vector<std::vector<double>> values;  // [row][series]; one series otherwise
  std::vector<BoxStats> boxes;              // boxplot only, parallel to row_labels
  std::string x_label;
  std::string y_label;
  bool value_bubbles = false;
  bool log_scale = false;  // boxplot value axis as log10(1 + x)
  std::optional<double> axis_max;  // fixed value-axis maximum (e.g. 100 for %)
  std::filesystem::path output;    // where the caller intends to write it
};

// Pure: equal specs give equal bytes. Throws EmptyData for no rows and
// InvalidArgument when series lengths are inconsistent.
std::string render_svg(const ChartSpec& spec);

void write_svg(const ChartSpec& spec, const std::filesystem::path& path);

std::string xml_escape(std::string_view text);

// --- chart builders ---------------------------------------------------------

struct DistributionSeries {
  std::string label;  // e.g. "Views", "Austin downloads"
  DistributionHistogram histogram;
};

// Grouped bars: five classes on X, percentage of datasets on Y.
ChartSpec render_distribution(std::span<const DistributionSeries> series, std::string title);

enum class OrderingKey { datasets, downloads, mean, median, hvdi };
OrderingKey parse_ordering_key(std::string_view name);  // throws UnknownKey
std::string_view ordering_key_name(OrderingKey key);

// Horizontal bars sorted by `key` descending (ties by label); the
// Unspecified row is dropped unless `include_unspecified` and key is
// datasets. hvdi ordering adds value bubbles.
ChartSpec render_category_bars(std::span<const CategoryMetrics> rows, OrderingKey key,
                               std::string title, bool include_unspecified = false);

// Per-category boxes with p5/p95 whiskers on a log10(1+x) axis.
ChartSpec render_boxplot(std::span<const std::pair<std::string, std::vector<std::int64_t>>> categories,
                         std::string title);

// Horizontal bars of counts in the given order, e.g. portals per category.
ChartSpec render_coverage(std::span<const std::pair<std::string, std::size_t>> counts,
                          std::string title, std::string x_label);

// Horizontal bars with bubbles in the given order.
ChartSpec render_ordered_values(std::span<const std::pair<std::string, double>> values,
                                std::string title, std::string x_label, bool bubbles);

}  // namespace hvd
