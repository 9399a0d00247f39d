#pragma once

// Tabular outputs: a small table model with CSV (RFC 4180) and aligned text
// renderings, plus builders for every table the analysis produces.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/categorization.hpp"
#include "hvd/hvd_index.hpp"
#include "hvd/stats.hpp"

namespace hvd {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

enum class TableFormat { csv, text };

TableFormat parse_table_format(std::string_view name);  // throws InvalidArgument

// CRLF line endings, fields quoted when they contain ',', '"', CR or LF.
std::string to_csv(const Table& table);
// Columns padded to their widest cell (counted in UTF-8 code points);
// numeric-looking cells are right-aligned.
std::string to_text(const Table& table);
std::string render_table(const Table& table, TableFormat format);

// Throws InvalidArgument when the table has no columns or a row has the
// wrong width, IoError when the file cannot be written.
void export_table(const Table& table, TableFormat format, const std::filesystem::path& path);

// Fixed-point with `digits` decimals, independent of locale.
std::string format_fixed(double value, int digits);

enum class Measure { downloads, views };
Measure parse_measure(std::string_view name);  // throws InvalidArgument
std::vector<std::int64_t> measure_values(const PortalSnapshot& snapshot, Measure measure);

// Descriptive statistics, one row per snapshot.
Table stats_table(std::span<const PortalSnapshot> snapshots, Measure measure);

// Five-class distribution, one row per (portal, measure), in percent.
Table distribution_table(std::span<const PortalSnapshot> snapshots);

// Portal totals and uncategorized share.
Table uncategorized_table(std::span<const PortalSnapshot> snapshots);

// category,n_datasets,share,median,p95,hvdi in ranking order.
Table hvdi_table(const HvdiTable& table);

// One row per portal: portal then the top-k category labels with their
// hvdi, e.g. "Public Safety (110.2)". Short rows are padded with "".
Table top_categories_table(std::span<const HvdiTable> tables, std::size_t k);

// Per-category usage metrics of one portal (Unspecified included as the
// last row when present, flagged in the `unspecified` column).
struct CategoryMetrics {
  std::string label;
  bool unspecified = false;
  std::size_t n_datasets = 0;
  std::int64_t downloads = 0;
  double mean = 0;
  double median = 0;
  double hvdi = 0;
};
std::vector<CategoryMetrics> category_metrics(const PortalSnapshot& snapshot);
Table category_metrics_table(std::span<const CategoryMetrics> rows);

Table csc_table(const ComprehensiveCategorySet& csc);

// CSC categories as rows, portals as columns; each cell lists the portal's
// raw labels aligned to that category, joined by "; ". The last column is
// the number of portals covering the category.
Table alignment_matrix(const AlignmentMap& alignment, const ComprehensiveCategorySet& csc,
                       std::span<const std::pair<std::string, std::string>> portal_columns);

Table aggregate_table(std::span<const AggregateHvdi> aggregate);

}  // namespace hvd
