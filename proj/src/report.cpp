#include "hvd/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "hvd/category_sets.hpp"
#include "hvd/error.hpp"

namespace hvd {

TableFormat parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "text") return TableFormat::text;
  throw InvalidArgument("unknown table format '" + std::string(name) + "' (csv or text)");
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

void check_shape(const Table& t) {
  if (t.columns.empty()) throw InvalidArgument("table has no columns");
  for (const auto& r : t.rows)
    if (r.size() != t.columns.size())
      throw InvalidArgument("table row has " + std::to_string(r.size()) + " cells, expected " +
                            std::to_string(t.columns.size()));
}

std::string count(std::size_t n) { return std::to_string(n); }
std::string count(std::int64_t n) { return std::to_string(n); }

}  // namespace

std::string to_csv(const Table& table) {
  check_shape(table);
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(table.columns);
  for (const auto& r : table.rows) line(r);
  return out;
}

std::string to_text(const Table& table) {
  check_shape(table);
  const std::size_t n = table.columns.size();
  std::vector<std::size_t> width(n, 0);
  std::vector<bool> numeric(n, true);
  for (std::size_t i = 0; i < n; ++i) width[i] = display_width(table.columns[i]);
  for (const auto& r : table.rows)
    for (std::size_t i = 0; i < n; ++i) {
      width[i] = std::max(width[i], display_width(r[i]));
      if (!r[i].empty() && !looks_numeric(r[i])) numeric[i] = false;
    }
  std::string out;
  auto line = [&](const std::vector<std::string>& cells, bool header) {
    std::string l;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) l += "  ";
      const std::string pad(width[i] - display_width(cells[i]), ' ');
      if (numeric[i] && !header) l += pad + cells[i];
      else l += cells[i] + pad;
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + '\n';
  };
  line(table.columns, true);
  std::string rule;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) rule += "  ";
    rule += std::string(width[i], '-');
  }
  out += rule + '\n';
  for (const auto& r : table.rows) line(r, false);
  return out;
}

std::string render_table(const Table& table, TableFormat format) {
  return format == TableFormat::csv ? to_csv(table) : to_text(table);
}

void export_table(const Table& table, TableFormat format, const std::filesystem::path& path) {
  write_text_file(path, render_table(table, format));
}

std::string format_fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (value == 0) value = 0;  // no "-0.000"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  if (ec != std::errc{}) return "inf";
  std::string s(buf, ptr);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

Measure parse_measure(std::string_view name) {
  if (name == "downloads") return Measure::downloads;
  if (name == "views") return Measure::views;
  throw InvalidArgument("unknown measure '" + std::string(name) + "' (downloads or views)");
}

std::vector<std::int64_t> measure_values(const PortalSnapshot& snapshot, Measure measure) {
  std::vector<std::int64_t> v;
  v.reserve(snapshot.size());
  for (const auto& d : snapshot.datasets())
    v.push_back(measure == Measure::downloads ? d.downloads : d.views);
  return v;
}

Table stats_table(std::span<const PortalSnapshot> snapshots, Measure measure) {
  Table t;
  t.columns = {"portal", "domain", "measure", "datasets", "total", "mean", "stddev",
               "min",    "q1",     "median",  "q3",       "p95",   "max"};
  for (const auto& s : snapshots) {
    const char* m = measure == Measure::downloads ? "downloads" : "views";
    if (s.empty()) {
      t.rows.push_back({s.portal().name, s.portal().domain, m, "0", "0", "", "", "", "", "", "", "", ""});
      continue;
    }
    auto st = describe(measure_values(s, measure));
    t.rows.push_back({s.portal().name, s.portal().domain, m, count(st.n), count(st.total),
                      format_fixed(st.mean, 3), format_fixed(st.stddev, 3), count(st.min),
                      format_fixed(st.q1, 3), format_fixed(st.median, 3), format_fixed(st.q3, 3),
                      format_fixed(st.p95, 3), count(st.max)});
  }
  return t;
}

Table distribution_table(std::span<const PortalSnapshot> snapshots) {
  Table t;
  t.columns = {"portal", "domain", "measure", "datasets"};
  for (std::size_t k = 0; k < kDistributionClasses; ++k)
    t.columns.emplace_back(DistributionHistogram::class_label(k));
  for (const auto& s : snapshots)
    for (auto m : {Measure::views, Measure::downloads}) {
      auto h = bin_distribution(measure_values(s, m));
      auto pct = h.percentages();
      std::vector<std::string> row = {s.portal().name, s.portal().domain,
                                      m == Measure::views ? "views" : "downloads", count(h.n)};
      for (double p : pct) row.push_back(format_fixed(p, 2));
      t.rows.push_back(std::move(row));
    }
  return t;
}

Table uncategorized_table(std::span<const PortalSnapshot> snapshots) {
  Table t;
  t.columns = {"portal", "domain", "datasets", "uncategorized", "share"};
  for (const auto& s : snapshots) {
    const auto u = uncategorized_count(s);
    t.rows.push_back({s.portal().name, s.portal().domain, count(s.size()), count(u),
                      s.empty() ? "" : format_fixed(uncategorized_share(s), 6)});
  }
  return t;
}

Table hvdi_table(const HvdiTable& table) {
  Table t;
  t.columns = {"category", "n_datasets", "share", "median", "p95", "hvdi"};
  for (const auto& e : table.entries)
    t.rows.push_back({e.category.raw(), count(e.n_datasets), format_fixed(e.dataset_share, 6),
                      format_fixed(e.median_downloads, 3), format_fixed(e.p95_downloads, 3),
                      format_fixed(e.hvdi, 3)});
  return t;
}

Table top_categories_table(std::span<const HvdiTable> tables, std::size_t k) {
  auto entries_of = [&](const HvdiTable& table) { return top_k(table, k); };
  Table t;
  t.columns = {"portal"};
  for (std::size_t i = 1; i <= k; ++i) t.columns.push_back(std::to_string(i));
  for (const auto& table : tables) {
    std::vector<std::string> row = {table.portal.name};
    for (const auto& e : entries_of(table))
      row.push_back(e.category.raw() + " (" + format_fixed(e.hvdi, 1) + ")");
    row.resize(t.columns.size());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<CategoryMetrics> category_metrics(const PortalSnapshot& snapshot) {
  std::vector<CategoryMetrics> out;
  std::optional<CategoryMetrics> unspecified;
  const auto total = snapshot.size();
  for (const auto& [label, records] : group_by_category(snapshot)) {
    std::vector<std::int64_t> downloads;
    for (const auto& r : records) downloads.push_back(r.downloads);
    CategoryMetrics m;
    m.label = label.is_unspecified() ? std::string(kUnspecifiedLabel) : label.raw();
    m.unspecified = label.is_unspecified();
    m.n_datasets = records.size();
    for (auto d : downloads) m.downloads += d;
    m.mean = static_cast<double>(m.downloads) / static_cast<double>(m.n_datasets);
    m.median = percentile(downloads, 0.5);
    m.hvdi = compute_hvdi(downloads, total).hvdi;
    if (m.unspecified) unspecified = m;
    else out.push_back(std::move(m));
  }
  if (unspecified) out.push_back(*unspecified);
  return out;
}

Table category_metrics_table(std::span<const CategoryMetrics> rows) {
  Table t;
  t.columns = {"category", "unspecified", "n_datasets", "downloads", "mean", "median", "hvdi"};
  for (const auto& r : rows)
    t.rows.push_back({r.label, r.unspecified ? "yes" : "no", count(r.n_datasets), count(r.downloads),
                      format_fixed(r.mean, 3), format_fixed(r.median, 3),
                      r.unspecified ? "" : format_fixed(r.hvdi, 3)});
  return t;
}

Table csc_table(const ComprehensiveCategorySet& csc) {
  Table t;
  t.columns = {"category", "coverage"};
  for (const auto& e : csc.entries()) t.rows.push_back({e.category, count(e.coverage)});
  return t;
}

Table alignment_matrix(const AlignmentMap& alignment, const ComprehensiveCategorySet& csc,
                       std::span<const std::pair<std::string, std::string>> portal_columns) {
  Table t;
  t.columns = {"category"};
  for (const auto& [key, header] : portal_columns) t.columns.push_back(header);
  t.columns.push_back("portals");

  std::map<std::pair<std::string, std::string>, std::vector<std::string>> cells;
  for (const auto& r : alignment.rows)
    if (r.csc_category) cells[{*r.csc_category, r.portal}].push_back(r.category);

  for (const auto& e : csc.entries()) {
    std::vector<std::string> row = {e.category};
    std::size_t covered = 0;
    for (const auto& [key, header] : portal_columns) {
      std::string cell;
      if (auto it = cells.find({e.category, key}); it != cells.end()) {
        ++covered;
        for (std::size_t i = 0; i < it->second.size(); ++i) {
          if (i) cell += "; ";
          cell += it->second[i];
        }
      }
      row.push_back(std::move(cell));
    }
    row.push_back(count(covered));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table aggregate_table(std::span<const AggregateHvdi> aggregate) {
  Table t;
  t.columns = {"category", "hvdi_c", "contributors", "portals"};
  for (const auto& a : aggregate) {
    std::set<std::string> portals;
    for (const auto& c : a.contributing) portals.insert(c.portal);
    t.rows.push_back({a.category, format_fixed(a.hvdi_c, 3), count(a.contributing.size()),
                      count(portals.size())});
  }
  return t;
}

}  // namespace hvd
