#include "hvd/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hvd/category_sets.hpp"
#include "hvd/error.hpp"
#include "hvd/report.hpp"
#include "hvd/snapshot_io.hpp"
#include "hvd/svg.hpp"
#include "hvd/taxonomy.hpp"

#ifndef HVD_SCOUT_DEFAULT_WORDNET
#define HVD_SCOUT_DEFAULT_WORDNET "third_party/wordnet-3.0"
#endif
#ifndef HVD_SCOUT_DEFAULT_DATA
#define HVD_SCOUT_DEFAULT_DATA "data"
#endif

namespace hvd {

namespace fs = std::filesystem;

fs::path default_wordnet_dir() {
  if (const char* env = std::getenv("HVD_SCOUT_WORDNET"); env && *env) return env;
  return HVD_SCOUT_DEFAULT_WORDNET;
}

fs::path default_data_dir() { return HVD_SCOUT_DEFAULT_DATA; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::vector<ManifestEntry> build_manifest(const fs::path& dir) {
  std::vector<ManifestEntry> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.tsv") continue;
    out.push_back({rel, entry.file_size(), sha256_file(entry.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return out;
}

std::string format_manifest(std::span<const ManifestEntry> manifest) {
  std::string out = "# path\tsize\tsha256\n";
  for (const auto& e : manifest)
    out += escape_field(e.path) + '\t' + std::to_string(e.size) + '\t' + e.sha256 + '\n';
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto f = split_tsv_line(line);
    if (f.size() != 3) throw FormatError("manifest", line_no, "expected path, size, sha256");
    ManifestEntry e;
    e.path = f[0];
    try {
      e.size = std::stoull(f[1]);
    } catch (const std::exception&) {
      throw FormatError("manifest", line_no, "bad size '" + f[1] + "'");
    }
    e.sha256 = f[2];
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const fs::path& dir) {
  auto manifest = build_manifest(dir);
  write_text_file(dir / "manifest.tsv", format_manifest(manifest));
}

std::vector<PortalSnapshot> load_pool(const fs::path& dir, std::span<const PortalSpec> portals) {
  auto all = load_snapshot_dir(dir);
  if (portals.empty()) return all;
  std::map<std::string, PortalSnapshot*> by_domain;
  for (auto& s : all) by_domain.emplace(s.portal().domain, &s);
  std::vector<PortalSnapshot> out;
  for (const auto& p : portals) {
    auto it = by_domain.find(p.domain);
    if (it == by_domain.end())
      throw IoError("no snapshot for portal " + p.domain + " under " + dir.string());
    out.push_back(std::move(*it->second));
  }
  std::sort(out.begin(), out.end(), [](const PortalSnapshot& a, const PortalSnapshot& b) {
    return a.portal().domain < b.portal().domain;
  });
  return out;
}

std::vector<HvdiTable> rank_pool(std::span<const PortalSnapshot> snapshots) {
  std::vector<HvdiTable> tables;
  for (const auto& s : snapshots) tables.push_back(rank_portal(s));
  return tables;
}

void write_portal_reports(std::span<const PortalSnapshot> snapshots, std::size_t top_k,
                          const fs::path& out) {
  export_table(stats_table(snapshots, Measure::downloads), TableFormat::csv, out / "stats.csv");
  export_table(stats_table(snapshots, Measure::views), TableFormat::csv, out / "stats_views.csv");
  export_table(distribution_table(snapshots), TableFormat::csv, out / "distribution.csv");
  export_table(uncategorized_table(snapshots), TableFormat::csv, out / "uncategorized.csv");

  auto tables = rank_pool(snapshots);
  for (const auto& t : tables)
    export_table(hvdi_table(t), TableFormat::csv, out / "hvdi" / (t.portal.domain + ".csv"));
  export_table(top_categories_table(tables, top_k), TableFormat::csv, out / "top_categories.csv");

  std::vector<std::pair<std::string, double>> shares;
  for (const auto& s : snapshots) {
    const auto& domain = s.portal().domain;
    const auto& name = s.portal().name;
    shares.emplace_back(name, s.empty() ? 0.0 : 100.0 * uncategorized_share(s));
    if (s.empty()) continue;

    auto metrics = category_metrics(s);
    export_table(category_metrics_table(metrics), TableFormat::csv,
                 out / "categories" / (domain + ".csv"));

    const fs::path dir = out / "report" / domain;
    std::vector<DistributionSeries> dist = {
        {"Views", bin_distribution(measure_values(s, Measure::views))},
        {"Downloads", bin_distribution(measure_values(s, Measure::downloads))}};
    write_svg(render_distribution(dist, name + ": distribution of views and downloads"),
              dir / "distribution.svg");

    const bool has_named = std::any_of(metrics.begin(), metrics.end(),
                                       [](const CategoryMetrics& m) { return !m.unspecified; });
    write_svg(render_category_bars(metrics, OrderingKey::datasets, name + ": datasets per category", true),
              dir / "datasets.svg");
    if (!has_named) continue;
    write_svg(render_category_bars(metrics, OrderingKey::downloads, name + ": downloads per category"),
              dir / "downloads.svg");
    write_svg(render_category_bars(metrics, OrderingKey::mean, name + ": mean downloads per dataset"),
              dir / "mean.svg");
    write_svg(render_category_bars(metrics, OrderingKey::median, name + ": median downloads"),
              dir / "median.svg");
    write_svg(render_category_bars(metrics, OrderingKey::hvdi, name + ": High-Value Data index"),
              dir / "hvdi.svg");

    std::vector<std::pair<std::string, std::vector<std::int64_t>>> boxes;
    for (const auto& [label, records] : group_by_category(s)) {
      if (label.is_unspecified()) continue;
      std::vector<std::int64_t> v;
      for (const auto& r : records) v.push_back(r.downloads);
      boxes.emplace_back(label.raw(), std::move(v));
    }
    write_svg(render_boxplot(boxes, name + ": downloads per category"), dir / "boxplot.svg");
  }
  std::stable_sort(shares.begin(), shares.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (!shares.empty())
    write_svg(render_ordered_values(shares, "Share of uncategorized datasets (%)", "% uncategorized", false),
              out / "report" / "uncategorized.svg");
}

void write_csc_file(const ComprehensiveCategorySet& csc, const fs::path& path) {
  std::ostringstream ss;
  write_csc(ss, csc);
  write_text_file(path, ss.str());
}

void write_alignment_file(const AlignmentMap& alignment, const fs::path& path) {
  write_text_file(path, serialize_alignment(alignment));
}

void write_pool_reports(std::span<const PortalSnapshot> snapshots, const AlignmentMap& alignment,
                        const ComprehensiveCategorySet& csc, const fs::path& out) {
  validate_alignment(alignment, csc);
  auto tables = rank_pool(snapshots);
  auto aggregate = aggregate_hvdi(tables, alignment, csc);
  export_table(aggregate_table(aggregate), TableFormat::csv, out / "aggregate.csv");

  std::vector<std::pair<std::string, std::string>> columns;
  for (const auto& s : snapshots) columns.emplace_back(s.portal().domain, s.portal().name);
  export_table(alignment_matrix(alignment, csc, columns), TableFormat::csv,
               out / "alignment_matrix.csv");

  auto coverage = alignment_coverage(alignment, csc);
  Table cov;
  cov.columns = {"category", "portals", "aligned"};
  for (const auto& [label, n] : coverage)
    cov.rows.push_back({label, std::to_string(n), n > 0 ? "yes" : "no"});
  export_table(cov, TableFormat::csv, out / "coverage.csv");

  std::stable_sort(coverage.begin(), coverage.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  write_svg(render_coverage(coverage, "Portals covering each CSC category", "portals"),
            out / "report" / "coverage.svg");

  std::vector<std::pair<std::string, double>> values;
  for (const auto& a : aggregate) values.emplace_back(a.category, a.hvdi_c);
  write_svg(render_ordered_values(values, "Aggregate High-Value Data index per category", "HVDi_c", true),
            out / "report" / "aggregate.svg");
}

namespace {

struct PhaseError {
  std::string phase;
  std::string message;
};

template <typename Fn>
void phase(const char* tag, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    throw PhaseError{tag, error_class_name(e) + ": " + e.what()};
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  const fs::path& out = config.output_dir;
  try {
    if (out.empty()) throw PhaseError{"config", "no output directory"};
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw PhaseError{"config", "cannot create " + out.string() + ": " + ec.message()};

    std::vector<PortalSnapshot> snapshots;
    phase("i", [&] {
      std::vector<PortalSpec> portals;
      if (!config.portals_file.empty()) portals = load_portal_config(config.portals_file);
      if (config.offline) {
        if (config.snapshot_dir.empty()) throw InvalidArgument("offline run needs a snapshot directory");
        snapshots = load_pool(config.snapshot_dir, portals);
        return;
      }
      if (portals.empty()) throw InvalidArgument("online run needs a portal file with at least one portal");
      HarvestConfig hc = config.harvest;
      if (!hc.app_token) hc.app_token = app_token_from_env();
      std::string failures;
      for (auto& o : harvest_many(portals, hc, std::max(1u, config.parallel))) {
        if (!o.ok()) {
          failures += (failures.empty() ? "" : "; ") + o.report.portal.domain + ": " + o.message;
          continue;
        }
        store_snapshot(*o.snapshot, out / "snapshots");
        snapshots.push_back(std::move(*o.snapshot));
      }
      if (!failures.empty()) throw NetworkError("harvest failed for " + failures);
      std::sort(snapshots.begin(), snapshots.end(), [](const PortalSnapshot& a, const PortalSnapshot& b) {
        return a.portal().domain < b.portal().domain;
      });
    });
    if (snapshots.empty()) throw PhaseError{"i", "no snapshots in the portal pool"};

    phase("ii", [&] { write_portal_reports(snapshots, config.top_k, out); });

    ComprehensiveCategorySet csc;
    AlignmentMap alignment;
    phase("iii", [&] {
      auto inv = load_inventory(config.inventory_file);
      csc = build_csc(inv);
      write_csc_file(csc, out / "csc.tsv");
      auto taxonomy = Taxonomy::load(config.wordnet_dir.empty() ? default_wordnet_dir()
                                                                : config.wordnet_dir);
      auto sim = SimilarityMetricSet::standard(taxonomy);
      alignment = align(inventory_from_snapshots(snapshots), csc, sim,
                        AlignOptions{config.seed, config.threads});
      write_alignment_file(alignment, out / "alignment.tsv");
    });

    phase("iv", [&] { write_pool_reports(snapshots, alignment, csc, out); });
  } catch (const PhaseError& e) {
    result.exit_code = 1;
    result.failed_phase = e.phase;
    result.message = e.message;
  }
  try {
    write_manifest(out);
    result.manifest = build_manifest(out);
  } catch (const std::exception& e) {
    if (result.exit_code == 0) {
      result.exit_code = 1;
      result.failed_phase = "manifest";
      result.message = e.what();
    }
  }
  return result;
}

}  // namespace hvd
