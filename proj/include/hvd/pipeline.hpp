#pragma once

// End-to-end workflow: (i) harvest or load snapshots for the portal pool,
// (ii) per-portal statistics and HVDi tables, (iii) CSC construction from the
// corpus inventory and alignment of the pool's categories, (iv) aggregate
// HVDi and cross-portal reports. Every artifact lands under the output
// directory and is listed in manifest.tsv with its size and SHA-256.
//
// Output layout (relative to the output directory):
//   snapshots/<domain>/<date>.snapshot   online runs only
//   stats.csv  stats_views.csv  distribution.csv  uncategorized.csv
//   hvdi/<domain>.csv  categories/<domain>.csv  top_categories.csv
//   csc.tsv  alignment.tsv  alignment_matrix.csv  coverage.csv
//   aggregate.csv
//   report/<domain>/{distribution,datasets,downloads,mean,median,hvdi,boxplot}.svg
//   report/uncategorized.svg  report/coverage.svg  report/aggregate.svg
//   manifest.tsv

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/categorization.hpp"
#include "hvd/harvester.hpp"
#include "hvd/hvd_index.hpp"

namespace hvd {

struct PipelineConfig {
  std::filesystem::path portals_file;
  std::filesystem::path snapshot_dir;  // read when offline
  std::filesystem::path inventory_file;
  std::filesystem::path wordnet_dir;
  std::uint64_t seed = 0;
  std::size_t top_k = 7;
  std::filesystem::path output_dir;
  bool offline = false;
  HarvestConfig harvest;
  unsigned parallel = 4;
  unsigned threads = 0;  // alignment workers; 0 = hardware concurrency
};

struct ManifestEntry {
  std::string path;  // relative, '/' separated
  std::uintmax_t size = 0;
  std::string sha256;

  bool operator==(const ManifestEntry&) const = default;
};

struct PipelineResult {
  int exit_code = 0;
  std::string failed_phase;  // "i".."iv" when exit_code != 0
  std::string message;
  std::vector<ManifestEntry> manifest;
};

PipelineResult run_pipeline(const PipelineConfig& config);

// --- stage helpers shared with the CLI subcommands --------------------------

// Snapshots listed in the portal file, loaded from `dir`. With an empty
// portal list every snapshot in `dir` is returned. Throws IoError when a
// configured portal has no snapshot.
std::vector<PortalSnapshot> load_pool(const std::filesystem::path& dir,
                                      std::span<const PortalSpec> portals);

std::vector<HvdiTable> rank_pool(std::span<const PortalSnapshot> snapshots);

// Phase ii artifacts.
void write_portal_reports(std::span<const PortalSnapshot> snapshots, std::size_t top_k,
                          const std::filesystem::path& out);

// Phase iii artifacts.
void write_csc_file(const ComprehensiveCategorySet& csc, const std::filesystem::path& path);
void write_alignment_file(const AlignmentMap& alignment, const std::filesystem::path& path);

// Phase iv artifacts.
void write_pool_reports(std::span<const PortalSnapshot> snapshots, const AlignmentMap& alignment,
                        const ComprehensiveCategorySet& csc, const std::filesystem::path& out);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Every regular file under `dir` except manifest.tsv, sorted by path.
std::vector<ManifestEntry> build_manifest(const std::filesystem::path& dir);
std::string format_manifest(std::span<const ManifestEntry> manifest);
std::vector<ManifestEntry> parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& dir);

// HVD_SCOUT_WORDNET, else the bundled copy.
std::filesystem::path default_wordnet_dir();
std::filesystem::path default_data_dir();

}  // namespace hvd
