#include "hvd/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hvd/category_sets.hpp"
#include "hvd/error.hpp"
#include "hvd/harvester.hpp"
#include "hvd/pipeline.hpp"
#include "hvd/report.hpp"
#include "hvd/snapshot_io.hpp"
#include "hvd/taxonomy.hpp"

namespace hvd {

namespace fs = std::filesystem;

namespace {

struct HarvestFlags {
  std::size_t page_size = 1000;
  int max_retries = 3;
  int backoff_ms = 500;
  double rate_limit = 4.0;
  int timeout_s = 30;
  std::string scheme = "https";

  void add(CLI::App* cmd) {
    cmd->add_option("--page-size", page_size, "Records per listing request")->check(CLI::PositiveNumber);
    cmd->add_option("--max-retries", max_retries, "Retries after the first failed attempt")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--backoff-ms", backoff_ms, "Base retry backoff in milliseconds")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--rate-limit", rate_limit, "Maximum requests per second")->check(CLI::PositiveNumber);
    cmd->add_option("--timeout", timeout_s, "Request timeout in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--scheme", scheme, "URL scheme")->check(CLI::IsMember({"http", "https"}));
  }

  HarvestConfig config() const {
    HarvestConfig c;
    c.page_size = page_size;
    c.max_retries = max_retries;
    c.base_backoff = std::chrono::milliseconds(backoff_ms);
    c.rate_limit = rate_limit;
    c.timeout = std::chrono::seconds(timeout_s);
    c.scheme = scheme;
    c.app_token = app_token_from_env();
    return c;
  }
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) out << text;
  else write_text_file(out_path, text);
}

fs::path wordnet_or_default(const std::string& flag) {
  return flag.empty() ? default_wordnet_dir() : fs::path(flag);
}

// Snapshots from either a single file or a directory.
std::vector<PortalSnapshot> load_inputs(const std::string& file, const std::string& dir) {
  std::vector<PortalSnapshot> v;
  if (!file.empty()) v.push_back(load_snapshot(file));
  if (!dir.empty())
    for (auto& s : load_snapshot_dir(dir)) v.push_back(std::move(s));
  if (v.empty()) throw InvalidArgument("give --snapshot FILE or --snapshots DIR");
  return v;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hvd-scout: High-Value Dataset identification for open data portals"};
  app.name("hvd-scout");
  app.require_subcommand(1);
  std::function<int()> action;

  // harvest
  auto* harvest = app.add_subcommand("harvest", "Fetch portal metadata into the snapshot store");
  std::string portals_file, out_dir;
  unsigned parallel = 4;
  HarvestFlags hflags;
  harvest->add_option("--portals", portals_file, "Portal configuration file")->required();
  harvest->add_option("--out", out_dir, "Snapshot store directory")->required();
  harvest->add_option("--parallel", parallel, "Portals fetched concurrently")->check(CLI::PositiveNumber);
  hflags.add(harvest);
  harvest->callback([&] {
    action = [&] {
      auto specs = load_portal_config(portals_file);
      auto outcomes = harvest_many(specs, hflags.config(), parallel);
      int rc = 0;
      for (auto& o : outcomes) {
        if (!o.ok()) {
          err << o.report.portal.domain << ": " << o.error_class << ": " << o.message << '\n';
          rc = 1;
          continue;
        }
        auto path = store_snapshot(*o.snapshot, out_dir);
        out << o.report.portal.domain << '\t' << o.report.records << " datasets\t"
            << o.report.pages_fetched << " pages\t" << path.generic_string() << '\n';
        if (o.report.missing_downloads)
          err << o.report.portal.domain << ": " << o.report.missing_downloads
              << " assets without downloadCount recorded as 0\n";
      }
      return rc;
    };
  });

  // stats
  auto* stats = app.add_subcommand("stats", "Descriptive statistics of downloads or views");
  std::string snapshot_file, snapshot_dir, format = "csv", measure = "downloads", out_file;
  stats->add_option("--snapshot", snapshot_file, "Snapshot file");
  stats->add_option("--snapshots", snapshot_dir, "Snapshot directory");
  stats->add_option("--measure", measure, "downloads or views")->check(CLI::IsMember({"downloads", "views"}));
  stats->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  stats->add_option("--out", out_file, "Write to this file instead of stdout");
  stats->callback([&] {
    action = [&] {
      auto snaps = load_inputs(snapshot_file, snapshot_dir);
      emit(render_table(stats_table(snaps, parse_measure(measure)), parse_table_format(format)),
           out_file, out);
      return 0;
    };
  });

  // hvdi
  auto* hvdi = app.add_subcommand("hvdi", "Per-category High-Value Data index of one portal");
  std::size_t top = 0;
  hvdi->add_option("--snapshot", snapshot_file, "Snapshot file")->required();
  hvdi->add_option("--top", top, "Only the first K categories, as one row")->check(CLI::PositiveNumber);
  hvdi->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  hvdi->add_option("--out", out_file, "Write to this file instead of stdout");
  hvdi->callback([&] {
    action = [&] {
      auto table = rank_portal(load_snapshot(snapshot_file));
      Table t = top ? top_categories_table(std::span(&table, 1), top) : hvdi_table(table);
      emit(render_table(t, parse_table_format(format)), out_file, out);
      return 0;
    };
  });

  // csc
  auto* csc = app.add_subcommand("csc", "Comprehensive category set");
  csc->require_subcommand(1);
  auto* csc_build = csc->add_subcommand("build", "Build the CSC from a portal corpus inventory");
  std::string inventory_file, wordnet_dir;
  csc_build->add_option("--inventory", inventory_file, "Inventory TSV (portal, category)")->required();
  csc_build->add_option("--wordnet", wordnet_dir, "WordNet directory (accepted, not needed)");
  csc_build->add_option("--out", out_file, "CSC file to write")->required();
  csc_build->callback([&] {
    action = [&] {
      auto set = build_csc(load_inventory(inventory_file));
      write_csc_file(set, out_file);
      out << set.size() << " categories written to " << out_file << '\n';
      return 0;
    };
  });
  auto* csc_harvest = csc->add_subcommand("harvest-inventory", "Regenerate a corpus inventory online");
  csc_harvest->add_option("--portals", portals_file, "Portal configuration file")->required();
  csc_harvest->add_option("--out", out_file, "Inventory file to write")->required();
  csc_harvest->add_option("--parallel", parallel, "Portals fetched concurrently")->check(CLI::PositiveNumber);
  HarvestFlags iflags;
  iflags.add(csc_harvest);
  csc_harvest->callback([&] {
    action = [&] {
      auto specs = load_portal_config(portals_file);
      std::vector<HarvestOutcome> failed;
      auto inv = harvest_inventory(specs, iflags.config(), parallel, &failed);
      std::ostringstream ss;
      write_inventory(ss, inv);
      write_text_file(out_file, ss.str());
      for (const auto& f : failed)
        err << f.report.portal.domain << ": " << f.error_class << ": " << f.message << '\n';
      return failed.empty() ? 0 : 1;
    };
  });

  // align
  auto* align_cmd = app.add_subcommand("align", "Align portal categories onto the CSC");
  std::string csc_file;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  align_cmd->add_option("--snapshots", snapshot_dir, "Snapshot directory")->required();
  align_cmd->add_option("--csc", csc_file, "CSC file")->required();
  align_cmd->add_option("--wordnet", wordnet_dir, "WordNet directory (default: HVD_SCOUT_WORDNET or bundled)");
  align_cmd->add_option("--seed", seed, "Seed for vote tie breaks");
  align_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  align_cmd->add_option("--out", out_file, "Alignment file to write")->required();
  align_cmd->callback([&] {
    action = [&] {
      auto snaps = load_snapshot_dir(snapshot_dir);
      auto set = load_csc(csc_file);
      auto taxonomy = Taxonomy::load(wordnet_or_default(wordnet_dir));
      auto sim = SimilarityMetricSet::standard(taxonomy);
      auto map = align(inventory_from_snapshots(snaps), set, sim, AlignOptions{seed, threads});
      write_alignment_file(map, out_file);
      std::size_t aligned = 0;
      for (const auto& r : map.rows) aligned += r.aligned();
      out << aligned << " of " << map.rows.size() << " categories aligned\n";
      return 0;
    };
  });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Cross-portal HVDi per CSC category");
  std::string alignment_file;
  aggregate->add_option("--snapshots", snapshot_dir, "Snapshot directory")->required();
  aggregate->add_option("--alignment", alignment_file, "Alignment file")->required();
  aggregate->add_option("--csc", csc_file, "CSC file")->required();
  aggregate->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  aggregate->add_option("--out", out_file, "Write to this file instead of stdout");
  aggregate->callback([&] {
    action = [&] {
      auto snaps = load_snapshot_dir(snapshot_dir);
      auto set = load_csc(csc_file);
      auto map = load_alignment(alignment_file);
      validate_alignment(map, set);
      auto rows = aggregate_hvdi(rank_pool(snaps), map, set);
      emit(render_table(aggregate_table(rows), parse_table_format(format)), out_file, out);
      return 0;
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Write every table and chart for a portal pool");
  std::size_t top_k = 7;
  report->add_option("--snapshots", snapshot_dir, "Snapshot directory")->required();
  report->add_option("--alignment", alignment_file, "Alignment file (with --csc)");
  report->add_option("--csc", csc_file, "CSC file (with --alignment)");
  report->add_option("--top", top_k, "Categories per portal in top_categories.csv")->check(CLI::PositiveNumber);
  report->add_option("--out", out_dir, "Output directory")->required();
  report->callback([&] {
    action = [&] {
      if (alignment_file.empty() != csc_file.empty())
        throw InvalidArgument("--alignment and --csc go together");
      auto snaps = load_snapshot_dir(snapshot_dir);
      write_portal_reports(snaps, top_k, out_dir);
      if (!csc_file.empty()) {
        auto set = load_csc(csc_file);
        write_csc_file(set, fs::path(out_dir) / "csc.tsv");
        auto map = load_alignment(alignment_file);
        write_alignment_file(map, fs::path(out_dir) / "alignment.tsv");
        write_pool_reports(snaps, map, set, out_dir);
      }
      out << "reports written to " << out_dir << '\n';
      return 0;
    };
  });

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run all four phases");
  PipelineConfig pc;
  std::string p_portals, p_snapshots, p_inventory, p_wordnet, p_out;
  HarvestFlags pflags;
  pipeline->add_option("--portals", p_portals, "Portal configuration file");
  pipeline->add_option("--snapshots", p_snapshots, "Snapshot directory (offline input)");
  pipeline->add_option("--inventory", p_inventory, "Corpus inventory TSV")->required();
  pipeline->add_option("--wordnet", p_wordnet, "WordNet directory");
  pipeline->add_option("--seed", pc.seed, "Seed for vote tie breaks");
  pipeline->add_option("--top", pc.top_k, "Categories per portal in top_categories.csv")
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--threads", pc.threads, "Alignment worker threads (0 = all cores)");
  pipeline->add_option("--parallel", pc.parallel, "Portals harvested concurrently")->check(CLI::PositiveNumber);
  pipeline->add_option("--out", p_out, "Output directory")->required();
  pipeline->add_flag("--offline", pc.offline, "Never touch the network; read --snapshots");
  pflags.add(pipeline);
  pipeline->callback([&] {
    action = [&] {
      pc.portals_file = p_portals;
      pc.snapshot_dir = p_snapshots;
      pc.inventory_file = p_inventory;
      pc.wordnet_dir = wordnet_or_default(p_wordnet);
      pc.output_dir = p_out;
      pc.harvest = pflags.config();
      auto result = run_pipeline(pc);
      if (result.exit_code != 0) {
        err << "phase " << result.failed_phase << ": " << result.message << '\n';
        return result.exit_code;
      }
      out << result.manifest.size() << " artifacts written to " << p_out << '\n';
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (!action) {
    err << app.help();
    return 2;
  }
  try {
    return action();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << error_class_name(e) << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hvd
