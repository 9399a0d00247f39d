#pragma once

// On-disk formats owned by the harvester: snapshot files, the snapshot store
// layout and the portal configuration file.
//
// Snapshot file: UTF-8, one JSON object per line. The first line is the
// header {"format","domain","name","population","engine","retrieved_at"};
// every following line is a dataset with keys id, title, category (nullable),
// views, downloads, created_at (nullable). Keys are written in sorted order.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hvd/catalog.hpp"

namespace hvd {

inline constexpr std::string_view kSnapshotFormat = "hvd-scout-snapshot/1";
inline constexpr std::string_view kSnapshotExtension = ".snapshot";

std::string serialize_snapshot(const PortalSnapshot& snapshot);
void write_snapshot(std::ostream& out, const PortalSnapshot& snapshot);

// `source` names the stream in FormatError messages.
PortalSnapshot read_snapshot(std::istream& in, const std::string& source);

// Throws IoError when the file cannot be written.
void save_snapshot(const PortalSnapshot& snapshot, const std::filesystem::path& path);
// Throws IoError (unreadable) or FormatError (malformed line, with line number).
PortalSnapshot load_snapshot(const std::filesystem::path& path);

// Store layout: {root}/{domain}/{YYYY-MM-DD}.snapshot. A second harvest on
// the same day is written as {YYYY-MM-DD}.2.snapshot and so on; existing
// files are never replaced. Returns the path written.
std::filesystem::path store_snapshot(const PortalSnapshot& snapshot,
                                     const std::filesystem::path& root);

// Loads every *.snapshot file below `dir` and keeps the most recent snapshot
// per domain (latest retrieved_at, then latest file name). Result is sorted
// by domain.
std::vector<PortalSnapshot> load_snapshot_dir(const std::filesystem::path& dir);

// Portal configuration: one portal per line, "name, domain, population".
// Blank lines and '#' comments are ignored.
std::vector<PortalSpec> parse_portal_config(std::istream& in, const std::string& source);
std::vector<PortalSpec> load_portal_config(const std::filesystem::path& path);

}  // namespace hvd
