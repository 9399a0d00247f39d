#include "hvd/snapshot_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "hvd/error.hpp"
#include "json.hpp"

namespace hvd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_string(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false); }

const json& require(const json& obj, const char* key, const std::string& source,
                    std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(source, line, std::string("missing '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& source,
                           std::size_t line) {
  const auto& v = require(obj, key, source, line);
  if (!v.is_string()) throw FormatError(source, line, std::string("'") + key + "' is not a string");
  return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key, const std::string& source,
                           std::size_t line) {
  const auto& v = require(obj, key, source, line);
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX))
      throw FormatError(source, line, std::string("'") + key + "' overflows");
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) {
    auto i = v.get<std::int64_t>();
    if (i < 0) throw FormatError(source, line, std::string("'") + key + "' is negative");
    return i;
  }
  throw FormatError(source, line, std::string("'") + key + "' is not an integer");
}

std::optional<std::string> optional_string_field(const json& obj, const char* key,
                                                 const std::string& source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw FormatError(source, line, std::string("'") + key + "' is not a string or null");
  return it->get<std::string>();
}

std::string snapshot_date(const PortalSnapshot& snapshot) {
  const auto& ts = snapshot.retrieved_at();
  if (ts.size() >= 10) return ts.substr(0, 10);
  return "undated";
}

}  // namespace

void write_snapshot(std::ostream& out, const PortalSnapshot& snapshot) {
  json header = {
      {"format", kSnapshotFormat},
      {"domain", snapshot.portal().domain},
      {"name", snapshot.portal().name},
      {"population", snapshot.portal().population},
      {"engine", engine_name(snapshot.portal().engine)},
      {"retrieved_at", snapshot.retrieved_at()},
  };
  out << dump_line(header) << '\n';
  for (const auto& d : snapshot.datasets()) {
    json rec = {
        {"id", d.id},
        {"title", d.title},
        {"category", optional_string(d.category)},
        {"views", d.views},
        {"downloads", d.downloads},
        {"created_at", optional_string(d.created_at)},
    };
    out << dump_line(rec) << '\n';
  }
}

std::string serialize_snapshot(const PortalSnapshot& snapshot) {
  std::ostringstream out;
  write_snapshot(out, snapshot);
  return out.str();
}

PortalSnapshot read_snapshot(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PortalSpec> portal;
  std::string retrieved_at;
  std::vector<DatasetRecord> datasets;
  std::unordered_set<std::string> ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw FormatError(source, line_no, "line is not a JSON object");

    if (!portal) {
      auto format = require_string(obj, "format", source, line_no);
      if (format != kSnapshotFormat)
        throw FormatError(source, line_no, "unsupported snapshot format '" + format + "'");
      PortalSpec spec;
      spec.domain = require_string(obj, "domain", source, line_no);
      spec.name = optional_string_field(obj, "name", source, line_no).value_or(spec.domain);
      if (obj.contains("population"))
        spec.population = require_count(obj, "population", source, line_no);
      if (auto engine = optional_string_field(obj, "engine", source, line_no)) {
        try {
          spec.engine = parse_engine(*engine);
        } catch (const InvalidArgument& e) {
          throw FormatError(source, line_no, e.what());
        }
      }
      if (!is_valid_domain(spec.domain))
        throw FormatError(source, line_no, "invalid domain '" + spec.domain + "'");
      retrieved_at = require_string(obj, "retrieved_at", source, line_no);
      portal = std::move(spec);
      continue;
    }

    DatasetRecord rec;
    rec.id = require_string(obj, "id", source, line_no);
    rec.title = optional_string_field(obj, "title", source, line_no).value_or("");
    rec.category = optional_string_field(obj, "category", source, line_no);
    rec.views = require_count(obj, "views", source, line_no);
    rec.downloads = require_count(obj, "downloads", source, line_no);
    rec.created_at = optional_string_field(obj, "created_at", source, line_no);
    if (!ids.insert(rec.id).second)
      throw FormatError(source, line_no, "duplicate dataset id '" + rec.id + "'");
    datasets.push_back(std::move(rec));
  }
  if (!portal) throw FormatError(source, line_no == 0 ? 1 : line_no, "missing header line");
  return PortalSnapshot(std::move(*portal), std::move(retrieved_at), std::move(datasets));
}

void save_snapshot(const PortalSnapshot& snapshot, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open snapshot for writing: " + path.string());
  write_snapshot(out, snapshot);
  out.flush();
  if (!out) throw IoError("failed writing snapshot: " + path.string());
}

PortalSnapshot load_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path.string());
  return read_snapshot(in, path.string());
}

fs::path store_snapshot(const PortalSnapshot& snapshot, const fs::path& root) {
  const fs::path dir = root / snapshot.portal().domain;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create snapshot directory " + dir.string() + ": " + ec.message());
  const std::string date = snapshot_date(snapshot);
  fs::path path = dir / (date + std::string(kSnapshotExtension));
  for (int n = 2; fs::exists(path); ++n)
    path = dir / (date + "." + std::to_string(n) + std::string(kSnapshotExtension));
  save_snapshot(snapshot, path);
  return path;
}

std::vector<PortalSnapshot> load_snapshot_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("snapshot directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kSnapshotExtension)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Latest {
    PortalSnapshot snapshot;
    std::string file_key;
  };
  std::map<std::string, Latest> by_domain;
  for (const auto& file : files) {
    auto snap = load_snapshot(file);
    auto key = file.filename().string();
    auto domain = snap.portal().domain;
    auto it = by_domain.find(domain);
    if (it == by_domain.end()) {
      by_domain.emplace(domain, Latest{std::move(snap), key});
      continue;
    }
    const auto& cur = it->second;
    if (std::pair(snap.retrieved_at(), key) > std::pair(cur.snapshot.retrieved_at(), cur.file_key))
      it->second = Latest{std::move(snap), key};
  }
  std::vector<PortalSnapshot> out;
  out.reserve(by_domain.size());
  for (auto& [domain, latest] : by_domain) out.push_back(std::move(latest.snapshot));
  return out;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<PortalSpec> parse_portal_config(std::istream& in, const std::string& source) {
  std::vector<PortalSpec> portals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3)
      throw FormatError(source, line_no, "expected 'name, domain, population'");
    PortalSpec spec;
    spec.name = fields[0];
    spec.domain = fields[1];
    try {
      std::size_t used = 0;
      spec.population = std::stoll(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(source, line_no, "population is not an integer: '" + fields[2] + "'");
    }
    if (spec.name.empty()) throw FormatError(source, line_no, "empty portal name");
    try {
      validate(spec);
    } catch (const InvalidArgument& e) {
      throw FormatError(source, line_no, e.what());
    }
    portals.push_back(std::move(spec));
  }
  return portals;
}

std::vector<PortalSpec> load_portal_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open portal config: " + path.string());
  return parse_portal_config(in, path.string());
}

}  // namespace hvd
