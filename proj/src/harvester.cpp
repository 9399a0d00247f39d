#include "hvd/harvester.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "hvd/error.hpp"
#include "json.hpp"

namespace hvd {

using nlohmann::json;

void HarvestConfig::validate() const {
  if (page_size < 1) throw InvalidArgument("page_size must be >= 1");
  if (max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
  if (!(rate_limit > 0) || !std::isfinite(rate_limit))
    throw InvalidArgument("rate_limit must be a positive number");
  if (base_backoff.count() < 0) throw InvalidArgument("base_backoff must be >= 0");
  if (timeout.count() <= 0) throw InvalidArgument("timeout must be > 0");
  if (scheme != "http" && scheme != "https") throw InvalidArgument("scheme must be http or https");
}

std::optional<std::string> app_token_from_env() {
  const char* v = std::getenv(std::string(kAppTokenEnv).c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (!(requests_per_second > 0)) throw InvalidArgument("rate limit must be > 0");
  interval_ = std::chrono::nanoseconds(
      static_cast<std::int64_t>(std::ceil(1e9 / requests_per_second)));
}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(std::chrono::steady_clock::now(), next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

std::string error_class_name(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const EmptyInput*>(&e)) return "EmptyInput";
  if (dynamic_cast<const QOutOfRange*>(&e)) return "QOutOfRange";
  if (dynamic_cast<const NegativeValue*>(&e)) return "NegativeValue";
  if (dynamic_cast<const EmptySnapshot*>(&e)) return "EmptySnapshot";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const NetworkError*>(&e)) return "NetworkError";
  if (dynamic_cast<const PortalError*>(&e)) return "PortalError";
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const MissingFile*>(&e)) return "MissingFile";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const CycleDetected*>(&e)) return "CycleDetected";
  if (dynamic_cast<const UnknownSynset*>(&e)) return "UnknownSynset";
  if (dynamic_cast<const UnknownMetric*>(&e)) return "UnknownMetric";
  if (dynamic_cast<const EmptyAfterTokenization*>(&e)) return "EmptyAfterTokenization";
  if (dynamic_cast<const EmptyInventory*>(&e)) return "EmptyInventory";
  if (dynamic_cast<const EmptyCategory*>(&e)) return "EmptyCategory";
  if (dynamic_cast<const InvalidTotal*>(&e)) return "InvalidTotal";
  if (dynamic_cast<const EmptyPool*>(&e)) return "EmptyPool";
  if (dynamic_cast<const DanglingAlignment*>(&e)) return "DanglingAlignment";
  if (dynamic_cast<const EmptyData*>(&e)) return "EmptyData";
  if (dynamic_cast<const UnknownKey*>(&e)) return "UnknownKey";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "std::exception";
}

namespace {

std::int64_t counter(const json& asset, const char* key, std::size_t& missing,
                     const std::string& id) {
  auto it = asset.find(key);
  if (it == asset.end() || it->is_null()) {
    ++missing;
    return 0;
  }
  if (it->is_number_unsigned()) return static_cast<std::int64_t>(it->get<std::uint64_t>());
  if (it->is_number_integer()) {
    auto v = it->get<std::int64_t>();
    if (v < 0) throw SchemaError(std::string(key) + " is negative for asset " + id);
    return v;
  }
  throw SchemaError(std::string(key) + " is not an integer for asset " + id);
}

bool is_dataset(const json& asset) {
  if (auto it = asset.find("assetType"); it != asset.end() && it->is_string())
    return it->get<std::string>() == "dataset";
  // Older listings omit assetType: source tables are tabular, table-displayed
  // and not derived from another view.
  if (asset.contains("modifyingViewUid")) return false;
  if (auto it = asset.find("viewType"); it != asset.end() && it->is_string() &&
                                         it->get<std::string>() != "tabular")
    return false;
  if (auto it = asset.find("displayType"); it != asset.end() && it->is_string() &&
                                            it->get<std::string>() != "table")
    return false;
  return true;
}

}  // namespace

std::vector<DatasetRecord> parse_views_page(std::string_view body, HarvestReport& report) {
  json page;
  try {
    page = json::parse(body);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("listing is not valid JSON: ") + e.what());
  }
  if (!page.is_array()) throw SchemaError("listing page is not a JSON array");
  std::vector<DatasetRecord> out;
  for (const auto& asset : page) {
    if (!asset.is_object()) throw SchemaError("listing entry is not an object");
    auto id_it = asset.find("id");
    if (id_it == asset.end() || !id_it->is_string() || id_it->get<std::string>().empty())
      throw SchemaError("listing entry without a string id");
    if (!is_dataset(asset)) {
      ++report.skipped_assets;
      continue;
    }
    DatasetRecord rec;
    rec.id = id_it->get<std::string>();
    if (auto it = asset.find("name"); it != asset.end() && it->is_string())
      rec.title = it->get<std::string>();
    if (auto it = asset.find("category"); it != asset.end() && it->is_string() &&
                                          !it->get<std::string>().empty())
      rec.category = it->get<std::string>();
    rec.views = counter(asset, "viewCount", report.missing_views, rec.id);
    rec.downloads = counter(asset, "downloadCount", report.missing_downloads, rec.id);
    if (auto it = asset.find("createdAt"); it != asset.end() && it->is_number_integer())
      rec.created_at = format_utc(std::chrono::system_clock::time_point(
          std::chrono::seconds(it->get<std::int64_t>())));
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string fetch_page(httplib::Client& client, const std::string& path,
                       const httplib::Headers& headers, const HarvestConfig& config,
                       RateLimiter& limiter, std::size_t page, HarvestReport& report) {
  const int attempts = 1 + config.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config.base_backoff * (1LL << (attempt - 1)));
    limiter.acquire();
    auto res = client.Get(path, headers);
    const bool last = attempt + 1 == attempts;
    if (!res) {
      std::string detail = httplib::to_string(res.error());
      report.failures.push_back({page, attempt, "NetworkError", detail});
      if (last)
        throw NetworkError(report.portal.domain + ": " + detail + " after " +
                           std::to_string(attempts) + " attempts");
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    report.failures.push_back({page, attempt, "PortalError", "HTTP " + std::to_string(res->status)});
    if (last || !retryable_status(res->status))
      throw PortalError(res->status, report.portal.domain + " " + path);
  }
  throw NetworkError("unreachable");
}

}  // namespace

PortalSnapshot harvest_portal(const PortalSpec& spec, const HarvestConfig& config,
                              HarvestReport* report_out, RateLimiter* limiter) {
  validate(spec);
  config.validate();
  if (spec.engine != Engine::socrata) throw InvalidArgument("unsupported engine");

  HarvestReport local;
  HarvestReport& report = report_out ? *report_out : local;
  report = HarvestReport{};
  report.portal = spec;
  const auto started = std::chrono::steady_clock::now();
  const std::string retrieved_at = utc_now();

  RateLimiter own(config.rate_limit);
  RateLimiter& rl = limiter ? *limiter : own;

  httplib::Client client(config.scheme + "://" + spec.domain);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  httplib::Headers headers = {{"Accept", "application/json"}};
  if (config.app_token) headers.emplace("X-App-Token", *config.app_token);

  std::vector<DatasetRecord> datasets;
  std::unordered_set<std::string> seen;
  for (std::size_t page = 1;; ++page) {
    const std::string path =
        "/api/views?limit=" + std::to_string(config.page_size) + "&page=" + std::to_string(page);
    const std::string body = fetch_page(client, path, headers, config, rl, page, report);
    // Count raw listing size before filtering: a short page ends the listing
    // even when every asset on it was filtered out.
    json raw;
    try {
      raw = json::parse(body);
    } catch (const json::parse_error& e) {
      throw SchemaError(spec.domain + " page " + std::to_string(page) + ": " + e.what());
    }
    if (!raw.is_array()) throw SchemaError(spec.domain + ": listing page is not a JSON array");
    const std::size_t listed = raw.size();
    if (listed == 0) break;
    ++report.pages_fetched;
    for (auto& rec : parse_views_page(body, report)) {
      if (!seen.insert(rec.id).second) {
        ++report.duplicate_ids;
        continue;
      }
      datasets.push_back(std::move(rec));
    }
    if (listed < config.page_size) break;
  }

  PortalSnapshot snapshot(spec, retrieved_at, std::move(datasets));
  report.records = snapshot.size();
  report.duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return snapshot;
}

std::vector<HarvestOutcome> harvest_many(std::span<const PortalSpec> specs,
                                         const HarvestConfig& config, unsigned parallelism) {
  if (parallelism == 0) throw InvalidArgument("parallelism must be >= 1");
  config.validate();
  std::vector<HarvestOutcome> out(specs.size());
  if (specs.empty()) return out;

  RateLimiter limiter(config.rate_limit);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
      auto& o = out[i];
      o.report.portal = specs[i];
      try {
        o.snapshot = harvest_portal(specs[i], config, &o.report, &limiter);
      } catch (const std::exception& e) {
        o.error = std::current_exception();
        o.error_class = error_class_name(e);
        o.message = e.what();
      }
    }
  };
  const unsigned n = std::min<unsigned>(parallelism, static_cast<unsigned>(specs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

PortalCategoryInventory harvest_inventory(std::span<const PortalSpec> specs,
                                          const HarvestConfig& config, unsigned parallelism,
                                          std::vector<HarvestOutcome>* failed) {
  PortalCategoryInventory inv;
  for (auto& o : harvest_many(specs, config, parallelism)) {
    if (!o.ok()) {
      if (failed) failed->push_back(std::move(o));
      continue;
    }
    auto& labels = inv[o.snapshot->portal().name];
    for (const auto& d : o.snapshot->datasets())
      if (d.category) labels.insert(*d.category);
  }
  return inv;
}

}  // namespace hvd
