#pragma once

// Socrata metadata harvester.
//
// Pages through https://{domain}/api/views?limit={page_size}&page={n}
// (pages numbered from 1) until a short or empty page, keeping only
// dataset assets. Every request passes through a rate limiter shared by all
// portals of one harvest; failed requests (network errors, HTTP 429 and 5xx)
// are retried with exponential backoff.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/categorization.hpp"

namespace hvd {

inline constexpr std::string_view kAppTokenEnv = "HVD_SCOUT_APP_TOKEN";

struct HarvestConfig {
  std::size_t page_size = 1000;
  int max_retries = 3;  // extra attempts after the first
  std::chrono::milliseconds base_backoff{500};
  double rate_limit = 4.0;  // requests per second
  std::optional<std::string> app_token;
  std::chrono::milliseconds timeout{30000};
  std::string scheme = "https";  // "http" for local fixture servers

  // Throws InvalidArgument.
  void validate() const;
};

// HVD_SCOUT_APP_TOKEN when set and nonempty.
std::optional<std::string> app_token_from_env();

// Spaces request starts at least 1/rate seconds apart across all threads.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();
  std::chrono::nanoseconds interval() const { return interval_; }

 private:
  std::chrono::nanoseconds interval_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

struct PageFailure {
  std::size_t page = 0;
  int attempt = 0;
  std::string error_class;  // "NetworkError", "PortalError", ...
  std::string detail;

  bool operator==(const PageFailure&) const = default;
};

struct HarvestReport {
  PortalSpec portal;
  std::size_t pages_fetched = 0;
  std::size_t records = 0;
  std::vector<PageFailure> failures;  // every failed attempt, retried or not
  double duration = 0;                 // seconds
  std::size_t missing_downloads = 0;   // assets without downloadCount (recorded as 0)
  std::size_t missing_views = 0;
  std::size_t skipped_assets = 0;      // non-dataset assets filtered out
  std::size_t duplicate_ids = 0;       // repeated across pages, kept once
};

// Adapter from one /api/views page to dataset records. Throws SchemaError
// when the page is not a JSON array of objects with string ids or when a
// counter is not a nonnegative integer.
std::vector<DatasetRecord> parse_views_page(std::string_view body, HarvestReport& report);

// Throws NetworkError, PortalError or SchemaError.
PortalSnapshot harvest_portal(const PortalSpec& spec, const HarvestConfig& config,
                              HarvestReport* report = nullptr, RateLimiter* limiter = nullptr);

struct HarvestOutcome {
  std::optional<PortalSnapshot> snapshot;
  HarvestReport report;
  std::exception_ptr error;
  std::string error_class;
  std::string message;

  bool ok() const { return snapshot.has_value(); }
};

// One outcome per spec, in input order. Throws InvalidArgument when
// parallelism is 0; per-portal failures are captured in the outcome.
std::vector<HarvestOutcome> harvest_many(std::span<const PortalSpec> specs,
                                         const HarvestConfig& config, unsigned parallelism);

// Live category inventory (portal name -> labels) for the given portals.
// Portals that fail are reported through `failed` and left out.
PortalCategoryInventory harvest_inventory(std::span<const PortalSpec> specs,
                                          const HarvestConfig& config, unsigned parallelism,
                                          std::vector<HarvestOutcome>* failed = nullptr);

// Name of the most derived hvd error class of `e`, e.g. "NetworkError".
std::string error_class_name(const std::exception& e);

}  // namespace hvd
