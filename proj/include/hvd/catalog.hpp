#pragma once

// Shared domain types: portals, datasets, category labels and snapshots.

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hvd {

enum class Engine { socrata };

std::string_view engine_name(Engine engine);
Engine parse_engine(std::string_view name);

struct PortalSpec {
  std::string name;
  std::string domain;  // hostname, optionally with ":port"
  std::int64_t population = 0;
  Engine engine = Engine::socrata;

  bool operator==(const PortalSpec&) const = default;
};

bool is_valid_domain(std::string_view domain);

// Throws InvalidArgument when the spec violates its invariants.
void validate(const PortalSpec& spec);

struct DatasetRecord {
  std::string id;
  std::string title;
  std::optional<std::string> category;  // absent means uncategorized
  std::int64_t views = 0;
  std::int64_t downloads = 0;
  std::optional<std::string> created_at;  // UTC ISO-8601

  bool operator==(const DatasetRecord&) const = default;
};

inline constexpr std::string_view kUnspecifiedLabel = "Unspecified";

// A category as the portal returned it. The sentinel for uncategorized
// datasets is a distinct value: a portal label spelled "Unspecified" does not
// collide with it.
class CategoryLabel {
 public:
  CategoryLabel() = default;
  explicit CategoryLabel(std::string raw, std::optional<std::string> normalized = std::nullopt)
      : raw_(std::move(raw)), normalized_(std::move(normalized)) {}

  static CategoryLabel unspecified();

  const std::string& raw() const { return raw_; }
  const std::optional<std::string>& normalized() const { return normalized_; }
  bool is_unspecified() const { return unspecified_; }

  // Grouping key: the normalized form when present, else the raw bytes.
  const std::string& key() const { return normalized_ ? *normalized_ : raw_; }

  std::strong_ordering operator<=>(const CategoryLabel& other) const;
  bool operator==(const CategoryLabel& other) const {
    return (*this <=> other) == std::strong_ordering::equal;
  }

 private:
  std::string raw_;
  std::optional<std::string> normalized_;
  bool unspecified_ = false;
};

// Trim and collapse internal whitespace runs to a single space.
std::string normalize_whitespace(std::string_view label);

// UTC timestamps in ISO-8601 ("2024-05-09T00:00:00Z").
std::string format_utc(std::chrono::system_clock::time_point tp);
std::string utc_now();
// Returns nullopt unless `text` is a well-formed UTC timestamp as produced by
// format_utc.
std::optional<std::chrono::system_clock::time_point> parse_utc(std::string_view text);

// Immutable harvest of one portal's datasets.
class PortalSnapshot {
 public:
  // Throws InvalidArgument on duplicate dataset ids or negative counters.
  PortalSnapshot(PortalSpec portal, std::string retrieved_at, std::vector<DatasetRecord> datasets);

  const PortalSpec& portal() const { return portal_; }
  const std::string& retrieved_at() const { return retrieved_at_; }
  std::span<const DatasetRecord> datasets() const { return datasets_; }
  std::size_t size() const { return datasets_.size(); }
  bool empty() const { return datasets_.empty(); }

  bool operator==(const PortalSnapshot&) const = default;

 private:
  PortalSpec portal_;
  std::string retrieved_at_;
  std::vector<DatasetRecord> datasets_;
};

struct GroupingOptions {
  // Off by default: labels are matched byte-exact.
  bool normalize_whitespace = false;
};

using CategoryGroups = std::map<CategoryLabel, std::vector<DatasetRecord>>;

// Partition the snapshot's datasets by category. Records without a category
// land in the group keyed by CategoryLabel::unspecified(). Within a group,
// records are ordered by id, so the result does not depend on input order.
CategoryGroups group_by_category(const PortalSnapshot& snapshot, GroupingOptions options = {});

// Fraction of datasets without a category. Throws EmptySnapshot.
double uncategorized_share(const PortalSnapshot& snapshot);

std::size_t uncategorized_count(const PortalSnapshot& snapshot);

}  // namespace hvd
