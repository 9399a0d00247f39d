#pragma once

// High-Value Data index per portal category and its cross-portal aggregate.
//
//   hvdi = median * share + p95 * (share * (1 - 0.95))
//
// where share is the category's fraction of all portal datasets
// (uncategorized ones included) and median/p95 are taken over the category's
// download counts. The aggregate for a unified category c sums, over every
// alignment pair (portal p, raw category -> c), the portal's hvdi for that
// raw category weighted by |d^p| / |D_P|.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/categorization.hpp"

namespace hvd {

inline constexpr double kPercentileLevel = 0.95;
// 1 - kPercentileLevel, written as the decimal literal so hand-checked values
// such as 17.2 come out exact in binary floating point.
inline constexpr double kTailWeight = 0.05;
static_assert(kTailWeight - (1.0 - kPercentileLevel) < 1e-15 &&
              (1.0 - kPercentileLevel) - kTailWeight < 1e-15);

struct HvdiEntry {
  CategoryLabel category;
  std::size_t n_datasets = 0;
  double dataset_share = 0;
  double median_downloads = 0;
  double p95_downloads = 0;
  double hvdi = 0;

  bool operator==(const HvdiEntry&) const = default;
};

// Throws EmptyCategory or InvalidTotal.
HvdiEntry compute_hvdi(std::span<const std::int64_t> category_downloads,
                       std::size_t portal_total_datasets);

struct HvdiTable {
  PortalSpec portal;
  std::size_t total_datasets = 0;
  std::size_t uncategorized = 0;
  std::vector<HvdiEntry> entries;  // ranked

  const HvdiEntry* find(const std::string& raw_category) const;
  bool operator==(const HvdiTable&) const = default;
};

// Ranking order: hvdi desc, n_datasets desc, label ascending.
bool hvdi_rank_less(const HvdiEntry& a, const HvdiEntry& b);

// Throws EmptySnapshot.
HvdiTable rank_portal(const PortalSnapshot& snapshot, GroupingOptions options = {});

// Throws InvalidArgument when k == 0.
std::vector<HvdiEntry> top_k(const HvdiTable& table, std::size_t k);

struct AggregateContribution {
  std::string portal;    // domain
  std::string category;  // raw portal label
  double hvdi = 0;
  double weight = 0;

  bool operator==(const AggregateContribution&) const = default;
};

struct AggregateHvdi {
  std::string category;  // CSC label
  double hvdi_c = 0;
  std::vector<AggregateContribution> contributing;

  bool operator==(const AggregateHvdi&) const = default;
};

// One row per CSC category (categories with no contributor score 0), sorted
// by hvdi_c desc then label. Tables are matched to alignment rows by portal
// domain. Throws EmptyPool or DanglingAlignment.
std::vector<AggregateHvdi> aggregate_hvdi(std::span<const HvdiTable> tables,
                                          const AlignmentMap& alignment,
                                          const ComprehensiveCategorySet& csc);

}  // namespace hvd
