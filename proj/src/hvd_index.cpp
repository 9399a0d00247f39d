#include "hvd/hvd_index.hpp"

#include <algorithm>
#include <map>

#include "hvd/error.hpp"
#include "hvd/stats.hpp"

namespace hvd {

HvdiEntry compute_hvdi(std::span<const std::int64_t> category_downloads,
                       std::size_t portal_total_datasets) {
  if (category_downloads.empty()) throw EmptyCategory("category has no datasets");
  if (portal_total_datasets < category_downloads.size())
    throw InvalidTotal("portal total " + std::to_string(portal_total_datasets) +
                       " is smaller than category size " +
                       std::to_string(category_downloads.size()));
  auto sorted = sorted_copy(category_downloads);
  if (sorted.front() < 0) throw NegativeValue(sorted.front());

  HvdiEntry e;
  e.n_datasets = sorted.size();
  e.dataset_share = static_cast<double>(sorted.size()) / static_cast<double>(portal_total_datasets);
  e.median_downloads = percentile_sorted(sorted, 0.5);
  e.p95_downloads = percentile_sorted(sorted, kPercentileLevel);
  e.hvdi = e.median_downloads * e.dataset_share + e.p95_downloads * (e.dataset_share * kTailWeight);
  return e;
}

const HvdiEntry* HvdiTable::find(const std::string& raw_category) const {
  for (const auto& e : entries)
    if (e.category.raw() == raw_category) return &e;
  return nullptr;
}

bool hvdi_rank_less(const HvdiEntry& a, const HvdiEntry& b) {
  if (a.hvdi != b.hvdi) return a.hvdi > b.hvdi;
  if (a.n_datasets != b.n_datasets) return a.n_datasets > b.n_datasets;
  return a.category < b.category;
}

HvdiTable rank_portal(const PortalSnapshot& snapshot, GroupingOptions options) {
  if (snapshot.empty()) throw EmptySnapshot("snapshot of " + snapshot.portal().domain + " is empty");
  HvdiTable table;
  table.portal = snapshot.portal();
  table.total_datasets = snapshot.size();
  for (const auto& [label, records] : group_by_category(snapshot, options)) {
    if (label.is_unspecified()) {
      table.uncategorized = records.size();
      continue;
    }
    std::vector<std::int64_t> downloads;
    downloads.reserve(records.size());
    for (const auto& r : records) downloads.push_back(r.downloads);
    auto entry = compute_hvdi(downloads, table.total_datasets);
    entry.category = label;
    table.entries.push_back(std::move(entry));
  }
  std::sort(table.entries.begin(), table.entries.end(), hvdi_rank_less);
  return table;
}

std::vector<HvdiEntry> top_k(const HvdiTable& table, std::size_t k) {
  if (k == 0) throw InvalidArgument("top_k needs k >= 1");
  const auto n = std::min(k, table.entries.size());
  return {table.entries.begin(), table.entries.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<AggregateHvdi> aggregate_hvdi(std::span<const HvdiTable> tables,
                                          const AlignmentMap& alignment,
                                          const ComprehensiveCategorySet& csc) {
  std::size_t pool = 0;
  std::map<std::string, const HvdiTable*> by_domain;
  for (const auto& t : tables) {
    pool += t.total_datasets;
    if (!by_domain.emplace(t.portal.domain, &t).second)
      throw InvalidArgument("portal " + t.portal.domain + " appears twice in the pool");
  }
  if (pool == 0) throw EmptyPool();

  std::map<std::string, AggregateHvdi> out;
  for (const auto& e : csc.entries()) out[e.category].category = e.category;

  for (const auto& row : alignment.rows) {
    if (!row.csc_category) continue;
    auto target = out.find(*row.csc_category);
    if (target == out.end())
      throw DanglingAlignment(row.portal, row.category,
                              "target '" + *row.csc_category + "' is not a CSC category");
    auto table = by_domain.find(row.portal);
    if (table == by_domain.end())
      throw DanglingAlignment(row.portal, row.category, "portal is not in the pool");
    const HvdiEntry* entry = table->second->find(row.category);
    if (!entry)
      throw DanglingAlignment(row.portal, row.category, "portal has no such category");
    const double weight =
        static_cast<double>(table->second->total_datasets) / static_cast<double>(pool);
    target->second.contributing.push_back({row.portal, row.category, entry->hvdi, weight});
    target->second.hvdi_c += entry->hvdi * weight;
  }

  std::vector<AggregateHvdi> result;
  result.reserve(out.size());
  for (auto& [label, agg] : out) result.push_back(std::move(agg));
  std::stable_sort(result.begin(), result.end(), [](const AggregateHvdi& a, const AggregateHvdi& b) {
    return a.hvdi_c > b.hvdi_c;
  });
  return result;
}

}  // namespace hvd
