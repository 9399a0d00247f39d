#pragma once

// Comprehensive category set construction from a portal corpus, and metric
// voting alignment of portal categories onto that set.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/similarity.hpp"

namespace hvd {

// portal -> distinct raw category labels (never the Unspecified sentinel).
using PortalCategoryInventory = std::map<std::string, std::set<std::string>>;

struct WordFrequencies {
  std::map<std::string, std::set<std::string>> portals;  // word -> portals using it
  std::size_t portal_count = 0;

  std::size_t frequency(const std::string& word) const;
};

struct MostSignificantWords {
  std::vector<std::string> words;  // selection order, after pruning
  std::set<std::string> covered;   // portals covered by `words`
};

struct CategoryFrequency {
  std::string category;
  std::size_t portals = 0;  // portals publishing exactly this label

  bool operator==(const CategoryFrequency&) const = default;
};

// word -> categories containing it, most frequent first (ties: shorter, then
// lexicographic).
using WordToCategories = std::map<std::string, std::vector<CategoryFrequency>>;

struct CscEntry {
  std::string category;
  std::size_t coverage = 0;

  bool operator==(const CscEntry&) const = default;
};

class ComprehensiveCategorySet {
 public:
  ComprehensiveCategorySet() = default;
  // Sorts by coverage descending then label; throws InvalidArgument on
  // duplicate or empty labels.
  explicit ComprehensiveCategorySet(std::vector<CscEntry> entries);

  const std::vector<CscEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const std::string& category) const;
  std::set<std::string> labels() const;

  bool operator==(const ComprehensiveCategorySet&) const = default;

 private:
  std::vector<CscEntry> entries_;
};

// Throws EmptyInventory.
WordFrequencies extract_words(const PortalCategoryInventory& inv);

// Greedy cover: repeatedly take the word adding the most uncovered portals
// (ties: higher frequency, then lexicographic) until nothing adds coverage,
// then drop, in selection order, every word whose removal keeps coverage.
MostSignificantWords most_significant_words(const WordFrequencies& swf,
                                            const PortalCategoryInventory& inv);

WordToCategories words_to_categories(const MostSignificantWords& msw,
                                     const PortalCategoryInventory& inv);

ComprehensiveCategorySet build_csc(const WordToCategories& swc);

// extract_words -> most_significant_words -> words_to_categories -> build_csc
ComprehensiveCategorySet build_csc(const PortalCategoryInventory& inv);

// Categories of each snapshot, keyed by portal domain.
PortalCategoryInventory inventory_from_snapshots(std::span<const PortalSnapshot> snapshots);

// --- alignment --------------------------------------------------------------

struct VoteCount {
  std::string category;
  int votes = 0;

  bool operator==(const VoteCount&) const = default;
};

struct AlignmentRow {
  std::string portal;
  std::string category;                    // raw portal label
  std::optional<std::string> csc_category;  // absent when unaligned
  std::array<std::string, SimilarityMetricSet::kSize> picks;  // per metric
  std::vector<VoteCount> tally;  // votes desc, then label
  std::string reason;            // why the row is unaligned

  bool aligned() const { return csc_category.has_value(); }
  bool tied() const { return tally.size() > 1 && tally[0].votes == tally[1].votes; }
  bool operator==(const AlignmentRow&) const = default;
};

// Rows sorted by (portal, category).
struct AlignmentMap {
  std::vector<AlignmentRow> rows;

  const AlignmentRow* find(const std::string& portal, const std::string& category) const;
  bool operator==(const AlignmentMap&) const = default;
};

struct AlignOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Each metric picks the CSC category with the highest category similarity.
// Among equal scores, a CSC label whose token list equals the portal label's
// wins; remaining ties go to the lexicographically smallest label. The label
// with most votes is chosen; vote ties are settled by a draw that depends
// only on (seed, portal, label). A label with no content words, or whose
// best score is zero under every metric, is emitted unaligned with a reason.
AlignmentMap align(const PortalCategoryInventory& scs, const ComprehensiveCategorySet& csc,
                   const SimilarityMetricSet& sim, AlignOptions options = {});

// The draw used for vote ties: index in [0, n) for the given key.
std::size_t tie_break_index(std::uint64_t seed, const std::string& portal,
                            const std::string& category, std::size_t n);

// CSC categories that no aligned row points to.
std::vector<std::string> unmatched_csc(const AlignmentMap& alignment,
                                       const ComprehensiveCategorySet& csc);

// Number of distinct portals with at least one category aligned to each CSC
// category (zero entries included), in CSC order.
std::vector<std::pair<std::string, std::size_t>> alignment_coverage(
    const AlignmentMap& alignment, const ComprehensiveCategorySet& csc);

}  // namespace hvd
