#include "hvd/categorization.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <tuple>
#include <thread>

#include "hvd/error.hpp"

namespace hvd {

std::size_t WordFrequencies::frequency(const std::string& word) const {
  auto it = portals.find(word);
  return it == portals.end() ? 0 : it->second.size();
}

ComprehensiveCategorySet::ComprehensiveCategorySet(std::vector<CscEntry> entries)
    : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.category.empty()) throw InvalidArgument("empty CSC category label");
    if (!seen.insert(e.category).second)
      throw InvalidArgument("duplicate CSC category '" + e.category + "'");
  }
  std::sort(entries_.begin(), entries_.end(), [](const CscEntry& a, const CscEntry& b) {
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    return a.category < b.category;
  });
}

bool ComprehensiveCategorySet::contains(const std::string& category) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const CscEntry& e) { return e.category == category; });
}

std::set<std::string> ComprehensiveCategorySet::labels() const {
  std::set<std::string> out;
  for (const auto& e : entries_) out.insert(e.category);
  return out;
}

WordFrequencies extract_words(const PortalCategoryInventory& inv) {
  if (inv.empty()) throw EmptyInventory();
  WordFrequencies swf;
  swf.portal_count = inv.size();
  for (const auto& [portal, labels] : inv)
    for (const auto& label : labels)
      for (auto& w : tokenize(label)) swf.portals[w].insert(portal);
  return swf;
}

MostSignificantWords most_significant_words(const WordFrequencies& swf,
                                            const PortalCategoryInventory& inv) {
  (void)inv;
  MostSignificantWords msw;
  std::set<std::string> covered;
  while (true) {
    const std::string* best = nullptr;
    std::size_t best_gain = 0, best_freq = 0;
    for (const auto& [word, portals] : swf.portals) {
      std::size_t gain = 0;
      for (const auto& p : portals) gain += covered.count(p) == 0;
      if (gain == 0) continue;
      // Words are visited in lexicographic order, so strict comparisons keep
      // the smallest word among equals.
      if (!best || gain > best_gain || (gain == best_gain && portals.size() > best_freq)) {
        best = &word;
        best_gain = gain;
        best_freq = portals.size();
      }
    }
    if (!best) break;
    msw.words.push_back(*best);
    const auto& add = swf.portals.at(*best);
    covered.insert(add.begin(), add.end());
  }

  auto coverage_without = [&](std::size_t skip) {
    std::set<std::string> u;
    for (std::size_t i = 0; i < msw.words.size(); ++i) {
      if (i == skip) continue;
      const auto& ps = swf.portals.at(msw.words[i]);
      u.insert(ps.begin(), ps.end());
    }
    return u.size();
  };
  for (std::size_t i = 0; i < msw.words.size();) {
    if (coverage_without(i) == covered.size())
      msw.words.erase(msw.words.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  msw.covered = std::move(covered);
  return msw;
}

WordToCategories words_to_categories(const MostSignificantWords& msw,
                                     const PortalCategoryInventory& inv) {
  std::map<std::string, std::size_t> label_portals;
  for (const auto& [portal, labels] : inv)
    for (const auto& label : labels) ++label_portals[label];

  std::map<std::string, std::vector<std::string>> label_tokens;
  for (const auto& [label, n] : label_portals) label_tokens[label] = tokenize(label);

  WordToCategories swc;
  for (const auto& word : msw.words) {
    auto& list = swc[word];
    for (const auto& [label, n] : label_portals) {
      const auto& toks = label_tokens[label];
      if (std::find(toks.begin(), toks.end(), word) != toks.end()) list.push_back({label, n});
    }
    std::sort(list.begin(), list.end(), [](const CategoryFrequency& a, const CategoryFrequency& b) {
      if (a.portals != b.portals) return a.portals > b.portals;
      if (a.category.size() != b.category.size()) return a.category.size() < b.category.size();
      return a.category < b.category;
    });
  }
  return swc;
}

ComprehensiveCategorySet build_csc(const WordToCategories& swc) {
  std::map<std::string, std::size_t> chosen;
  for (const auto& [word, list] : swc) {
    if (list.empty()) continue;
    auto best = std::min_element(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (a.portals != b.portals) return a.portals > b.portals;
      if (a.category.size() != b.category.size()) return a.category.size() < b.category.size();
      return a.category < b.category;
    });
    chosen.emplace(best->category, best->portals);
  }
  std::vector<CscEntry> entries;
  for (auto& [label, coverage] : chosen) entries.push_back({label, coverage});
  return ComprehensiveCategorySet(std::move(entries));
}

ComprehensiveCategorySet build_csc(const PortalCategoryInventory& inv) {
  auto swf = extract_words(inv);
  auto msw = most_significant_words(swf, inv);
  return build_csc(words_to_categories(msw, inv));
}

PortalCategoryInventory inventory_from_snapshots(std::span<const PortalSnapshot> snapshots) {
  PortalCategoryInventory inv;
  for (const auto& snap : snapshots) {
    auto& labels = inv[snap.portal().domain];
    for (const auto& d : snap.datasets())
      if (d.category) labels.insert(*d.category);
  }
  return inv;
}

// --- alignment --------------------------------------------------------------

const AlignmentRow* AlignmentMap::find(const std::string& portal,
                                       const std::string& category) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), std::pair(portal, category),
                             [](const AlignmentRow& r, const std::pair<std::string, std::string>& k) {
                               return std::tie(r.portal, r.category) < std::tie(k.first, k.second);
                             });
  if (it == rows.end() || it->portal != portal || it->category != category) return nullptr;
  return &*it;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct CscToken {
  const std::string* label;
  std::vector<std::string> tokens;
};

AlignmentRow align_one(const std::string& portal, const std::string& category,
                       const std::vector<CscToken>& targets, const SimilarityMetricSet& sim,
                       std::uint64_t seed) {
  AlignmentRow row;
  row.portal = portal;
  row.category = category;
  const auto tokens = tokenize(category);
  if (tokens.empty()) {
    row.reason = EmptyAfterTokenization(category).what();
    return row;
  }

  std::map<std::string, int> votes;
  bool any_positive = false;
  for (std::size_t m = 0; m < sim.size(); ++m) {
    const CscToken* best = nullptr;
    double best_score = 0;
    bool best_identical = false;
    for (const auto& t : targets) {
      if (t.tokens.empty()) continue;
      const double s = sim.score(m, tokens, t.tokens);
      const bool identical = t.tokens == tokens;
      bool better = !best || s > best_score ||
                    (s == best_score && identical && !best_identical) ||
                    (s == best_score && identical == best_identical && *t.label < *best->label);
      if (better) {
        best = &t;
        best_score = s;
        best_identical = identical;
      }
    }
    if (!best) {
      row.reason = "no CSC category has content words";
      return row;
    }
    row.picks[m] = *best->label;
    ++votes[*best->label];
    any_positive = any_positive || best_score > 0;
  }
  if (!any_positive) {
    row.picks = {};
    row.reason = "no positive similarity to any CSC category";
    return row;
  }

  for (auto& [label, n] : votes) row.tally.push_back({label, n});
  std::stable_sort(row.tally.begin(), row.tally.end(),
                   [](const VoteCount& a, const VoteCount& b) { return a.votes > b.votes; });
  std::size_t tied = 1;
  while (tied < row.tally.size() && row.tally[tied].votes == row.tally[0].votes) ++tied;
  const std::size_t pick = tied == 1 ? 0 : tie_break_index(seed, portal, category, tied);
  row.csc_category = row.tally[pick].category;
  return row;
}

}  // namespace

std::size_t tie_break_index(std::uint64_t seed, const std::string& portal,
                            const std::string& category, std::size_t n) {
  if (n == 0) throw InvalidArgument("tie break over zero candidates");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  h = fnv1a(h, portal);
  h = fnv1a(h, std::string_view("\x1f", 1));
  h = fnv1a(h, category);
  return static_cast<std::size_t>(splitmix64(h) % n);
}

AlignmentMap align(const PortalCategoryInventory& scs, const ComprehensiveCategorySet& csc,
                   const SimilarityMetricSet& sim, AlignOptions options) {
  if (csc.empty()) throw InvalidArgument("alignment needs a nonempty CSC");
  std::vector<CscToken> targets;
  for (const auto& e : csc.entries()) targets.push_back({&e.category, tokenize(e.category)});

  std::vector<std::pair<const std::string*, const std::string*>> jobs;
  for (const auto& [portal, labels] : scs)
    for (const auto& label : labels) jobs.emplace_back(&portal, &label);

  AlignmentMap out;
  out.rows.resize(jobs.size());
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
        out.rows[i] = align_one(*jobs[i].first, *jobs[i].second, targets, sim, options.seed);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = jobs.size();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<std::string> unmatched_csc(const AlignmentMap& alignment,
                                       const ComprehensiveCategorySet& csc) {
  std::set<std::string> hit;
  for (const auto& r : alignment.rows)
    if (r.csc_category) hit.insert(*r.csc_category);
  std::vector<std::string> out;
  for (const auto& e : csc.entries())
    if (!hit.count(e.category)) out.push_back(e.category);
  return out;
}

std::vector<std::pair<std::string, std::size_t>> alignment_coverage(
    const AlignmentMap& alignment, const ComprehensiveCategorySet& csc) {
  std::map<std::string, std::set<std::string>> portals;
  for (const auto& r : alignment.rows)
    if (r.csc_category) portals[*r.csc_category].insert(r.portal);
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& e : csc.entries()) {
    auto it = portals.find(e.category);
    out.emplace_back(e.category, it == portals.end() ? 0 : it->second.size());
  }
  return out;
}

}  // namespace hvd
