#pragma once

// In-memory noun taxonomy loaded from WordNet distribution files
// (index.noun, data.noun and, when present, noun.exc).
//
// Synsets are addressed by a dense SynsetId assigned in data-file order,
// which is also byte-offset order, so comparing ids compares offsets. The
// hypernym graph uses both '@' (hypernym) and '@i' (instance hypernym)
// pointers. If the data has more than one root, a virtual root is appended
// as the last synset so that every pair has a common subsumer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hvd {

using SynsetId = std::uint32_t;

struct Synset {
  std::uint32_t offset = 0;
  std::vector<std::string> lemmas;  // lowercase, underscores as in the file
  std::vector<SynsetId> hypernyms;
  int depth = 0;
  double ic = 0;
  bool is_virtual = false;
};

struct TaxonomyLoadStats {
  std::size_t records = 0;  // synset lines parsed from data.noun
  std::size_t skipped = 0;  // lines that were not parsed (always 0: bad lines throw)
  std::size_t index_entries = 0;
  std::size_t exceptions = 0;
};

class Taxonomy {
 public:
  // Throws MissingFile, ParseError (file + byte offset) or CycleDetected.
  static Taxonomy load(const std::filesystem::path& data_dir);

  std::size_t size() const { return synsets_.size(); }
  const Synset& synset(SynsetId id) const;  // throws UnknownSynset
  std::optional<SynsetId> find_offset(std::uint32_t offset) const;

  SynsetId root() const { return root_; }
  bool has_virtual_root() const { return virtual_root_; }
  int max_depth() const { return max_depth_; }
  const TaxonomyLoadStats& load_stats() const { return stats_; }

  // Exact lemma lookup (lowercase; "ice cream" and "ice_cream" both work).
  // Senses are returned in index order.
  std::span<const SynsetId> lookup(std::string_view lemma) const;

  // Lemma lookup with noun morphology: exceptions list, the word itself and
  // the standard suffix detachments ("parks" -> "park", "cities" -> "city").
  // Union of all forms found, without duplicates, in first-seen order.
  std::vector<SynsetId> senses(std::string_view word) const;

  bool contains_word(std::string_view word) const { return !senses(word).empty(); }

  // Every ancestor of `id` (itself included) with its minimum number of
  // hypernym hops, sorted by ancestor id.
  std::span<const std::pair<SynsetId, int>> ancestors(SynsetId id) const;

  // Minimum edges on a path that climbs from a to a common subsumer and
  // descends to b. nullopt when the two share no ancestor.
  std::optional<int> shortest_path(SynsetId a, SynsetId b) const;

  // Deepest common ancestor; equal-depth ties go to the smallest id.
  // Throws UnknownSynset; with a single root a subsumer always exists.
  SynsetId lcs(SynsetId a, SynsetId b) const;

  std::size_t hyponym_count(SynsetId id) const;  // all transitive hyponyms
  double intrinsic_ic(SynsetId id) const;        // 1 - log(hypo+1)/log(N)

 private:
  Taxonomy() = default;
  void finalize();
  void check(SynsetId id) const;

  std::vector<Synset> synsets_;
  std::unordered_map<std::uint32_t, SynsetId> by_offset_;
  std::unordered_map<std::string, std::vector<SynsetId>> lemma_index_;
  std::unordered_map<std::string, std::vector<std::string>> exceptions_;
  std::vector<std::vector<std::pair<SynsetId, int>>> ancestors_;
  std::vector<std::size_t> hyponym_counts_;
  SynsetId root_ = 0;
  bool virtual_root_ = false;
  int max_depth_ = 0;
  TaxonomyLoadStats stats_;
};

inline Taxonomy load_taxonomy(const std::filesystem::path& data_dir) {
  return Taxonomy::load(data_dir);
}

}  // namespace hvd
