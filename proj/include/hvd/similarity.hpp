#pragma once

// Word and category similarity over the noun taxonomy.
//
// The metric set is the usual WordNet sextet: three edge-counting measures
// (PATH, WUP, LCH) and three information-content measures (RES, LIN, JCN)
// computed with intrinsic IC. A word's score against another word is the
// maximum over all their sense pairs; a category's score against another is
// the maximum over all pairs of their content words.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hvd/catalog.hpp"
#include "hvd/taxonomy.hpp"

namespace hvd {

enum class MetricId { path, wup, lch, res, lin, jcn };

inline constexpr std::array<MetricId, 6> kAllMetrics = {
    MetricId::path, MetricId::wup, MetricId::lch, MetricId::res, MetricId::lin, MetricId::jcn};

std::string_view metric_name(MetricId metric);  // "PATH", "WUP", ...
MetricId parse_metric(std::string_view name);   // case-insensitive; throws UnknownMetric

// Synset-level score for one metric.
double synset_similarity(MetricId metric, const Taxonomy& t, SynsetId a, SynsetId b);

// Highest value the metric can take on this taxonomy; identical words score
// this even when they are not in the lexicon.
double metric_maximum(MetricId metric, const Taxonomy& t);

double word_similarity(MetricId metric, std::string_view w1, std::string_view w2,
                       const Taxonomy& t);

// --- tokenization -----------------------------------------------------------

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  // One word per line; '#' starts a comment line.
  static StopwordList parse(std::string_view text);
  static const StopwordList& bundled();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Split on every non-alphanumeric byte, lowercase, drop stopwords, drop
// duplicates keeping the first occurrence. Bytes >= 0x80 count as
// alphanumeric so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view label,
                                  const StopwordList& stopwords = StopwordList::bundled());
std::vector<std::string> tokenize(const CategoryLabel& label,
                                  const StopwordList& stopwords = StopwordList::bundled());

// Throws EmptyAfterTokenization when either label has no content words.
double category_similarity(MetricId metric, std::string_view c1, std::string_view c2,
                           const Taxonomy& t);

// Same, for labels that were already tokenized.
double token_set_similarity(MetricId metric, const std::vector<std::string>& a,
                            const std::vector<std::string>& b, const Taxonomy& t);

// --- metric set -------------------------------------------------------------

using WordScore = std::function<double(std::string_view, std::string_view)>;

struct WordMetric {
  std::string name;
  WordScore score;
};

// The ordered set of word metrics used by the alignment vote. The standard
// set wraps the six built-in metrics around a shared word-pair cache; a
// custom set may hold any six callables.
class SimilarityMetricSet {
 public:
  static constexpr std::size_t kSize = 6;

  explicit SimilarityMetricSet(std::array<WordMetric, kSize> metrics)
      : metrics_(std::move(metrics)) {}

  static SimilarityMetricSet standard(const Taxonomy& t);

  std::size_t size() const { return kSize; }
  const WordMetric& operator[](std::size_t i) const { return metrics_[i]; }
  const std::string& name(std::size_t i) const { return metrics_[i].name; }

  // Max over the token cross product with metric i.
  double score(std::size_t i, const std::vector<std::string>& a,
               const std::vector<std::string>& b) const;

 private:
  std::array<WordMetric, kSize> metrics_;
};

}  // namespace hvd
