#include "hvd/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "hvd/error.hpp"

namespace hvd {

namespace detail {
extern const std::string_view kBundledStopwords;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::size_t metric_index(MetricId m) { return static_cast<std::size_t>(m); }

using Scores = std::array<double, 6>;

// All six scores for one synset pair share the path length and the LCS.
Scores synset_scores(const Taxonomy& t, SynsetId a, SynsetId b) {
  if (b < a) std::swap(a, b);
  Scores s{};
  const int len = t.shortest_path(a, b).value_or(-1);
  const auto& sa = t.synset(a);
  const auto& sb = t.synset(b);
  if (len < 0) return s;
  const auto& l = t.synset(t.lcs(a, b));

  s[metric_index(MetricId::path)] = 1.0 / (1.0 + len);

  const int depth_sum = sa.depth + sb.depth;
  double wup = depth_sum == 0 ? 1.0 : 2.0 * l.depth / depth_sum;
  s[metric_index(MetricId::wup)] = std::clamp(wup, 0.0, 1.0);

  const int d = t.max_depth();
  if (d > 0) {
    double lch = -std::log(static_cast<double>(len + 1) / (2.0 * d));
    s[metric_index(MetricId::lch)] = std::max(lch, 0.0);
  }

  s[metric_index(MetricId::res)] = l.ic;

  const double ic_sum = sa.ic + sb.ic;
  s[metric_index(MetricId::lin)] = ic_sum == 0 ? 0.0 : std::clamp(2.0 * l.ic / ic_sum, 0.0, 1.0);

  const double dist = std::max(ic_sum - 2.0 * l.ic, 0.0);
  s[metric_index(MetricId::jcn)] = 1.0 / (1.0 + dist);
  return s;
}

Scores maxima(const Taxonomy& t) {
  Scores m{};
  for (auto id : kAllMetrics) m[metric_index(id)] = metric_maximum(id, t);
  return m;
}

Scores word_scores(const Taxonomy& t, const std::string& w1, const std::string& w2) {
  if (w1 == w2) return maxima(t);
  Scores best{};
  const auto s1 = t.senses(w1);
  if (s1.empty()) return best;
  const auto s2 = t.senses(w2);
  for (auto a : s1)
    for (auto b : s2) {
      auto s = synset_scores(t, a, b);
      for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], s[i]);
    }
  return best;
}

// Word-pair scores are reused heavily during alignment; the cache is keyed
// by the ordered pair so lookups are symmetric.
class CachedScorer {
 public:
  explicit CachedScorer(const Taxonomy& t) : t_(t) {}

  double score(std::size_t metric, std::string_view a, std::string_view b) {
    std::string x = lowercase(a), y = lowercase(b);
    if (y < x) std::swap(x, y);
    std::string key = x + '\x1f' + y;
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second[metric];
    }
    auto s = word_scores(t_, x, y);
    std::lock_guard lock(mu_);
    cache_.emplace(std::move(key), s);
    return s[metric];
  }

 private:
  const Taxonomy& t_;
  std::mutex mu_;
  std::unordered_map<std::string, Scores> cache_;
};

}  // namespace

std::string_view metric_name(MetricId metric) {
  switch (metric) {
    case MetricId::path: return "PATH";
    case MetricId::wup: return "WUP";
    case MetricId::lch: return "LCH";
    case MetricId::res: return "RES";
    case MetricId::lin: return "LIN";
    case MetricId::jcn: return "JCN";
  }
  throw UnknownMetric("unknown metric id");
}

MetricId parse_metric(std::string_view name) {
  const std::string lower = lowercase(name);
  for (auto m : kAllMetrics)
    if (lowercase(metric_name(m)) == lower) return m;
  throw UnknownMetric("unknown similarity metric '" + std::string(name) + "'");
}

double synset_similarity(MetricId metric, const Taxonomy& t, SynsetId a, SynsetId b) {
  return synset_scores(t, a, b)[metric_index(metric)];
}

double metric_maximum(MetricId metric, const Taxonomy& t) {
  switch (metric) {
    case MetricId::path:
    case MetricId::wup:
    case MetricId::res:
    case MetricId::lin:
    case MetricId::jcn:
      return 1.0;
    case MetricId::lch:
      return t.max_depth() > 0 ? std::log(2.0 * t.max_depth()) : 0.0;
  }
  throw UnknownMetric("unknown metric id");
}

double word_similarity(MetricId metric, std::string_view w1, std::string_view w2,
                       const Taxonomy& t) {
  const auto i = metric_index(metric);
  if (i >= kAllMetrics.size()) throw UnknownMetric("unknown metric id");
  std::string a = lowercase(w1), b = lowercase(w2);
  if (b < a) std::swap(a, b);
  return word_scores(t, a, b)[i];
}

StopwordList StopwordList::parse(std::string_view text) {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') words.insert(lowercase(line));
    pos = end + 1;
  }
  return StopwordList(std::move(words));
}

const StopwordList& StopwordList::bundled() {
  static const StopwordList list = parse(detail::kBundledStopwords);
  return list;
}

bool StopwordList::contains(std::string_view word) const {
  return words_.count(std::string(word)) > 0;
}

std::vector<std::string> tokenize(std::string_view label, const StopwordList& stopwords) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < label.size()) {
    while (i < label.size() && !is_word_byte(static_cast<unsigned char>(label[i]))) ++i;
    std::size_t start = i;
    while (i < label.size() && is_word_byte(static_cast<unsigned char>(label[i]))) ++i;
    if (i == start) continue;
    auto word = lowercase(label.substr(start, i - start));
    if (stopwords.contains(word)) continue;
    if (std::find(out.begin(), out.end(), word) == out.end()) out.push_back(std::move(word));
  }
  return out;
}

std::vector<std::string> tokenize(const CategoryLabel& label, const StopwordList& stopwords) {
  if (label.is_unspecified()) return {};
  return tokenize(std::string_view(label.raw()), stopwords);
}

double token_set_similarity(MetricId metric, const std::vector<std::string>& a,
                            const std::vector<std::string>& b, const Taxonomy& t) {
  double best = 0;
  for (const auto& x : a)
    for (const auto& y : b) best = std::max(best, word_similarity(metric, x, y, t));
  return best;
}

double category_similarity(MetricId metric, std::string_view c1, std::string_view c2,
                           const Taxonomy& t) {
  auto a = tokenize(c1);
  if (a.empty()) throw EmptyAfterTokenization(std::string(c1));
  auto b = tokenize(c2);
  if (b.empty()) throw EmptyAfterTokenization(std::string(c2));
  return token_set_similarity(metric, a, b, t);
}

SimilarityMetricSet SimilarityMetricSet::standard(const Taxonomy& t) {
  auto scorer = std::make_shared<CachedScorer>(t);
  std::array<WordMetric, kSize> metrics;
  for (std::size_t i = 0; i < kSize; ++i) {
    metrics[i].name = std::string(metric_name(kAllMetrics[i]));
    metrics[i].score = [scorer, i](std::string_view a, std::string_view b) {
      return scorer->score(i, a, b);
    };
  }
  return SimilarityMetricSet(std::move(metrics));
}

double SimilarityMetricSet::score(std::size_t i, const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) const {
  if (a.empty() || b.empty()) throw EmptyAfterTokenization("");
  const auto& metric = metrics_.at(i);
  double best = 0;
  for (const auto& x : a)
    for (const auto& y : b) best = std::max(best, metric.score(x, y));
  return best;
}

}  // namespace hvd
