#include "hvd/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "hvd/error.hpp"

namespace hvd {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string spaces_for_underscores(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

// Splits one line into space-separated fields, remembering where each starts
// so parse errors can point at a byte offset.
class FieldCursor {
 public:
  FieldCursor(std::string_view line, std::size_t line_offset, const std::string& file)
      : line_(line), base_(line_offset), file_(file) {}

  std::string_view next(const char* what) {
    while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
    if (pos_ >= line_.size()) fail(std::string("missing ") + what);
    start_ = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
    return line_.substr(start_, pos_ - start_);
  }

  template <typename T>
  T number(const char* what, int base = 10) {
    auto field = next(what);
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value, base);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      fail(std::string("bad ") + what + " '" + std::string(field) + "'");
    return value;
  }

  [[noreturn]] void fail(const std::string& detail) const {
    throw ParseError(file_, base_ + start_, detail);
  }

  std::size_t field_offset() const { return base_ + start_; }

 private:
  std::string_view line_;
  std::size_t base_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
};

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, pos);
    pos = end + 1;
  }
}

struct PendingPointer {
  SynsetId from;
  std::uint32_t target_offset;
  std::size_t byte_offset;
};

constexpr std::pair<std::string_view, std::string_view> kNounDetachments[] = {
    {"s", ""},     {"ses", "s"},   {"xes", "x"},   {"zes", "z"},
    {"ches", "ch"}, {"shes", "sh"}, {"men", "man"}, {"ies", "y"},
};

}  // namespace

Taxonomy Taxonomy::load(const fs::path& data_dir) {
  std::error_code ec;
  if (!fs::is_directory(data_dir, ec))
    throw MissingFile("WordNet directory not found: " + data_dir.string());
  const fs::path data_path = data_dir / "data.noun";
  const fs::path index_path = data_dir / "index.noun";
  if (!fs::exists(data_path)) throw MissingFile("missing " + data_path.string());
  if (!fs::exists(index_path)) throw MissingFile("missing " + index_path.string());

  Taxonomy t;
  const std::string data_name = data_path.filename().string();
  const std::string data = read_file(data_path);
  std::vector<PendingPointer> pending;

  for_each_line(data, [&](std::string_view line, std::size_t offset) {
    if (line.empty() || line.front() == ' ') return;  // license preamble
    FieldCursor cur(line, offset, data_name);
    Synset s;
    s.offset = cur.number<std::uint32_t>("synset offset");
    cur.number<int>("lex_filenum");
    auto ss_type = cur.next("ss_type");
    if (ss_type != "n") cur.fail("not a noun synset: '" + std::string(ss_type) + "'");
    const auto w_cnt = cur.number<unsigned>("w_cnt", 16);
    if (w_cnt == 0) cur.fail("synset without words");
    for (unsigned i = 0; i < w_cnt; ++i) {
      s.lemmas.push_back(lowercase(cur.next("word")));
      cur.number<unsigned>("lex_id", 16);
    }
    const auto p_cnt = cur.number<unsigned>("p_cnt");
    const auto id = static_cast<SynsetId>(t.synsets_.size());
    for (unsigned i = 0; i < p_cnt; ++i) {
      auto symbol = cur.next("pointer symbol");
      auto target = cur.number<std::uint32_t>("pointer offset");
      std::size_t target_at = cur.field_offset();
      auto pos = cur.next("pointer pos");
      auto st = cur.next("source/target");
      if (st.size() != 4) cur.fail("bad source/target field");
      if ((symbol == "@" || symbol == "@i") && pos == "n")
        pending.push_back({id, target, target_at});
    }
    auto bar = cur.next("gloss separator");
    if (bar != "|") cur.fail("expected '|' before gloss");
    if (!t.by_offset_.emplace(s.offset, id).second) cur.fail("duplicate synset offset");
    t.synsets_.push_back(std::move(s));
    ++t.stats_.records;
  });

  for (const auto& p : pending) {
    auto it = t.by_offset_.find(p.target_offset);
    if (it == t.by_offset_.end())
      throw ParseError(data_name, p.byte_offset,
                       "hypernym points to unknown synset " + std::to_string(p.target_offset));
    auto& hypers = t.synsets_[p.from].hypernyms;
    if (std::find(hypers.begin(), hypers.end(), it->second) == hypers.end())
      hypers.push_back(it->second);
  }

  const std::string index_name = index_path.filename().string();
  const std::string index = read_file(index_path);
  for_each_line(index, [&](std::string_view line, std::size_t offset) {
    if (line.empty() || line.front() == ' ') return;
    FieldCursor cur(line, offset, index_name);
    auto lemma = lowercase(cur.next("lemma"));
    auto pos = cur.next("pos");
    if (pos != "n") cur.fail("not a noun entry");
    const auto synset_cnt = cur.number<unsigned>("synset_cnt");
    const auto p_cnt = cur.number<unsigned>("p_cnt");
    for (unsigned i = 0; i < p_cnt; ++i) cur.next("pointer symbol");
    cur.number<unsigned>("sense_cnt");
    cur.number<unsigned>("tagsense_cnt");
    std::vector<SynsetId> senses;
    senses.reserve(synset_cnt);
    for (unsigned i = 0; i < synset_cnt; ++i) {
      auto off = cur.number<std::uint32_t>("synset offset");
      auto it = t.by_offset_.find(off);
      if (it == t.by_offset_.end())
        cur.fail("index entry '" + lemma + "' points to unknown synset " + std::to_string(off));
      senses.push_back(it->second);
    }
    if (lemma.find('_') != std::string::npos)
      t.lemma_index_[spaces_for_underscores(lemma)] = senses;
    t.lemma_index_[lemma] = std::move(senses);
    ++t.stats_.index_entries;
  });

  const fs::path exc_path = data_dir / "noun.exc";
  if (fs::exists(exc_path)) {
    const std::string exc = read_file(exc_path);
    const std::string exc_name = exc_path.filename().string();
    for_each_line(exc, [&](std::string_view line, std::size_t offset) {
      if (line.empty()) return;
      FieldCursor cur(line, offset, exc_name);
      auto inflected = lowercase(cur.next("inflected form"));
      auto& bases = t.exceptions_[inflected];
      std::istringstream rest{std::string(line.substr(line.find(' ') == std::string_view::npos
                                                          ? line.size()
                                                          : line.find(' ')))};
      std::string base;
      while (rest >> base) bases.push_back(lowercase(base));
      ++t.stats_.exceptions;
    });
  }

  t.finalize();
  return t;
}

void Taxonomy::finalize() {
  std::vector<SynsetId> roots;
  for (SynsetId id = 0; id < synsets_.size(); ++id)
    if (synsets_[id].hypernyms.empty()) roots.push_back(id);
  if (roots.empty() && !synsets_.empty())
    throw CycleDetected("noun hypernym graph has no root");
  if (roots.size() > 1) {
    Synset top;
    top.is_virtual = true;
    top.lemmas = {"*root*"};
    const auto top_id = static_cast<SynsetId>(synsets_.size());
    synsets_.push_back(std::move(top));
    for (auto r : roots) synsets_[r].hypernyms.push_back(top_id);
    roots = {top_id};
    virtual_root_ = true;
  }
  root_ = roots.empty() ? 0 : roots.front();

  const std::size_t n = synsets_.size();
  std::vector<std::vector<SynsetId>> children(n);
  std::vector<std::size_t> pending_parents(n);
  for (SynsetId id = 0; id < n; ++id) {
    pending_parents[id] = synsets_[id].hypernyms.size();
    for (auto h : synsets_[id].hypernyms) children[h].push_back(id);
  }

  // Parents before children; anything left unvisited sits on a cycle.
  ancestors_.assign(n, {});
  std::deque<SynsetId> queue;
  if (n > 0) queue.push_back(root_);
  std::size_t visited = 0;
  std::vector<std::pair<SynsetId, int>> merged;
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    ++visited;
    auto& mine = ancestors_[id];
    mine.clear();
    mine.emplace_back(id, 0);
    for (auto h : synsets_[id].hypernyms) {
      merged.clear();
      const auto& theirs = ancestors_[h];
      std::size_t i = 0, j = 0;
      while (i < mine.size() || j < theirs.size()) {
        if (j == theirs.size() || (i < mine.size() && mine[i].first < theirs[j].first)) {
          merged.push_back(mine[i++]);
        } else if (i == mine.size() || theirs[j].first < mine[i].first) {
          merged.emplace_back(theirs[j].first, theirs[j].second + 1);
          ++j;
        } else {
          merged.emplace_back(mine[i].first, std::min(mine[i].second, theirs[j].second + 1));
          ++i;
          ++j;
        }
      }
      mine.swap(merged);
    }
    for (auto c : children[id])
      if (--pending_parents[c] == 0) queue.push_back(c);
  }
  if (visited != n) {
    for (SynsetId id = 0; id < n; ++id)
      if (pending_parents[id] != 0)
        throw CycleDetected("hypernym cycle through synset " +
                            std::to_string(synsets_[id].offset));
  }

  // Depth is the shortest hypernym path to the root.
  max_depth_ = 0;
  for (SynsetId id = 0; id < n; ++id) {
    auto it = std::lower_bound(ancestors_[id].begin(), ancestors_[id].end(),
                               std::pair<SynsetId, int>{root_, 0},
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    synsets_[id].depth = it->second;
    max_depth_ = std::max(max_depth_, it->second);
  }

  hyponym_counts_.assign(n, 0);
  for (SynsetId id = 0; id < n; ++id)
    for (const auto& [anc, dist] : ancestors_[id])
      if (anc != id) ++hyponym_counts_[anc];

  const double log_n = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  for (SynsetId id = 0; id < n; ++id) {
    double ic = 0;
    if (log_n > 0)
      ic = 1.0 - std::log(static_cast<double>(hyponym_counts_[id]) + 1.0) / log_n;
    synsets_[id].ic = std::clamp(ic, 0.0, 1.0);
  }
}

void Taxonomy::check(SynsetId id) const {
  if (id >= synsets_.size()) throw UnknownSynset("unknown synset id " + std::to_string(id));
}

const Synset& Taxonomy::synset(SynsetId id) const {
  check(id);
  return synsets_[id];
}

std::optional<SynsetId> Taxonomy::find_offset(std::uint32_t offset) const {
  auto it = by_offset_.find(offset);
  if (it == by_offset_.end()) return std::nullopt;
  return it->second;
}

std::span<const SynsetId> Taxonomy::lookup(std::string_view lemma) const {
  auto it = lemma_index_.find(lowercase(lemma));
  if (it == lemma_index_.end()) return {};
  return it->second;
}

std::vector<SynsetId> Taxonomy::senses(std::string_view word) const {
  const std::string w = lowercase(word);
  std::vector<std::string> forms;
  if (auto it = exceptions_.find(w); it != exceptions_.end()) forms = it->second;
  forms.push_back(w);
  for (const auto& [suffix, replacement] : kNounDetachments) {
    if (w.size() > suffix.size() && w.ends_with(suffix))
      forms.push_back(w.substr(0, w.size() - suffix.size()) + std::string(replacement));
  }
  std::vector<SynsetId> out;
  for (const auto& f : forms)
    for (auto id : lookup(f))
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  return out;
}

std::span<const std::pair<SynsetId, int>> Taxonomy::ancestors(SynsetId id) const {
  check(id);
  return ancestors_[id];
}

std::optional<int> Taxonomy::shortest_path(SynsetId a, SynsetId b) const {
  check(a);
  check(b);
  if (a == b) return 0;
  const auto& xa = ancestors_[a];
  const auto& xb = ancestors_[b];
  std::optional<int> best;
  std::size_t i = 0, j = 0;
  while (i < xa.size() && j < xb.size()) {
    if (xa[i].first < xb[j].first) {
      ++i;
    } else if (xb[j].first < xa[i].first) {
      ++j;
    } else {
      int d = xa[i].second + xb[j].second;
      if (!best || d < *best) best = d;
      ++i;
      ++j;
    }
  }
  return best;
}

SynsetId Taxonomy::lcs(SynsetId a, SynsetId b) const {
  check(a);
  check(b);
  if (a == b) return a;
  const auto& xa = ancestors_[a];
  const auto& xb = ancestors_[b];
  std::optional<SynsetId> best;
  std::size_t i = 0, j = 0;
  while (i < xa.size() && j < xb.size()) {
    if (xa[i].first < xb[j].first) {
      ++i;
    } else if (xb[j].first < xa[i].first) {
      ++j;
    } else {
      auto c = xa[i].first;
      // Ancestors are visited in ascending id, so strict '>' keeps the
      // smallest id among equally deep candidates.
      if (!best || synsets_[c].depth > synsets_[*best].depth) best = c;
      ++i;
      ++j;
    }
  }
  if (!best) throw UnknownSynset("no common subsumer");
  return *best;
}

std::size_t Taxonomy::hyponym_count(SynsetId id) const {
  check(id);
  return hyponym_counts_[id];
}

double Taxonomy::intrinsic_ic(SynsetId id) const { return synset(id).ic; }

}  // namespace hvd
