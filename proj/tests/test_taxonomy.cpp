#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "hvd/error.hpp"
#include "hvd/taxonomy.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hvd;
using testing_support::mini_taxonomy;
using testing_support::TempDir;

namespace {

SynsetId id_of(const Taxonomy& t, const std::string& word) {
  auto senses = t.lookup(word);
  if (senses.empty()) throw std::runtime_error("no sense for " + word);
  return senses.front();
}

int depth_of(const std::string& word) {
  const auto& t = mini_taxonomy();
  return t.synset(id_of(t, word)).depth;
}

// Writes a tiny database where `edges` maps each synset number to its
// hypernyms. Offsets are the synset numbers themselves.
void write_db(const std::filesystem::path& dir,
              const std::vector<std::vector<int>>& edges) {
  std::ofstream data(dir / "data.noun");
  std::ofstream index(dir / "index.noun");
  data << "  1 test database\n";
  for (std::size_t i = 0; i < edges.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08zu", i + 1);
    data << buf << " 03 n 01 w" << i << " 0 " << std::string(3 - std::to_string(edges[i].size()).size(), '0')
         << edges[i].size();
    for (int h : edges[i]) {
      char hb[16];
      std::snprintf(hb, sizeof hb, "%08d", h + 1);
      data << " @ " << hb << " n 0000";
    }
    data << " | gloss\n";
    index << "w" << i << " n 1 1 @ 1 0 " << buf << "\n";
  }
}

}  // namespace

TEST(TaxonomyMini, LoadsAllRecords) {
  const auto& t = mini_taxonomy();
  EXPECT_EQ(t.size(), 10u);
  EXPECT_EQ(t.load_stats().records, 10u);
  EXPECT_EQ(t.load_stats().skipped, 0u);
  EXPECT_FALSE(t.has_virtual_root());
  EXPECT_EQ(t.root(), id_of(t, "entity"));
  EXPECT_EQ(t.max_depth(), 3);
}

TEST(TaxonomyMini, DepthsFollowShortestRootDistance) {
  EXPECT_EQ(depth_of("entity"), 0);
  EXPECT_EQ(depth_of("object"), 1);
  EXPECT_EQ(depth_of("abstraction"), 1);
  EXPECT_EQ(depth_of("animal"), 2);
  EXPECT_EQ(depth_of("artifact"), 2);
  EXPECT_EQ(depth_of("idea"), 2);
  EXPECT_EQ(depth_of("dog"), 3);
  EXPECT_EQ(depth_of("cat"), 3);
  EXPECT_EQ(depth_of("bird"), 3);
  EXPECT_EQ(depth_of("puppy"), 3);
}

TEST(TaxonomyMini, IgnoresNonHypernymPointers) {
  const auto& t = mini_taxonomy();
  EXPECT_EQ(t.synset(id_of(t, "dog")).hypernyms.size(), 1u);
  EXPECT_EQ(t.synset(id_of(t, "puppy")).hypernyms.size(), 2u);
}

TEST(TaxonomyMini, IntrinsicInformationContent) {
  const auto& t = mini_taxonomy();
  EXPECT_EQ(t.hyponym_count(id_of(t, "animal")), 4u);
  EXPECT_NEAR(t.intrinsic_ic(id_of(t, "animal")), 1 - std::log(5.0) / std::log(10.0), 1e-12);
  EXPECT_NEAR(t.intrinsic_ic(id_of(t, "animal")), 0.301, 1e-3);
  EXPECT_EQ(t.intrinsic_ic(id_of(t, "cat")), 1.0);
  EXPECT_EQ(t.intrinsic_ic(id_of(t, "entity")), 0.0);
  EXPECT_EQ(t.hyponym_count(id_of(t, "idea")), 1u);
}

TEST(TaxonomyMini, ShortestPaths) {
  const auto& t = mini_taxonomy();
  auto dog = id_of(t, "dog"), cat = id_of(t, "cat"), animal = id_of(t, "animal");
  EXPECT_EQ(t.shortest_path(dog, dog), 0);
  EXPECT_EQ(t.shortest_path(dog, animal), 1);
  EXPECT_EQ(t.shortest_path(dog, cat), 2);
  EXPECT_EQ(t.shortest_path(id_of(t, "puppy"), id_of(t, "abstraction")), 2);
  for (SynsetId a = 0; a < t.size(); ++a)
    for (SynsetId b = 0; b < t.size(); ++b) {
      EXPECT_EQ(t.shortest_path(a, b), oracle::shortest_path(t, a, b));
      EXPECT_EQ(t.shortest_path(a, b), t.shortest_path(b, a));
    }
}

TEST(TaxonomyMini, LowestCommonSubsumer) {
  const auto& t = mini_taxonomy();
  EXPECT_EQ(t.lcs(id_of(t, "dog"), id_of(t, "cat")), id_of(t, "animal"));
  EXPECT_EQ(t.lcs(id_of(t, "dog"), id_of(t, "puppy")), id_of(t, "dog"));
  EXPECT_EQ(t.lcs(id_of(t, "cat"), id_of(t, "idea")), id_of(t, "entity"));
  // puppy reaches both object-side and abstraction-side ancestors.
  EXPECT_EQ(t.lcs(id_of(t, "puppy"), id_of(t, "idea")), id_of(t, "idea"));
  EXPECT_THROW(t.lcs(0, 999), UnknownSynset);
  EXPECT_THROW(t.synset(999), UnknownSynset);
}

TEST(TaxonomyMini, AncestorsAreSortedWithMinimumHops) {
  const auto& t = mini_taxonomy();
  auto puppy = id_of(t, "puppy");
  auto anc = t.ancestors(puppy);
  auto expected = oracle::upward_distances(t, puppy);
  ASSERT_EQ(anc.size(), expected.size());
  std::size_t i = 0;
  for (const auto& [id, hops] : expected) {
    EXPECT_EQ(anc[i].first, id);
    EXPECT_EQ(anc[i].second, hops);
    ++i;
  }
}

TEST(TaxonomyMini, LemmaLookupAndMorphology) {
  const auto& t = mini_taxonomy();
  EXPECT_EQ(t.lookup("domestic_dog").size(), 1u);
  EXPECT_EQ(t.lookup("domestic dog").front(), id_of(t, "dog"));
  EXPECT_EQ(t.lookup("physical object").front(), id_of(t, "object"));
  EXPECT_TRUE(t.lookup("dogs").empty());
  EXPECT_EQ(t.senses("dogs"), std::vector<SynsetId>{id_of(t, "dog")});
  EXPECT_EQ(t.senses("doggies"), std::vector<SynsetId>{id_of(t, "dog")});
  EXPECT_EQ(t.senses("birds"), std::vector<SynsetId>{id_of(t, "bird")});
  EXPECT_TRUE(t.senses("zebra").empty());
  EXPECT_FALSE(t.contains_word("ideas2"));
  EXPECT_TRUE(t.contains_word("ideas"));
}

TEST(TaxonomyLoad, MissingFiles) {
  TempDir dir;
  EXPECT_THROW(Taxonomy::load(dir.path()), MissingFile);
  EXPECT_THROW(Taxonomy::load(dir / "absent"), MissingFile);
  std::ofstream(dir / "index.noun") << "";
  EXPECT_THROW(Taxonomy::load(dir.path()), MissingFile);
}

TEST(TaxonomyLoad, ParseErrorCarriesByteOffset) {
  TempDir dir;
  write_db(dir.path(), {{}, {0}});
  std::string good = testing_support::read_file(dir / "data.noun");
  {
    std::ofstream out(dir / "data.noun", std::ios::app);
    out << "00000099 03 n zz broken\n";
  }
  try {
    Taxonomy::load(dir.path());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "data.noun");
    // The bad w_cnt field starts 14 bytes into the appended line.
    EXPECT_EQ(e.byte_offset(), good.size() + 14);
  }
}

TEST(TaxonomyLoad, DanglingPointerIsParseError) {
  TempDir dir;
  write_db(dir.path(), {{}, {7}});
  EXPECT_THROW(Taxonomy::load(dir.path()), ParseError);
}

TEST(TaxonomyLoad, CycleIsDetected) {
  TempDir dir;
  write_db(dir.path(), {{}, {0, 3}, {1}, {2}});
  EXPECT_THROW(Taxonomy::load(dir.path()), CycleDetected);
}

TEST(TaxonomyLoad, MultipleRootsGetVirtualRoot) {
  TempDir dir;
  write_db(dir.path(), {{}, {}, {0}, {1}});
  auto t = Taxonomy::load(dir.path());
  EXPECT_TRUE(t.has_virtual_root());
  EXPECT_EQ(t.size(), 5u);
  EXPECT_TRUE(t.synset(t.root()).is_virtual);
  EXPECT_EQ(t.synset(t.root()).depth, 0);
  EXPECT_EQ(t.shortest_path(id_of(t, "w2"), id_of(t, "w3")), 4);
  EXPECT_EQ(t.lcs(id_of(t, "w2"), id_of(t, "w3")), t.root());
}

TEST(TaxonomyLoad, ToleratesCarriageReturns) {
  TempDir dir;
  write_db(dir.path(), {{}, {0}});
  for (const char* name : {"data.noun", "index.noun"}) {
    std::string text = testing_support::read_file(dir / name);
    std::string crlf;
    for (char c : text) {
      if (c == '\n') crlf += '\r';
      crlf += c;
    }
    std::ofstream(dir / name, std::ios::binary) << crlf;
  }
  auto t = Taxonomy::load(dir.path());
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.lookup("w1").size(), 1u);
}

TEST(TaxonomyFull, LoadsCompleteNounDatabase) {
  auto start = std::chrono::steady_clock::now();
  auto t = Taxonomy::load(testing_support::wordnet_dir());
  auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed, std::chrono::seconds(30));
  EXPECT_EQ(t.load_stats().records, 82115u);
  EXPECT_EQ(t.load_stats().skipped, 0u);
  EXPECT_FALSE(t.has_virtual_root());
  auto entity = t.lookup("entity");
  ASSERT_FALSE(entity.empty());
  EXPECT_EQ(entity.front(), t.root());
  EXPECT_EQ(t.synset(t.root()).depth, 0);
  EXPECT_EQ(t.intrinsic_ic(t.root()), 0.0);
}

TEST(TaxonomyFull, LeavesHaveUnitIc) {
  const auto& t = testing_support::full_wordnet();
  std::size_t leaves = 0;
  for (SynsetId s = 0; s < t.size(); ++s)
    if (t.hyponym_count(s) == 0) {
      ++leaves;
      EXPECT_EQ(t.intrinsic_ic(s), 1.0);
    }
  EXPECT_GT(leaves, 60000u);
}

TEST(TaxonomyFull, DogCatPathMatchesTraversalOracle) {
  const auto& t = testing_support::full_wordnet();
  auto path = oracle::word_path_length(t, "dog", "cat");
  ASSERT_TRUE(path.has_value());
  EXPECT_EQ(*path, 4);
  std::optional<int> best;
  for (auto a : t.lookup("dog"))
    for (auto b : t.lookup("cat"))
      if (auto d = t.shortest_path(a, b); d && (!best || *d < *best)) best = d;
  EXPECT_EQ(best, path);
}

TEST(TaxonomyFull, RandomPathsMatchOracle) {
  const auto& t = testing_support::full_wordnet();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    SynsetId a = static_cast<SynsetId>(rng() % t.size());
    SynsetId b = static_cast<SynsetId>(rng() % t.size());
    EXPECT_EQ(t.shortest_path(a, b), oracle::shortest_path(t, a, b));
    auto l = t.lcs(a, b);
    int lcs_depth = t.synset(l).depth;
    for (const auto& [anc, hops] : t.ancestors(a)) {
      (void)hops;
      auto bs = t.ancestors(b);
      bool common = std::any_of(bs.begin(), bs.end(), [&](const auto& p) { return p.first == anc; });
      if (common) EXPECT_LE(t.synset(anc).depth, lcs_depth);
    }
  }
}
