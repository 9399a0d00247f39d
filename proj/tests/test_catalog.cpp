#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hvd/catalog.hpp"
#include "hvd/error.hpp"
#include "test_support.hpp"

using namespace hvd;
using testing_support::record;
using testing_support::snapshot;

TEST(GroupByCategory, PartitionsWithUnspecifiedGroup) {
  auto snap = snapshot({record("1", "A", 1), record("2", "A", 2), record("3", std::nullopt, 3)});
  auto groups = group_by_category(snap);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups.at(CategoryLabel("A")).size(), 2u);
  EXPECT_EQ(groups.at(CategoryLabel::unspecified()).size(), 1u);
}

TEST(GroupByCategory, EmptySnapshotGivesEmptyMap) {
  EXPECT_TRUE(group_by_category(snapshot({})).empty());
}

TEST(GroupByCategory, CaseVariantsStayDistinct) {
  auto snap = snapshot({record("1", "business", 1), record("2", "Business", 2),
                        record("3", "Business", 3)});
  auto groups = group_by_category(snap);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups.at(CategoryLabel("business")).size(), 1u);
  EXPECT_EQ(groups.at(CategoryLabel("Business")).size(), 2u);
}

TEST(GroupByCategory, PortalLabelNamedUnspecifiedIsNotTheSentinel) {
  auto snap = snapshot({record("1", "Unspecified", 1), record("2", std::nullopt, 2)});
  auto groups = group_by_category(snap);
  EXPECT_EQ(groups.size(), 2u);
}

TEST(GroupByCategory, WhitespaceNormalizationIsOptIn) {
  auto snap = snapshot({record("1", "Public  Safety", 1), record("2", " Public Safety", 2),
                        record("3", "Public Safety", 3)});
  EXPECT_EQ(group_by_category(snap).size(), 3u);
  auto normalized = group_by_category(snap, GroupingOptions{true});
  ASSERT_EQ(normalized.size(), 1u);
  EXPECT_EQ(normalized.begin()->second.size(), 3u);
}

TEST(GroupByCategory, PartitionAndOrderIndependenceProperty) {
  std::mt19937_64 rng(7);
  const char* labels[] = {"A", "B", "C", "Parks & Recreation", "Économie"};
  for (int round = 0; round < 200; ++round) {
    std::vector<DatasetRecord> recs;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      std::optional<std::string> cat;
      if (rng() % 4) cat = labels[rng() % 5];
      recs.push_back(record("id" + std::to_string(i), cat, static_cast<std::int64_t>(rng() % 1000)));
    }
    auto shuffled = recs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto g1 = group_by_category(snapshot(recs));
    auto g2 = group_by_category(snapshot(shuffled));
    EXPECT_EQ(g1, g2);
    std::size_t total = 0;
    std::set<std::string> seen;
    for (const auto& [label, members] : g1) {
      total += members.size();
      for (const auto& m : members) {
        EXPECT_TRUE(seen.insert(m.id).second);
        if (label.is_unspecified()) EXPECT_FALSE(m.category.has_value());
        else EXPECT_EQ(m.category, label.raw());
      }
    }
    EXPECT_EQ(total, recs.size());
  }
}

namespace {
PortalSnapshot with_uncategorized(std::size_t total, std::size_t uncategorized) {
  std::vector<DatasetRecord> recs;
  for (std::size_t i = 0; i < total; ++i)
    recs.push_back(record("d" + std::to_string(i),
                          i < uncategorized ? std::nullopt : std::optional<std::string>("X"), 0));
  return snapshot(std::move(recs));
}
}  // namespace

TEST(UncategorizedShare, AustinProportion) {
  EXPECT_NEAR(uncategorized_share(with_uncategorized(4419, 2310)), 0.523, 5e-4);
}

TEST(UncategorizedShare, SanFranciscoProportion) {
  EXPECT_NEAR(uncategorized_share(with_uncategorized(1133, 1)), 0.00088, 5e-6);
}

TEST(UncategorizedShare, FullyCategorizedIsZero) {
  EXPECT_EQ(uncategorized_share(with_uncategorized(10, 0)), 0.0);
}

TEST(UncategorizedShare, EmptySnapshotThrows) {
  EXPECT_THROW(uncategorized_share(snapshot({})), EmptySnapshot);
}

TEST(PortalSnapshot, RejectsDuplicateIdsAndNegativeCounts) {
  EXPECT_THROW(snapshot({record("1", "A", 1), record("1", "B", 2)}), InvalidArgument);
  EXPECT_THROW(snapshot({record("1", "A", -1)}), InvalidArgument);
  EXPECT_THROW(snapshot({record("1", "A", 1, -5)}), InvalidArgument);
}

TEST(PortalSpec, DomainValidation) {
  EXPECT_TRUE(is_valid_domain("data.cityofnewyork.us"));
  EXPECT_TRUE(is_valid_domain("127.0.0.1:8080"));
  EXPECT_FALSE(is_valid_domain(""));
  EXPECT_FALSE(is_valid_domain("bad domain.org"));
  EXPECT_FALSE(is_valid_domain("-lead.example.org"));
  EXPECT_FALSE(is_valid_domain("host:notaport"));
  PortalSpec spec = testing_support::portal();
  spec.population = -1;
  EXPECT_THROW(validate(spec), InvalidArgument);
}

TEST(Timestamps, FormatAndParseRoundTrip) {
  auto tp = parse_utc("2024-05-09T13:45:10Z");
  ASSERT_TRUE(tp.has_value());
  EXPECT_EQ(format_utc(*tp), "2024-05-09T13:45:10Z");
  EXPECT_FALSE(parse_utc("2024-05-09").has_value());
  EXPECT_FALSE(parse_utc("2024-13-09T00:00:00Z").has_value());
}
