#include <gtest/gtest.h>

#include <sstream>

#include "hvd/category_sets.hpp"
#include "hvd/error.hpp"
#include "test_support.hpp"

using namespace hvd;

namespace {

AlignmentMap sample_alignment() {
  AlignmentRow a;
  a.portal = "a.org";
  a.category = "Health & Human Services";
  a.csc_category = "Social Services";
  a.picks = {"Social Services", "Social Services", "Health", "Social Services", "Health", "Social Services"};
  a.tally = {{"Social Services", 4}, {"Health", 2}};
  AlignmentRow b;
  b.portal = "a.org";
  b.category = "FOIA";
  b.reason = "no positive similarity to any CSC category";
  AlignmentRow c;
  c.portal = "b.org";
  c.category = "#weird;label=x\twith tab";
  c.csc_category = "Odd=Label;x";
  c.picks.fill("Odd=Label;x");
  c.tally = {{"Odd=Label;x", 6}};
  return AlignmentMap{{b, a, c}};
}

}  // namespace

TEST(TsvFields, EscapeRoundTrip) {
  for (std::string s : {"plain", "tab\there", "line\nbreak", "back\\slash", "#hash", "mid#hash", "cr\r"}) {
    auto e = escape_field(s);
    EXPECT_EQ(e.find('\t'), std::string::npos);
    EXPECT_EQ(e.find('\n'), std::string::npos);
    EXPECT_EQ(unescape_field(e), s);
  }
  EXPECT_EQ(escape_field("#x"), "\\#x");
  EXPECT_EQ(split_tsv_line("a\tb\t"), (std::vector<std::string>{"a", "b", ""}));
}

TEST(Inventory, RoundTripAndComments) {
  PortalCategoryInventory inv{{"New York", {"Education", "City Government"}}, {"Austin", {"Économie"}}};
  std::stringstream ss;
  write_inventory(ss, inv);
  EXPECT_EQ(read_inventory(ss, "mem"), inv);
  std::istringstream bad("Austin\n");
  EXPECT_THROW(read_inventory(bad, "bad"), FormatError);
}

TEST(Inventory, BundledFileHas100Portals) {
  auto inv = load_inventory(testing_support::data_dir() / "inventory_us100.tsv");
  EXPECT_EQ(inv.size(), 100u);
  for (const auto& [portal, labels] : inv) {
    EXPECT_FALSE(labels.empty()) << portal;
    for (const auto& l : labels) EXPECT_FALSE(l.empty());
  }
}

TEST(Csc, RoundTrip) {
  ComprehensiveCategorySet csc({{"Public Safety", 40}, {"Parks", 12}, {"#Tagged", 1}});
  std::stringstream ss;
  write_csc(ss, csc);
  EXPECT_EQ(read_csc(ss, "mem"), csc);
  std::istringstream bad("Parks\tmany\n");
  EXPECT_THROW(read_csc(bad, "bad"), FormatError);
  std::istringstream dup("Parks\t1\nParks\t2\n");
  EXPECT_THROW(read_csc(dup, "dup"), FormatError);
}

TEST(Alignment, RoundTripIncludingUnalignedRows) {
  auto map = sample_alignment();
  std::sort(map.rows.begin(), map.rows.end(), [](const auto& x, const auto& y) {
    return std::tie(x.portal, x.category) < std::tie(y.portal, y.category);
  });
  auto text = serialize_alignment(map);
  std::istringstream in(text);
  auto back = read_alignment(in, "mem");
  EXPECT_EQ(back, map);
  EXPECT_EQ(serialize_alignment(back), text);
  EXPECT_EQ(text.substr(0, 8), "# portal");
}

TEST(Alignment, RejectsMalformedRows) {
  std::istringstream short_row("a.org\tParks\tParks\n");
  EXPECT_THROW(read_alignment(short_row, "s"), FormatError);
  auto text = serialize_alignment(AlignmentMap{{sample_alignment().rows[1]}});
  std::istringstream dup(text + text.substr(text.find('\n') + 1));
  EXPECT_THROW(read_alignment(dup, "d"), FormatError);
}

TEST(Alignment, ValidateAgainstCsc) {
  auto map = sample_alignment();
  ComprehensiveCategorySet csc({{"Social Services", 1}, {"Health", 1}});
  EXPECT_THROW(validate_alignment(map, csc), DanglingAlignment);
  ComprehensiveCategorySet full({{"Social Services", 1}, {"Health", 1}, {"Odd=Label;x", 1}});
  EXPECT_NO_THROW(validate_alignment(map, full));
}
