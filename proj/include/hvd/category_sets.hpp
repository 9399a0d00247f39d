#pragma once

// Tab-separated file formats for inventories, CSCs and alignments.
//
// Fields escape backslash, tab and newline as \\, \t and \n; a field that
// starts with '#' is written as \#. Lines starting with '#' are comments.
//
//   inventory:  portal <TAB> category
//   csc:        category <TAB> coverage
//   alignment:  portal <TAB> category <TAB> csc_category <TAB> six metric
//               picks <TAB> tally <TAB> reason
//
// The alignment tally is "label=votes" items joined by ';' ('=' and ';'
// inside labels are backslash-escaped). Unaligned rows leave csc_category,
// picks and tally empty and state a reason.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hvd/categorization.hpp"

namespace hvd {

std::string escape_field(std::string_view field);
std::string unescape_field(std::string_view field);
std::vector<std::string> split_tsv_line(std::string_view line);

PortalCategoryInventory read_inventory(std::istream& in, const std::string& source);
PortalCategoryInventory load_inventory(const std::filesystem::path& path);
void write_inventory(std::ostream& out, const PortalCategoryInventory& inv);

ComprehensiveCategorySet read_csc(std::istream& in, const std::string& source);
ComprehensiveCategorySet load_csc(const std::filesystem::path& path);
void write_csc(std::ostream& out, const ComprehensiveCategorySet& csc);

AlignmentMap read_alignment(std::istream& in, const std::string& source);
AlignmentMap load_alignment(const std::filesystem::path& path);
void write_alignment(std::ostream& out, const AlignmentMap& alignment);
std::string serialize_alignment(const AlignmentMap& alignment);

// Re-checks a (possibly hand-edited) alignment: every aligned target must be
// a CSC member. Throws DanglingAlignment.
void validate_alignment(const AlignmentMap& alignment, const ComprehensiveCategorySet& csc);

// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace hvd
