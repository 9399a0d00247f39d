#include "hvd/category_sets.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hvd/error.hpp"

namespace hvd {

namespace fs = std::filesystem;

std::string escape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  if (!field.empty() && field.front() == '#') {
    out += "\\#";
    field.remove_prefix(1);
  }
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (c != '\\' || i + 1 == field.size()) {
      out += c;
      continue;
    }
    char n = field[++i];
    switch (n) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: out += n;  // \\, \#, \; and \= map to the character itself
    }
  }
  return out;
}

std::vector<std::string> split_tsv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(unescape_field(line.substr(start, tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

namespace {

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(split_tsv_line(line), line_no);
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::size_t parse_count(const std::string& text, const std::string& source, std::size_t line,
                        const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw FormatError(source, line, std::string("bad ") + what + " '" + text + "'");
  return v;
}

std::string escape_tally_label(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ';' || c == '=' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string format_tally(const std::vector<VoteCount>& tally) {
  std::string out;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (i) out += ';';
    out += escape_tally_label(tally[i].category);
    out += '=';
    out += std::to_string(tally[i].votes);
  }
  return out;
}

std::vector<VoteCount> parse_tally(std::string_view text, const std::string& source,
                                   std::size_t line) {
  std::vector<VoteCount> out;
  if (text.empty()) return out;
  std::string label, number;
  bool in_number = false;
  auto flush = [&] {
    if (!in_number) throw FormatError(source, line, "tally item without '='");
    out.push_back({label, static_cast<int>(parse_count(number, source, line, "vote count"))});
    label.clear();
    number.clear();
    in_number = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size()) {
      (in_number ? number : label) += text[++i];
    } else if (c == '=' && !in_number) {
      in_number = true;
    } else if (c == ';') {
      flush();
    } else {
      (in_number ? number : label) += c;
    }
  }
  flush();
  return out;
}

}  // namespace

PortalCategoryInventory read_inventory(std::istream& in, const std::string& source) {
  PortalCategoryInventory inv;
  for_each_record(in, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 2) throw FormatError(source, line, "expected 'portal<TAB>category'");
    if (f[0].empty() || f[1].empty()) throw FormatError(source, line, "empty portal or category");
    inv[f[0]].insert(f[1]);
  });
  return inv;
}

PortalCategoryInventory load_inventory(const fs::path& path) {
  auto in = open_input(path);
  return read_inventory(in, path.string());
}

void write_inventory(std::ostream& out, const PortalCategoryInventory& inv) {
  out << "# portal\tcategory\n";
  for (const auto& [portal, labels] : inv)
    for (const auto& label : labels) out << escape_field(portal) << '\t' << escape_field(label) << '\n';
}

ComprehensiveCategorySet read_csc(std::istream& in, const std::string& source) {
  std::vector<CscEntry> entries;
  for_each_record(in, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 2) throw FormatError(source, line, "expected 'category<TAB>coverage'");
    if (f[0].empty()) throw FormatError(source, line, "empty category");
    entries.push_back({f[0], parse_count(f[1], source, line, "coverage")});
  });
  try {
    return ComprehensiveCategorySet(std::move(entries));
  } catch (const InvalidArgument& e) {
    throw FormatError(source, 0, e.what());
  }
}

ComprehensiveCategorySet load_csc(const fs::path& path) {
  auto in = open_input(path);
  return read_csc(in, path.string());
}

void write_csc(std::ostream& out, const ComprehensiveCategorySet& csc) {
  out << "# category\tcoverage\n";
  for (const auto& e : csc.entries()) out << escape_field(e.category) << '\t' << e.coverage << '\n';
}

AlignmentMap read_alignment(std::istream& in, const std::string& source) {
  AlignmentMap map;
  constexpr std::size_t kColumns = 3 + SimilarityMetricSet::kSize + 2;
  for_each_record(in, [&](const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != kColumns)
      throw FormatError(source, line,
                        "expected " + std::to_string(kColumns) + " columns, got " +
                            std::to_string(f.size()));
    AlignmentRow row;
    row.portal = f[0];
    row.category = f[1];
    if (!f[2].empty()) row.csc_category = f[2];
    for (std::size_t i = 0; i < SimilarityMetricSet::kSize; ++i) row.picks[i] = f[3 + i];
    row.tally = parse_tally(f[3 + SimilarityMetricSet::kSize], source, line);
    row.reason = f[4 + SimilarityMetricSet::kSize];
    if (row.portal.empty() || row.category.empty())
      throw FormatError(source, line, "empty portal or category");
    if (!row.csc_category && row.reason.empty())
      throw FormatError(source, line, "unaligned row without a reason");
    map.rows.push_back(std::move(row));
  });
  std::sort(map.rows.begin(), map.rows.end(), [](const AlignmentRow& a, const AlignmentRow& b) {
    return std::tie(a.portal, a.category) < std::tie(b.portal, b.category);
  });
  for (std::size_t i = 1; i < map.rows.size(); ++i)
    if (map.rows[i].portal == map.rows[i - 1].portal &&
        map.rows[i].category == map.rows[i - 1].category)
      throw FormatError(source, 0,
                        "duplicate pair (" + map.rows[i].portal + ", " + map.rows[i].category + ")");
  return map;
}

AlignmentMap load_alignment(const fs::path& path) {
  auto in = open_input(path);
  return read_alignment(in, path.string());
}

void write_alignment(std::ostream& out, const AlignmentMap& alignment) {
  out << "# portal\tcategory\tcsc_category";
  for (auto m : kAllMetrics) out << '\t' << metric_name(m);
  out << "\ttally\treason\n";
  for (const auto& r : alignment.rows) {
    out << escape_field(r.portal) << '\t' << escape_field(r.category) << '\t'
        << escape_field(r.csc_category.value_or(""));
    for (const auto& p : r.picks) out << '\t' << escape_field(p);
    out << '\t' << escape_field(format_tally(r.tally)) << '\t' << escape_field(r.reason) << '\n';
  }
}

std::string serialize_alignment(const AlignmentMap& alignment) {
  std::ostringstream out;
  write_alignment(out, alignment);
  return out.str();
}

void validate_alignment(const AlignmentMap& alignment, const ComprehensiveCategorySet& csc) {
  for (const auto& r : alignment.rows)
    if (r.csc_category && !csc.contains(*r.csc_category))
      throw DanglingAlignment(r.portal, r.category,
                              "target '" + *r.csc_category + "' is not a CSC category");
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hvd
