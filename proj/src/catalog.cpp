#include "hvd/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <ctime>
#include <unordered_set>

#include "hvd/error.hpp"

namespace hvd {

std::string_view engine_name(Engine engine) {
  switch (engine) {
    case Engine::socrata:
      return "socrata";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  if (name == "socrata") return Engine::socrata;
  throw InvalidArgument("unknown portal engine: " + std::string(name));
}

namespace {

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
}

}  // namespace

bool is_valid_domain(std::string_view domain) {
  std::string_view host = domain;
  if (auto colon = domain.rfind(':'); colon != std::string_view::npos) {
    host = domain.substr(0, colon);
    auto port = domain.substr(colon + 1);
    if (port.empty() || port.size() > 5) return false;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value == 0 || value > 65535)
      return false;
  }
  if (host.empty() || host.size() > 253) return false;
  std::size_t start = 0;
  while (start <= host.size()) {
    auto dot = host.find('.', start);
    auto label = host.substr(start, dot == std::string_view::npos ? host.npos : dot - start);
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    if (!std::all_of(label.begin(), label.end(), is_label_char)) return false;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return true;
}

void validate(const PortalSpec& spec) {
  if (!is_valid_domain(spec.domain))
    throw InvalidArgument("invalid portal domain: '" + spec.domain + "'");
  if (spec.population < 0)
    throw InvalidArgument("negative population for portal " + spec.domain);
}

CategoryLabel CategoryLabel::unspecified() {
  CategoryLabel label{std::string(kUnspecifiedLabel)};
  label.unspecified_ = true;
  return label;
}

std::strong_ordering CategoryLabel::operator<=>(const CategoryLabel& other) const {
  if (unspecified_ != other.unspecified_) return unspecified_ <=> other.unspecified_;
  return key().compare(other.key()) <=> 0;
}

std::string normalize_whitespace(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_space = false;
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string format_utc(std::chrono::system_clock::time_point tp) {
  std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string utc_now() { return format_utc(std::chrono::system_clock::now()); }

std::optional<std::chrono::system_clock::time_point> parse_utc(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z')
    return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc{} || p != text.data() + pos + len) return std::nullopt;
    return v;
  };
  auto y = field(0, 4), mo = field(5, 2), d = field(8, 2);
  auto h = field(11, 2), mi = field(14, 2), s = field(17, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{unsigned(*mo)},
                                  std::chrono::day{unsigned(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 60) return std::nullopt;
  return std::chrono::sys_days{ymd} + std::chrono::hours{*h} + std::chrono::minutes{*mi} +
         std::chrono::seconds{*s};
}

PortalSnapshot::PortalSnapshot(PortalSpec portal, std::string retrieved_at,
                               std::vector<DatasetRecord> datasets)
    : portal_(std::move(portal)),
      retrieved_at_(std::move(retrieved_at)),
      datasets_(std::move(datasets)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(datasets_.size());
  for (const auto& d : datasets_) {
    if (!seen.insert(d.id).second)
      throw InvalidArgument("duplicate dataset id in snapshot of " + portal_.domain + ": " + d.id);
    if (d.views < 0 || d.downloads < 0)
      throw InvalidArgument("negative usage counter for dataset " + d.id);
  }
}

CategoryGroups group_by_category(const PortalSnapshot& snapshot, GroupingOptions options) {
  CategoryGroups groups;
  for (const auto& d : snapshot.datasets()) {
    if (!d.category) {
      groups[CategoryLabel::unspecified()].push_back(d);
      continue;
    }
    if (!options.normalize_whitespace) {
      groups[CategoryLabel{*d.category}].push_back(d);
      continue;
    }
    CategoryLabel label{*d.category, normalize_whitespace(*d.category)};
    auto it = groups.find(label);
    if (it == groups.end()) {
      groups.emplace(std::move(label), std::vector<DatasetRecord>{d});
      continue;
    }
    // Keep the smallest raw spelling so the representative is order-independent.
    if (label.raw() < it->first.raw()) {
      auto members = std::move(it->second);
      groups.erase(it);
      members.push_back(d);
      groups.emplace(std::move(label), std::move(members));
    } else {
      it->second.push_back(d);
    }
  }
  for (auto& [label, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
  }
  return groups;
}

std::size_t uncategorized_count(const PortalSnapshot& snapshot) {
  return static_cast<std::size_t>(
      std::count_if(snapshot.datasets().begin(), snapshot.datasets().end(),
                    [](const DatasetRecord& d) { return !d.category.has_value(); }));
}

double uncategorized_share(const PortalSnapshot& snapshot) {
  if (snapshot.empty()) throw EmptySnapshot();
  return static_cast<double>(uncategorized_count(snapshot)) /
         static_cast<double>(snapshot.size());
}

}  // namespace hvd
