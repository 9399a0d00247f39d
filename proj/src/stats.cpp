#include "hvd/stats.hpp"

#include <algorithm>
#include <cmath>

#include "hvd/error.hpp"

namespace hvd {

std::vector<std::int64_t> sorted_copy(std::span<const std::int64_t> values) {
  std::vector<std::int64_t> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

double percentile_sorted(std::span<const std::int64_t> sorted, double q) {
  if (sorted.empty()) throw EmptyInput();
  if (!(q >= 0.0 && q <= 1.0)) throw QOutOfRange(q);
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  const auto a = static_cast<double>(sorted[lo]);
  const auto b = static_cast<double>(sorted[hi]);
  return a + frac * (b - a);
}

double percentile(std::span<const std::int64_t> values, double q) {
  if (values.empty()) throw EmptyInput();
  if (!(q >= 0.0 && q <= 1.0)) throw QOutOfRange(q);
  auto sorted = sorted_copy(values);
  return percentile_sorted(sorted, q);
}

StatsSummary describe(std::span<const std::int64_t> values) {
  if (values.empty()) throw EmptyInput();
  auto sorted = sorted_copy(values);

  StatsSummary s;
  s.n = sorted.size();
  for (auto v : sorted) s.total += v;
  s.mean = static_cast<double>(s.total) / static_cast<double>(s.n);

  long double ss = 0;
  for (auto v : sorted) {
    const long double d = static_cast<long double>(v) - s.mean;
    ss += d * d;
  }
  s.stddev = static_cast<double>(std::sqrt(ss / static_cast<long double>(s.n)));

  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = percentile_sorted(sorted, 0.25);
  s.median = percentile_sorted(sorted, 0.5);
  s.q3 = percentile_sorted(sorted, 0.75);
  s.p95 = percentile_sorted(sorted, 0.95);
  return s;
}

std::size_t distribution_class(std::int64_t value) {
  if (value < 0) throw NegativeValue(value);
  if (value < 10) return 0;
  if (value < 100) return 1;
  if (value < 1000) return 2;
  if (value < 10000) return 3;
  return 4;
}

DistributionHistogram bin_distribution(std::span<const std::int64_t> values) {
  DistributionHistogram h;
  for (auto v : values) ++h.counts[distribution_class(v)];
  h.n = values.size();
  return h;
}

std::array<double, kDistributionClasses> DistributionHistogram::percentages() const {
  std::array<double, kDistributionClasses> pct{};
  if (n == 0) return pct;
  for (std::size_t k = 0; k < kDistributionClasses; ++k)
    pct[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(n);
  return pct;
}

std::string_view DistributionHistogram::class_label(std::size_t k) {
  static constexpr std::string_view labels[kDistributionClasses] = {
      "0-10", "10-100", "100-1000", "1000-10000", ">10000"};
  return k < kDistributionClasses ? labels[k] : std::string_view{};
}

}  // namespace hvd
