#pragma once

// Deterministic statistics over usage counters.
//
// Quantiles use linear interpolation between closest ranks at position
// q*(n-1) of the sorted sample, so q=0 is the minimum and q=1 the maximum.
// The standard deviation is the population form (divide by n).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hvd {

struct StatsSummary {
  std::size_t n = 0;
  std::int64_t total = 0;
  double mean = 0;
  double stddev = 0;
  std::int64_t min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double p95 = 0;
  std::int64_t max = 0;
};

// Throws EmptyInput.
StatsSummary describe(std::span<const std::int64_t> values);

// Throws EmptyInput or QOutOfRange.
double percentile(std::span<const std::int64_t> values, double q);

// Same rule over an already sorted sample; avoids re-sorting when several
// quantiles of one vector are needed.
double percentile_sorted(std::span<const std::int64_t> sorted, double q);

std::vector<std::int64_t> sorted_copy(std::span<const std::int64_t> values);

inline constexpr std::size_t kDistributionClasses = 5;

// Class k holds values in [10^k, 10^(k+1)) for k = 1..3; class 0 is [0, 10)
// and class 4 is [10000, inf).
struct DistributionHistogram {
  std::array<std::size_t, kDistributionClasses> counts{};
  std::size_t n = 0;

  // Percentage of n per class; all zeros when n == 0.
  std::array<double, kDistributionClasses> percentages() const;

  static std::string_view class_label(std::size_t k);
};

std::size_t distribution_class(std::int64_t value);

// Throws NegativeValue.
DistributionHistogram bin_distribution(std::span<const std::int64_t> values);

}  // namespace hvd
