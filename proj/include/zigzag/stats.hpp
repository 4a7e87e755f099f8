#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace zigzag {

inline constexpr std::size_t kMaxLag = 5;

struct LineSummary {
  std::size_t n = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  /// autocorrelation[k-1] is the lag-k value; NaN when the line is constant.
  std::array<double, kMaxLag> autocorrelation{};
  bool autocorrelation_defined = true;
  /// Batch-means standard errors (floor(sqrt(n)) batches).
  double mean_se = 0.0;
  double variance_se = 0.0;
  std::array<double, kMaxLag> autocorrelation_se{};
};

/// Throws InputError for fewer than 10 values.
LineSummary summarize_line(std::span<const double> values);

struct DistanceResult {
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// One-sample Kolmogorov-Smirnov distance; threshold 1.63/sqrt(n).
DistanceResult ks_distance(std::span<const double> sample, const std::function<double(double)>& target_cdf);

/// Two-sample Kolmogorov-Smirnov distance; threshold 1.628 sqrt((n+m)/(nm)).
/// Both samples need at least `min_size` values.
DistanceResult two_sample_distance(std::span<const double> a, std::span<const double> b,
                                   std::size_t min_size = 1000);

}  // namespace zigzag
