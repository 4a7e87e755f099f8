#include "zigzag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "zigzag/core_types.hpp"

namespace zigzag {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::array<double, kMaxLag> acf{};
  bool defined = true;
};

Moments moments(std::span<const double> x) {
  Moments m;
  const std::size_t n = x.size();
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  m.defined = ss > 0;
  for (std::size_t k = 1; k <= kMaxLag; ++k) {
    if (!m.defined || k >= n) {
      m.acf[k - 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - m.mean) * (x[i + k] - m.mean);
    m.acf[k - 1] = s / ss;
  }
  return m;
}

double batch_se(const std::vector<double>& stats) {
  const std::size_t b = stats.size();
  if (b < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

}  // namespace

LineSummary summarize_line(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 10) throw InputError("summary needs at least 10 values");
  const Moments all = moments(values);
  LineSummary s;
  s.n = n;
  s.mean = all.mean;
  s.variance = all.variance;
  s.autocorrelation = all.acf;
  s.autocorrelation_defined = all.defined;

  const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t size = n / batches;
  std::vector<double> means, variances;
  std::array<std::vector<double>, kMaxLag> acfs;
  for (std::size_t b = 0; b < batches; ++b) {
    const Moments m = moments(values.subspan(b * size, size));
    means.push_back(m.mean);
    variances.push_back(m.variance);
    if (m.defined)
      for (std::size_t k = 0; k < kMaxLag; ++k)
        if (std::isfinite(m.acf[k])) acfs[k].push_back(m.acf[k]);
  }
  s.mean_se = batch_se(means);
  s.variance_se = batch_se(variances);
  for (std::size_t k = 0; k < kMaxLag; ++k)
    s.autocorrelation_se[k] = all.defined ? batch_se(acfs[k]) : std::numeric_limits<double>::quiet_NaN();
  return s;
}

DistanceResult ks_distance(std::span<const double> sample, const std::function<double(double)>& target_cdf) {
  if (sample.empty()) throw InputError("empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  // Compare both one-sided limits at each jump of the empirical CDF.
  double d = 0.0;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double left = target_cdf(std::nextafter(x[i], -std::numeric_limits<double>::infinity()));
    const double right = target_cdf(x[i]);
    d = std::max({d, std::abs(static_cast<double>(j) / n - right), std::abs(static_cast<double>(i) / n - left)});
    i = j;
  }
  const double threshold = 1.63 / std::sqrt(n);
  return {d, threshold, d <= threshold};
}

DistanceResult two_sample_distance(std::span<const double> a, std::span<const double> b, std::size_t min_size) {
  if (a.size() < min_size || b.size() < min_size || a.empty() || b.empty())
    throw InputError("two-sample test needs at least " + std::to_string(min_size) + " values per sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double threshold = 1.628 * std::sqrt((n + m) / (n * m));
  return {d, threshold, d <= threshold};
}

}  // namespace zigzag
