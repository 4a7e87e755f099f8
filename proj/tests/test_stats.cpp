#include <cmath>
#include <random>

#include "doctest.h"
#include "zigzag/continuous_kernels.hpp"
#include "zigzag/simulator.hpp"
#include "zigzag/stats.hpp"

using namespace zigzag;

namespace {

double normal_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); }

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> xs(n);
  for (double& x : xs) x = g(rng);
  return xs;
}

}  // namespace

TEST_SUITE("line summaries") {
  TEST_CASE("a constant line has zero variance and undefined autocorrelation") {
    const std::vector<double> xs(50, 3.5);
    const LineSummary s = summarize_line(xs);
    CHECK(s.mean == 3.5);
    CHECK(s.variance == 0.0);
    CHECK_FALSE(s.autocorrelation_defined);
    for (double a : s.autocorrelation) CHECK(std::isnan(a));
  }

  TEST_CASE("short input is rejected") {
    CHECK_THROWS_AS(summarize_line(std::vector<double>(9, 1.0)), InputError);
    CHECK_NOTHROW(summarize_line(normals(10, 1)));
  }

  TEST_CASE("i.i.d. normals have lag-1 autocorrelation near zero") {
    const LineSummary s = summarize_line(normals(100000, 17));
    CHECK(s.autocorrelation_defined);
    CHECK(std::abs(s.autocorrelation[0]) < 3 * s.autocorrelation_se[0]);
    CHECK(std::abs(s.mean) < 3 * s.mean_se);
    CHECK(std::abs(s.variance - 1) < 3 * s.variance_se);
    for (double a : s.autocorrelation) CHECK(std::abs(a) <= 1 + 1e-12);
  }

  TEST_CASE("AR(1) coefficient is recovered") {
    const double phi = 0.5;
    const auto e = normals(100000, 23);
    std::vector<double> xs(e.size());
    xs[0] = e[0] / std::sqrt(1 - phi * phi);
    for (std::size_t i = 1; i < xs.size(); ++i) xs[i] = phi * xs[i - 1] + e[i];
    const LineSummary s = summarize_line(xs);
    CHECK(std::abs(s.autocorrelation[0] - phi) < 3 * s.autocorrelation_se[0]);
    CHECK(std::abs(s.autocorrelation[1] - phi * phi) < 3 * s.autocorrelation_se[1]);
    CHECK(std::abs(s.variance - 1 / (1 - phi * phi)) < 3 * s.variance_se);
  }

  TEST_CASE("mean and variance estimates are calibrated over repeated trials") {
    int covered = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      std::mt19937_64 rng(1000 + trial);
      std::exponential_distribution<double> ex(2.0);
      std::vector<double> xs(4096);
      for (double& x : xs) x = ex(rng);
      const LineSummary s = summarize_line(xs);
      if (std::abs(s.mean - 0.5) <= 4 * s.mean_se && std::abs(s.variance - 0.25) <= 4 * s.variance_se) ++covered;
    }
    CHECK(covered >= 99);
  }
}

TEST_SUITE("one-sample distance") {
  TEST_CASE("a sample from the target passes") {
    const auto xs = normals(10000, 5);
    const DistanceResult r = ks_distance(xs, [](double x) { return normal_cdf(x, 1); });
    CHECK(r.pass);
    CHECK(r.threshold == doctest::Approx(0.0163));
  }

  TEST_CASE("a sample against its own empirical CDF has distance zero") {
    auto xs = normals(500, 6);
    xs.push_back(xs[3]);  // a tie
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    auto ecdf = [&](double x) {
      return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
             static_cast<double>(sorted.size());
    };
    CHECK(ks_distance(xs, ecdf).distance == 0.0);
  }

  TEST_CASE("a wider target fails") {
    const auto xs = normals(10000, 7);
    CHECK_FALSE(ks_distance(xs, [](double x) { return normal_cdf(x, std::sqrt(2.0)); }).pass);
  }

  TEST_CASE("an empty sample is rejected") {
    CHECK_THROWS_AS(ks_distance(std::vector<double>{}, [](double) { return 0.5; }), InputError);
  }
}

TEST_SUITE("two-sample distance") {
  TEST_CASE("identical samples have distance zero") {
    const auto xs = normals(2000, 9);
    const DistanceResult r = two_sample_distance(xs, xs);
    CHECK(r.distance == 0.0);
    CHECK(r.pass);
  }

  TEST_CASE("independent samples of one law pass, shifted ones fail") {
    const auto a = normals(5000, 10), b = normals(5000, 11);
    CHECK(two_sample_distance(a, b).pass);
    auto c = b;
    for (double& x : c) x += 0.2;
    CHECK_FALSE(two_sample_distance(a, c).pass);
  }

  TEST_CASE("short samples are rejected") {
    CHECK_THROWS_AS(two_sample_distance(normals(999, 1), normals(2000, 2)), InputError);
    CHECK_NOTHROW(two_sample_distance(normals(20, 1), normals(20, 2), 10));
  }

  TEST_CASE("image of a beta candidate line starts from rho D1") {
    const BetaPcaParams p(1, 1, 1, 1);
    const ContinuousHzmc chain = beta_candidate_hzmc(p);
    const KernelDensity k = beta_kernel_density(p);
    const std::size_t replicas = 5000;
    std::vector<double> image, direct, rho;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      CounterRng a(31, kStreamLine, 2 * r), b(31, kStreamLine, 2 * r + 1), c(31, kStreamCell, r);
      const auto line = sample_hzmc_line(chain, 3, a);
      image.push_back(k.sample(line[0], line[2], c));
      const auto other = sample_hzmc_line(chain, 3, b);
      direct.push_back(other[1]);
      rho.push_back(other[0]);
    }
    CHECK(two_sample_distance(image, direct).pass);
    CHECK_FALSE(two_sample_distance(image, rho).pass);
  }
}
