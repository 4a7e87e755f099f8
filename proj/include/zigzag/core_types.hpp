#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace zigzag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Default tolerances: exact finite checks vs. quadrature-backed checks.
inline constexpr double kFiniteTol = 1e-10;
inline constexpr double kQuadratureTol = 1e-6;
inline constexpr double kStochasticTol = 1e-12;

/// Malformed input: bad files, violated preconditions, rejected parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// An exhaustive enumeration would exceed its memory budget.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FiniteAlphabet {
  std::size_t size = 0;
  std::vector<std::string> labels;

  static FiniteAlphabet indexed(std::size_t k);
  FiniteAlphabet() = default;
  FiniteAlphabet(std::size_t k, std::vector<std::string> l);
};

/// Reference measure on a truncated real line: quadrature nodes and weights.
struct GridMeasure {
  std::vector<double> points;
  std::vector<double> weights;

  GridMeasure() = default;
  GridMeasure(std::vector<double> p, std::vector<double> w);

  std::size_t size() const { return points.size(); }
  double halfwidth() const { return points.empty() ? 0.0 : 0.5 * (points.back() - points.front()); }

  /// Gauss-Legendre nodes on [-L, L].
  static GridMeasure gauss_legendre(std::size_t n, double L);
};

/// Finite-alphabet kernel t(a,b;c) with every (a,b) row a probability vector.
class TransitionTensor {
 public:
  TransitionTensor() = default;
  /// Validates non-negativity and row sums (within kStochasticTol).
  TransitionTensor(FiniteAlphabet alphabet, std::vector<double> entries);

  static TransitionTensor uniform(std::size_t k);

  std::size_t size() const { return alphabet_.size; }
  const FiniteAlphabet& alphabet() const { return alphabet_; }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return t_[(a * alphabet_.size + b) * alphabet_.size + c];
  }
  std::span<const double> row(std::size_t a, std::size_t b) const {
    return {t_.data() + (a * alphabet_.size + b) * alphabet_.size, alphabet_.size};
  }
  const std::vector<double>& entries() const { return t_; }

  /// All entries strictly positive (mu-positive for the counting measure).
  bool positive() const;

  /// Sub-alphabet view; every restricted row must still carry unit mass.
  TransitionTensor restrict_to(std::span<const std::size_t> subset) const;

 private:
  FiniteAlphabet alphabet_;
  std::vector<double> t_;
};

/// Density of a two-neighbour kernel on n support points that carry reference
/// weights. Counting measure: all weights are 1.
struct DiscreteKernel {
  std::size_t n = 0;
  std::vector<double> weights;
  std::function<double(std::size_t, std::size_t, std::size_t)> t;

  static DiscreteKernel from_tensor(const TransitionTensor& tensor);
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool empty() const { return !(lo < hi); }
  double length() const { return hi - lo; }
  Interval intersect(const Interval& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
};

class CounterRng;

/// Continuous two-neighbour kernel: density w.r.t. Lebesgue measure plus an exact sampler.
/// `atom` reports the pairs (a,b) where T(a,b;.) is a Dirac mass instead.
struct KernelDensity {
  std::string name;
  std::function<double(double, double, double)> density;
  std::function<double(double, double, CounterRng&)> sample;
  std::function<Interval(double, double)> support;
  std::function<std::optional<double>(double, double)> atom;

  bool atomic_at(double a, double b) const { return atom && atom(a, b).has_value(); }
};

/// One-step Markov kernel density k(x;y) on the real line.
struct MarkovDensity {
  std::function<double(double, double)> density;
  std::function<double(double, CounterRng&)> sample;
  /// Effective support of k(x;.).
  std::function<Interval(double)> support;
  /// Set of x for which y lies in the effective support of k(x;.).
  std::function<Interval(double)> preimage;
};

/// Probability density on the real line.
struct LineDensity {
  std::function<double(double)> density;
  std::function<double(CounterRng&)> sample;
  Interval support;
};

enum class Lattice { N, Z, Cycle };

std::string to_string(Lattice lattice);

/// Finite (or grid-discretised) horizontal zigzag Markov chain: down kernel d,
/// up kernel u, first-cell law rho0. On Z the constant family rho_i = rho0 is implied.
struct HzmcSpec {
  Matrix d;
  Matrix u;
  Vector rho0;
  Lattice lattice = Lattice::N;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
};

/// Continuous-alphabet zigzag chain given by densities.
struct ContinuousHzmc {
  MarkovDensity d;
  MarkovDensity u;
  LineDensity rho0;
};

/// Cyclic zigzag chain on 2n cells with its partition constant.
struct ChzmcSpec {
  Matrix d;
  Matrix u;
  std::size_t n = 1;
  double z = 0.0;
};

struct SpaceTimeDiagram {
  Lattice lattice = Lattice::N;
  std::size_t width = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  /// (steps+1) x width, row-major; cells dropped by a shrinking window are NaN.
  std::vector<double> states;

  double at(std::size_t t, std::size_t i) const { return states[t * width + i]; }
  std::span<const double> row(std::size_t t) const { return {states.data() + t * width, width}; }
};

struct CheckReport {
  std::string condition;
  double max_residual = 0.0;
  double tolerance = 0.0;
  /// Argmax of the residual (indices or grid coordinates), empty when not applicable.
  std::vector<double> location;
  std::vector<std::pair<std::string, std::vector<double>>> witnesses;
  std::vector<std::string> notes;

  bool pass() const { return max_residual <= tolerance; }
  const std::vector<double>* witness(const std::string& key) const;
};

CheckReport make_report(std::string condition, double residual, double tolerance);

/// Rows rescaled to unit sum; `correction` is max |1 - old row sum|.
struct Normalized {
  std::vector<double> values;
  double correction = 0.0;
};

/// Throws InputError naming the first all-zero (or negative) row.
Normalized normalize_rows(std::span<const double> values, std::size_t row_length);

/// Row-normalises a matrix under reference weights: sum_c m(a,c) w_c = 1.
Matrix normalize_rows(const Matrix& m, const Vector& weights, double* correction = nullptr);

}  // namespace zigzag
