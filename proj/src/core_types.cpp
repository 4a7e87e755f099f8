#include "zigzag/core_types.hpp"

#include <cmath>
#include <sstream>

#include "zigzag/quadrature.hpp"

namespace zigzag {

FiniteAlphabet FiniteAlphabet::indexed(std::size_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return FiniteAlphabet(k, std::move(labels));
}

FiniteAlphabet::FiniteAlphabet(std::size_t k, std::vector<std::string> l) : size(k), labels(std::move(l)) {
  if (k == 0) throw InputError("alphabet must contain at least one letter");
  if (labels.size() != k) throw InputError("alphabet label count does not match its size");
}

GridMeasure::GridMeasure(std::vector<double> p, std::vector<double> w) : points(std::move(p)), weights(std::move(w)) {
  if (points.size() != weights.size()) throw InputError("grid points and weights differ in length");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] > 0)) throw InputError("grid weights must be positive");
    if (i > 0 && !(points[i] > points[i - 1])) throw InputError("grid points must be strictly increasing");
  }
}

GridMeasure GridMeasure::gauss_legendre(std::size_t n, double L) {
  if (!(L > 0)) throw InputError("grid half-width must be positive");
  auto [x, w] = gauss_legendre_rule(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] *= L;
    w[i] *= L;
  }
  return GridMeasure(std::move(x), std::move(w));
}

TransitionTensor::TransitionTensor(FiniteAlphabet alphabet, std::vector<double> entries)
    : alphabet_(std::move(alphabet)), t_(std::move(entries)) {
  const std::size_t k = alphabet_.size;
  if (t_.size() != k * k * k) throw InputError("transition tensor needs k^3 entries");
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double sum = 0.0;
      for (double v : row(a, b)) {
        if (!(v >= 0) || !std::isfinite(v)) {
          std::ostringstream os;
          os << "transition tensor entry in row (" << a << "," << b << ") is negative or not finite";
          throw InputError(os.str());
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kStochasticTol) {
        std::ostringstream os;
        os.precision(17);
        os << "transition tensor row (" << a << "," << b << ") sums to " << sum;
        throw InputError(os.str());
      }
    }
}

TransitionTensor TransitionTensor::uniform(std::size_t k) {
  return TransitionTensor(FiniteAlphabet::indexed(k), std::vector<double>(k * k * k, 1.0 / static_cast<double>(k)));
}

bool TransitionTensor::positive() const {
  return std::all_of(t_.begin(), t_.end(), [](double v) { return v > 0; });
}

TransitionTensor TransitionTensor::restrict_to(std::span<const std::size_t> subset) const {
  const std::size_t m = subset.size();
  std::vector<std::string> labels;
  for (std::size_t s : subset) {
    if (s >= size()) throw InputError("support index out of range");
    labels.push_back(alphabet_.labels[s]);
  }
  std::vector<double> sub;
  sub.reserve(m * m * m);
  for (std::size_t a : subset)
    for (std::size_t b : subset)
      for (std::size_t c : subset) sub.push_back((*this)(a, b, c));
  return TransitionTensor(FiniteAlphabet(m, std::move(labels)), std::move(sub));
}

DiscreteKernel DiscreteKernel::from_tensor(const TransitionTensor& tensor) {
  DiscreteKernel k;
  k.n = tensor.size();
  k.weights.assign(k.n, 1.0);
  k.t = [tensor](std::size_t a, std::size_t b, std::size_t c) { return tensor(a, b, c); };
  return k;
}

std::string to_string(Lattice lattice) {
  switch (lattice) {
    case Lattice::N: return "N";
    case Lattice::Z: return "Z";
    case Lattice::Cycle: return "cycle";
  }
  return "?";
}

const std::vector<double>* CheckReport::witness(const std::string& key) const {
  for (const auto& [name, values] : witnesses)
    if (name == key) return &values;
  return nullptr;
}

CheckReport make_report(std::string condition, double residual, double tolerance) {
  CheckReport r;
  r.condition = std::move(condition);
  r.max_residual = residual;
  r.tolerance = tolerance;
  return r;
}

Normalized normalize_rows(std::span<const double> values, std::size_t row_length) {
  if (row_length == 0 || values.size() % row_length != 0) throw InputError("row length does not divide the data");
  Normalized out{std::vector<double>(values.begin(), values.end()), 0.0};
  for (std::size_t r = 0; r * row_length < values.size(); ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < row_length; ++j) {
      const double v = values[r * row_length + j];
      if (!(v >= 0)) throw InputError("negative entry in row " + std::to_string(r));
      sum += v;
    }
    if (!(sum > 0)) throw InputError("all-zero row " + std::to_string(r));
    out.correction = std::max(out.correction, std::abs(1.0 - sum));
    for (std::size_t j = 0; j < row_length; ++j) out.values[r * row_length + j] /= sum;
  }
  return out;
}

Matrix normalize_rows(const Matrix& m, const Vector& weights, double* correction) {
  Matrix out = m;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double sum = m.row(r).dot(weights);
    if (!(sum > 0)) throw InputError("all-zero row " + std::to_string(r));
    worst = std::max(worst, std::abs(1.0 - sum));
    out.row(r) /= sum;
  }
  if (correction) *correction = worst;
  return out;
}

}  // namespace zigzag
