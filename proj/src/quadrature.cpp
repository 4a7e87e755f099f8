#include "zigzag/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zigzag {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(std::size_t n) {
  if (n == 0) throw InputError("Gauss-Legendre rule needs at least one node");
  std::vector<double> x(n), w(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

PanelQuadrature::PanelQuadrature(double panel_width, std::size_t order) : panel_width_(panel_width) {
  if (!(panel_width > 0)) throw InputError("panel width must be positive");
  auto [x, w] = gauss_legendre_rule(order);
  nodes_ = std::move(x);
  weights_ = std::move(w);
}

double PanelQuadrature::integrate(const std::function<double(double)>& f, Interval range) const {
  if (range.empty()) return 0.0;
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi))
    throw InputError("PanelQuadrature: unbounded integration range");
  const auto panels = static_cast<std::size_t>(std::ceil(range.length() / panel_width_));
  const std::size_t count = panels == 0 ? 1 : panels;
  const double h = range.length() / static_cast<double>(count);
  double total = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    const double mid = range.lo + (static_cast<double>(p) + 0.5) * h;
    double part = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) part += weights_[k] * f(mid + 0.5 * h * nodes_[k]);
    total += 0.5 * h * part;
  }
  return total;
}

}  // namespace zigzag
