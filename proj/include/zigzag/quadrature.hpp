#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "zigzag/core_types.hpp"

namespace zigzag {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(std::size_t n);

/// Composite Gauss-Legendre integration over a bounded interval.
class PanelQuadrature {
 public:
  /// `panel_width` bounds the length of each panel; `order` nodes per panel.
  explicit PanelQuadrature(double panel_width = 1.0, std::size_t order = 20);

  double integrate(const std::function<double(double)>& f, Interval range) const;

  double panel_width() const { return panel_width_; }
  std::size_t order() const { return nodes_.size(); }
  /// Same rule with panels of half the width.
  PanelQuadrature refined() const { return PanelQuadrature(panel_width_ / 2, nodes_.size()); }

 private:
  double panel_width_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace zigzag
