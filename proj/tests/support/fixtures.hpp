#pragma once

#include <string>
#include <vector>

#include "zigzag/core_types.hpp"

namespace fixture {

/// Three-letter kernel: 0 is absorbing against anything, and on {1,2} the rows are
/// (1,1), (2,2) -> (1/2, 1/2), (1,2) -> (4/5, 1/5), (2,1) -> (1/5, 4/5).
inline zigzag::TransitionTensor three_letter() {
  std::vector<double> e(27, 0.0);
  auto set = [&](int a, int b, double t0, double t1, double t2) {
    e[(a * 3 + b) * 3 + 0] = t0;
    e[(a * 3 + b) * 3 + 1] = t1;
    e[(a * 3 + b) * 3 + 2] = t2;
  };
  set(0, 0, 1, 0, 0);
  set(0, 1, 0, 1, 0);
  set(0, 2, 0, 0, 1);
  set(1, 0, 0, 1, 0);
  set(2, 0, 0, 0, 1);
  set(1, 1, 0, 0.5, 0.5);
  set(2, 2, 0, 0.5, 0.5);
  set(1, 2, 0, 0.8, 0.2);
  set(2, 1, 0, 0.2, 0.8);
  return zigzag::TransitionTensor(zigzag::FiniteAlphabet(3, {"0", "1", "2"}), e);
}

/// The same kernel on {1,2}.
inline zigzag::TransitionTensor two_letter() {
  const std::vector<std::size_t> keep{1, 2};
  return three_letter().restrict_to(keep);
}

/// Down and up kernels of the invariant chain of two_letter().
inline zigzag::Matrix two_letter_d() {
  zigzag::Matrix d(2, 2);
  d << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
  return d;
}

inline zigzag::Matrix two_letter_u() {
  zigzag::Matrix u(2, 2);
  u << 1.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3;
  return u;
}

inline std::string model_dir() { return ZIGZAG_MODEL_DIR; }

}  // namespace fixture
