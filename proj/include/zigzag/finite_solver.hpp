#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "zigzag/core_types.hpp"

// Condition checks and invariant zigzag-chain construction for kernels on a
// finite support. Every routine takes a DiscreteKernel so the same code serves
// the counting measure (finite alphabets) and Gauss-Legendre grids (discretised
// continuous kernels); integrals become weighted sums.

namespace zigzag {

struct BaseTriple {
  std::size_t a0 = 0;
  std::size_t b0 = 0;
  std::size_t c0 = 0;

  friend bool operator==(const BaseTriple&, const BaseTriple&) = default;
};

struct PowerOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
  /// Positive starting vector; uniform when empty.
  std::optional<Vector> start;
};

struct EigenSolveResult {
  /// Positive, normalised to unit mass under the reference weights.
  Vector vector;
  double eigenvalue = 0.0;
  std::size_t iterations = 0;
  /// ||M v - lambda v||_inf / (lambda ||v||_inf)
  double residual = 0.0;
};

/// Perron direction of a non-negative matrix by power iteration.
EigenSolveResult power_iteration(const Matrix& m, const Vector& weights, const PowerOptions& options = {});

/// Lexicographically smallest triple whose row (a0,b0) maximises min_c t(a0,b0;c).
BaseTriple select_base_triple(const DiscreteKernel& kernel);
BaseTriple select_base_triple(const TransitionTensor& tensor);

/// The two sides of the quartic identity at (a,b,c) for the given base triple.
std::pair<double, double> belyaev_products(const DiscreteKernel& kernel, const BaseTriple& triple, std::size_t a,
                                           std::size_t b, std::size_t c);

/// Quartic identity over all (a,b,c). The symmetric six-variable form is
/// evaluated too when n^6 <= 1e8 and stored as witness "general_residual".
CheckReport check_belyaev(const DiscreteKernel& kernel, const BaseTriple& triple, double tol = kFiniteTol);
CheckReport check_belyaev(const TransitionTensor& tensor, const BaseTriple& triple, double tol = kFiniteTol);

/// Quartic identity restricted to the diagonal b = a.
CheckReport check_belyaev_diag(const DiscreteKernel& kernel, const BaseTriple& triple, double tol = kFiniteTol);

/// Positive eigenvector of M1[a][c] = t(c,c;a) w_c.
EigenSolveResult solve_nu(const DiscreteKernel& kernel, const PowerOptions& options = {});
EigenSolveResult solve_nu(const TransitionTensor& tensor, const PowerOptions& options = {});

/// Positive eigenvector of M2[a][x] = nu(a) t(a,a;c0) / t(a,x;c0) w_x.
EigenSolveResult solve_eta(const DiscreteKernel& kernel, const BaseTriple& triple, const Vector& nu,
                           const PowerOptions& options = {});
EigenSolveResult solve_eta(const TransitionTensor& tensor, const BaseTriple& triple, const Vector& nu,
                           const PowerOptions& options = {});

/// Residual of the cubic fixed-point equation for eta over all (a,b).
CheckReport check_eta_cubic(const DiscreteKernel& kernel, const BaseTriple& triple, const Vector& eta,
                            double tol = kFiniteTol);
CheckReport check_eta_cubic(const TransitionTensor& tensor, const BaseTriple& triple, const Vector& eta,
                            double tol = kFiniteTol);

/// Down and up kernel densities built from a positive weight function phi.
std::pair<Matrix, Matrix> build_hzmc_kernels(const DiscreteKernel& kernel, const BaseTriple& triple,
                                             const Vector& phi);
std::pair<Matrix, Matrix> build_hzmc_kernels(const TransitionTensor& tensor, const BaseTriple& triple,
                                             const Vector& phi);

struct StationaryResult {
  Vector rho0;
  /// ||rho0 D - rho0||_inf
  double residual = 0.0;
  std::size_t iterations = 0;
  /// False when D is reducible and the returned vector is one of several.
  bool unique = true;
};

/// Invariant law of the chain with density d under the reference weights,
/// by power iteration from the uniform law.
StationaryResult stationary_distribution(const Matrix& d, const Vector& weights, const PowerOptions& options = {});
StationaryResult stationary_distribution(const Matrix& d, const PowerOptions& options = {});

/// Strong connectivity of the positive-entry graph.
bool irreducible(const Matrix& m);

/// Union of the supports of the first-line marginals rho0 (DU)^i.
std::vector<bool> zigzag_support(const HzmcSpec& hzmc, const Vector& weights);

/// Factorisation, commutation and stationarity residuals of a candidate chain,
/// quantified over its support.
std::array<CheckReport, 3> check_toom_conditions(const DiscreteKernel& kernel, const HzmcSpec& hzmc,
                                                 double tol = kFiniteTol);
std::array<CheckReport, 3> check_toom_conditions(const TransitionTensor& tensor, const HzmcSpec& hzmc,
                                                 double tol = kFiniteTol);

/// Largest enumeration the brute-force oracles accept.
inline constexpr std::size_t kEnumerationBudget = 10'000'000;

/// Joint law of (b0, c0, b1, ..., ck, b_{k+1}) after one PCA step applied to the
/// chain's second line; index order is the zigzag order with b0 most significant.
std::vector<double> push_forward_zigzag(const TransitionTensor& tensor, const HzmcSpec& hzmc, std::size_t k);

/// Cylinder weights r0(b0) prod d(b_i;c_i) u(c_i;b_{i+1}) in the same layout.
std::vector<double> hzmc_cylinder_weights(const HzmcSpec& hzmc, std::size_t k);

/// Max over k <= k_max of || push-forward - cylinder ||_inf.
CheckReport bruteforce_invariance(const TransitionTensor& tensor, const HzmcSpec& hzmc, std::size_t k_max,
                                  double tol = kFiniteTol);

/// Full construction pipeline: base triple, nu, eta, kernels, rho0, and all reports.
struct HzmcSolution {
  BaseTriple triple;
  EigenSolveResult nu;
  EigenSolveResult eta;
  HzmcSpec spec;
  /// belyaev, belyaev_diagonal, eta_cubic, stationary_exists, factorisation, commutation, stationarity
  std::vector<CheckReport> reports;

  bool invariant() const;
  const CheckReport& report(const std::string& condition) const;
};

/// Requires a strictly positive kernel; throws InputError otherwise.
HzmcSolution solve_hzmc(const DiscreteKernel& kernel, double tol = kFiniteTol, const PowerOptions& options = {});
HzmcSolution solve_hzmc(const TransitionTensor& tensor, double tol = kFiniteTol, const PowerOptions& options = {});

}  // namespace zigzag
