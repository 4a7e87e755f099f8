#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "zigzag/core_types.hpp"
#include "zigzag/finite_solver.hpp"

// Zigzag chains on Z (constant first-cell family) and on the cycle Z/nZ.

namespace zigzag {

/// Joint law of a cyclic zigzag on a finite alphabet of size `kappa`.
/// Index order is (x0, y0, x1, y1, ..., x_{n-1}, y_{n-1}) with x0 most significant.
struct CyclicJointLaw {
  std::size_t n = 1;
  std::size_t kappa = 0;
  std::vector<double> weights;

  std::size_t index(std::span<const std::size_t> x, std::span<const std::size_t> y) const;
  /// Law of the first line (x0..x_{n-1}), x0 most significant.
  std::vector<double> first_line() const;
  /// Law of the second line (y0..y_{n-1}).
  std::vector<double> second_line() const;
};

/// Residual of rho_{i+1} = rho_i du for the constant family rho_i = rho0.
CheckReport compatibility_check(const Vector& rho0, const Matrix& d, const Matrix& u, const Vector& weights,
                                double tol = kFiniteTol);
CheckReport compatibility_check(const Vector& rho0, const Matrix& d, const Matrix& u, double tol = kFiniteTol);

/// Same check for a window of an arbitrary family (rho_0, ..., rho_{m-1}).
CheckReport compatibility_check_family(const std::vector<Vector>& family, const Matrix& d, const Matrix& u,
                                       const Vector& weights, double tol = kFiniteTol);

/// Point-mass family of the blocked exclusion configuration x_i = 2ri, on the
/// position lattice {0, r, 2r, ...}: state j is position j*r, d keeps the
/// particle in place and u jumps to the next particle two states further on.
struct FiniteFamily {
  std::vector<Vector> family;
  Matrix d;
  Matrix u;
};
FiniteFamily frozen_exclusion_family(std::size_t particles);

/// Factorisation and commutation as on N, plus rho0 D = rho0 together with
/// compatibility of the constant family (report "stationarity_z").
std::array<CheckReport, 3> check_hzmc_z(const DiscreteKernel& kernel, const HzmcSpec& hzmc, double tol = kFiniteTol);
std::array<CheckReport, 3> check_hzmc_z(const TransitionTensor& tensor, const HzmcSpec& hzmc,
                                        double tol = kFiniteTol);

/// trace((D W U W)^n) where W holds the reference weights. Throws InputError
/// when the result is not finite and positive.
double partition_function(const Matrix& d, const Matrix& u, std::size_t n, const Vector& weights);
double partition_function(const Matrix& d, const Matrix& u, std::size_t n);

/// Finite alphabets only; kappa^{2n} <= kEnumerationBudget.
CyclicJointLaw chzmc_density(const ChzmcSpec& spec);

/// Normalised first-line law from the closed form prod du(x_i;x_{i+1}) / Z.
std::vector<double> chzmc_first_line_formula(const ChzmcSpec& spec);

/// Reports "cyclic_factorisation" and "cyclic_commutation". The latter carries
/// witness "branch": 0 when the DU = UD screen decided, 1 for the n-tuple sweep.
std::array<CheckReport, 2> check_chzmc_conditions(const TransitionTensor& tensor, const ChzmcSpec& spec,
                                                  double tol = kFiniteTol);

struct ChzmcSolution {
  BaseTriple triple;
  EigenSolveResult nu;
  EigenSolveResult eta;
  ChzmcSpec spec;
  /// belyaev, cyclic_product, cyclic_factorisation, cyclic_commutation
  std::vector<CheckReport> reports;

  bool invariant() const;
  const CheckReport& report(const std::string& condition) const;
};

/// Builds the candidate (D, U) from the eta eigenfunction and tests the n-fold
/// product identity for it. Failures are reported, not thrown.
ChzmcSolution solve_chzmc(const TransitionTensor& tensor, std::size_t n, double tol = kFiniteTol,
                          const PowerOptions& options = {});

/// One synchronous step of the PCA on the cycle applied to the second line of
/// the chain; sup-distance between the pushed law and the original law.
CheckReport bruteforce_cycle_invariance(const TransitionTensor& tensor, const ChzmcSpec& spec,
                                        double tol = kFiniteTol);

}  // namespace zigzag
