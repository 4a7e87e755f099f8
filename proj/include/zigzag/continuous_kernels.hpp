#pragma once

#include <array>
#include <cstddef>
#include <utility>

#include "zigzag/core_types.hpp"
#include "zigzag/finite_solver.hpp"
#include "zigzag/quadrature.hpp"

// Kernels on the real line: the Gaussian family with its closed-form invariant
// chain, the Beta family with its Gamma candidates, and quadrature-backed
// versions of the factorisation/commutation/stationarity checks.

namespace zigzag {

struct GaussianPcaParams {
  double m;
  double sigma;

  /// Throws InputError unless |m| > 2 and sigma > 0.
  GaussianPcaParams(double m, double sigma);

  /// l = 1 + sqrt(1 - 4/m^2)
  double l() const;
  /// (1 - 4/m^2)^{-1/4} sigma
  double stationary_sd() const;
};

struct Ar1Params {
  double phi = 0.0;
  double theta = 0.0;
  double innovation_var = 1.0;

  double stationary_variance() const { return innovation_var / (1.0 - phi * phi); }
};

struct BetaPcaParams {
  double alpha;
  double beta;
  double m_shift;
  /// Rate of the Gamma candidates (mean alpha/theta).
  double theta_rate;

  /// Throws InputError unless every parameter is positive.
  BetaPcaParams(double alpha, double beta, double m_shift, double theta_rate);
};

double normal_pdf(double x, double mean, double sd);
/// Shape-rate Gamma density.
double gamma_pdf(double x, double shape, double rate);
double beta_pdf(double x, double alpha, double beta);

/// t(a,b;c) = g[(a+b)/m, sigma](c)
KernelDensity gaussian_kernel_density(const GaussianPcaParams& params);

/// Same kernel except T(a,a;.) is the point mass at a.
KernelDensity gaussian_diag_kernel_density(const GaussianPcaParams& params);

/// Closed-form invariant chain of the Gaussian kernel.
struct GaussianInvariant {
  double l = 0.0;
  double phi = 0.0;
  /// sqrt(2/l) sigma
  double innovation_sd = 0.0;
  double stationary_sd = 0.0;
  ContinuousHzmc chain;
};
GaussianInvariant gaussian_invariant_hzmc(const GaussianPcaParams& params);

Ar1Params ar1_parameters(const GaussianPcaParams& params);

/// Analytic eigenvalue of the discretised eta operator for the Gaussian kernel
/// with base point 0 and nu(0) = 1.
double gaussian_eta_eigenvalue(const GaussianPcaParams& params);
/// sqrt(pi sigma^2) / (1 + sqrt(1 - 4/m^2))^2, kept as a reference value.
double gaussian_eta_eigenvalue_quoted(const GaussianPcaParams& params);

/// Markov kernel y = phi x + N(0, sd^2).
MarkovDensity ar1_markov_density(double phi, double sd);
LineDensity normal_line_density(double mean, double sd);

/// Beta kernel: T(a,b;.) is the law of (b-a) X + a - m with X ~ Beta(alpha, beta);
/// a point mass at a - m when a == b.
KernelDensity beta_kernel_density(const BetaPcaParams& params);

/// Shifted Gamma kernels d1(a;c) = Gamma(alpha,theta)(c - a + m), u1(c;b) = Gamma(beta,theta)(b - c - m).
std::pair<MarkovDensity, MarkovDensity> beta_candidate_kernels(const BetaPcaParams& params);

/// Candidate chain (rho, D1, U1) with rho = N(0, rho_sd^2).
ContinuousHzmc beta_candidate_hzmc(const BetaPcaParams& params, double rho_sd = 0.5);

/// Gauss-Legendre grids sized from the parameters (half-widths documented in the README).
GridMeasure default_gaussian_grid(const GaussianPcaParams& params, std::size_t points = 257);
GridMeasure default_beta_grid(const BetaPcaParams& params, std::size_t points = 257);

/// Kernel density sampled on grid^3, with the grid weights as reference measure.
DiscreteKernel discretize(const KernelDensity& kernel, const GridMeasure& grid);

struct GridEtaResult {
  BaseTriple triple;
  EigenSolveResult nu;
  EigenSolveResult eta;
};

/// Base triple at the grid node nearest the origin; nu and eta normalised to
/// unit quadrature mass.
GridEtaResult grid_eta_solve(const KernelDensity& kernel, const GridMeasure& grid, const PowerOptions& options = {});

struct QuadratureOptions {
  double tolerance = kQuadratureTol;
  double panel_width = 1.0;
  std::size_t order = 20;
};

/// Factorisation over grid triples, commutation over grid pairs, stationarity
/// over grid points. du, ud and rho0 D are computed by composite quadrature over
/// the kernels' supports; the grid only supplies evaluation points. Pairs where
/// the kernel is atomic are skipped. A note is attached when halving the panel
/// width moves a residual by more than 10x.
std::array<CheckReport, 3> quadrature_check_conditions(const KernelDensity& kernel, const ContinuousHzmc& hzmc,
                                                       const GridMeasure& grid,
                                                       const QuadratureOptions& options = {});

/// Grid mass of pairs (a,b), off the diagonal, where the two kernels differ
/// (atomic status differs, or max_c |t - t'| > 1e-9). Passes when it is zero.
CheckReport mu_equivalence_probe(const KernelDensity& kernel_a, const KernelDensity& kernel_b,
                                 const GridMeasure& grid);

}  // namespace zigzag
