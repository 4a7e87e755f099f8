#include "zigzag/continuous_kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "zigzag/rng.hpp"

namespace zigzag {

namespace {

constexpr double kNormalReach = 12.0;  // support half-width in standard deviations

// Upper end of the effective support of Gamma(shape, rate).
double gamma_reach(double shape, double rate) { return (shape + kNormalReach * std::sqrt(shape) + 40.0) / rate; }

double gamma_draw(double shape, double rate, CounterRng& rng) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double normal_draw(double mean, double sd, CounterRng& rng) { return std::normal_distribution<double>(mean, sd)(rng); }

}  // namespace

GaussianPcaParams::GaussianPcaParams(double m_, double sigma_) : m(m_), sigma(sigma_) {
  if (!(std::abs(m) > 2)) {
    std::ostringstream os;
    os << "gaussian kernel requires |m| > 2 (got m = " << m
       << "); otherwise the cell variance grows without bound and no integrable eigenfunction exists";
    throw InputError(os.str());
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InputError("gaussian kernel requires sigma > 0");
}

double GaussianPcaParams::l() const { return 1.0 + std::sqrt(1.0 - 4.0 / (m * m)); }

double GaussianPcaParams::stationary_sd() const { return std::pow(1.0 - 4.0 / (m * m), -0.25) * sigma; }

BetaPcaParams::BetaPcaParams(double a, double b, double m, double theta)
    : alpha(a), beta(b), m_shift(m), theta_rate(theta) {
  for (double v : {a, b, m, theta})
    if (!(v > 0) || !std::isfinite(v)) throw InputError("beta kernel parameters alpha, beta, m, theta must be positive");
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double gamma_pdf(double x, double shape, double rate) {
  if (x < 0) return 0.0;
  if (x == 0) return shape == 1.0 ? rate : (shape < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape));
}

double beta_pdf(double x, double alpha, double beta) {
  if (x < 0 || x > 1) return 0.0;
  const double log_b = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  if ((x == 0 && alpha != 1.0) || (x == 1 && beta != 1.0)) {
    const bool infinite = (x == 0 && alpha < 1.0) || (x == 1 && beta < 1.0);
    return infinite ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double la = alpha == 1.0 ? 0.0 : (alpha - 1.0) * std::log(x);
  const double lb = beta == 1.0 ? 0.0 : (beta - 1.0) * std::log1p(-x);
  return std::exp(la + lb - log_b);
}

KernelDensity gaussian_kernel_density(const GaussianPcaParams& p) {
  KernelDensity k;
  k.name = "gaussian";
  const double m = p.m, s = p.sigma;
  k.density = [m, s](double a, double b, double c) { return normal_pdf(c, (a + b) / m, s); };
  k.sample = [m, s](double a, double b, CounterRng& rng) { return normal_draw((a + b) / m, s, rng); };
  k.support = [m, s](double a, double b) {
    const double mu = (a + b) / m;
    return Interval{mu - kNormalReach * s, mu + kNormalReach * s};
  };
  return k;
}

KernelDensity gaussian_diag_kernel_density(const GaussianPcaParams& p) {
  KernelDensity k = gaussian_kernel_density(p);
  k.name = "gaussian_diag";
  auto base_density = k.density;
  auto base_sample = k.sample;
  k.density = [base_density](double a, double b, double c) { return a == b ? 0.0 : base_density(a, b, c); };
  k.sample = [base_sample](double a, double b, CounterRng& rng) {
    const double x = base_sample(a, b, rng);
    return a == b ? a : x;
  };
  k.atom = [](double a, double b) -> std::optional<double> {
    if (a == b) return a;
    return std::nullopt;
  };
  return k;
}

MarkovDensity ar1_markov_density(double phi, double sd) {
  MarkovDensity k;
  k.density = [phi, sd](double x, double y) { return normal_pdf(y, phi * x, sd); };
  k.sample = [phi, sd](double x, CounterRng& rng) { return normal_draw(phi * x, sd, rng); };
  k.support = [phi, sd](double x) { return Interval{phi * x - kNormalReach * sd, phi * x + kNormalReach * sd}; };
  k.preimage = [phi, sd](double y) {
    if (phi == 0.0) return Interval{};
    const double lo = (y - kNormalReach * sd) / phi, hi = (y + kNormalReach * sd) / phi;
    return Interval{std::min(lo, hi), std::max(lo, hi)};
  };
  return k;
}

LineDensity normal_line_density(double mean, double sd) {
  LineDensity r;
  r.density = [mean, sd](double x) { return normal_pdf(x, mean, sd); };
  r.sample = [mean, sd](CounterRng& rng) { return normal_draw(mean, sd, rng); };
  r.support = Interval{mean - kNormalReach * sd, mean + kNormalReach * sd};
  return r;
}

GaussianInvariant gaussian_invariant_hzmc(const GaussianPcaParams& p) {
  GaussianInvariant g;
  g.l = p.l();
  g.phi = 2.0 / (p.m * g.l);
  g.innovation_sd = std::sqrt(2.0 / g.l) * p.sigma;
  g.stationary_sd = p.stationary_sd();
  g.chain.d = ar1_markov_density(g.phi, g.innovation_sd);
  g.chain.u = ar1_markov_density(g.phi, g.innovation_sd);
  g.chain.rho0 = normal_line_density(0.0, g.stationary_sd);
  return g;
}

Ar1Params ar1_parameters(const GaussianPcaParams& p) {
  const double l = p.l();
  return Ar1Params{2.0 / (p.m * l), 0.0, 2.0 * p.sigma * p.sigma / l};
}

double gaussian_eta_eigenvalue(const GaussianPcaParams& p) {
  const double a = (p.l() / 4.0 - 1.0 / (2.0 * p.m * p.m)) / (p.sigma * p.sigma);
  return std::sqrt(std::numbers::pi / a);
}

double gaussian_eta_eigenvalue_quoted(const GaussianPcaParams& p) {
  const double l = p.l();
  return std::sqrt(std::numbers::pi * p.sigma * p.sigma) / (l * l);
}

KernelDensity beta_kernel_density(const BetaPcaParams& p) {
  KernelDensity k;
  k.name = "beta";
  const double al = p.alpha, be = p.beta, m = p.m_shift;
  k.density = [al, be, m](double a, double b, double c) {
    if (a == b) return 0.0;
    const double width = b - a;
    return beta_pdf((c + m - a) / width, al, be) / std::abs(width);
  };
  k.sample = [al, be, m](double a, double b, CounterRng& rng) {
    const double x = gamma_draw(al, 1.0, rng);
    const double y = gamma_draw(be, 1.0, rng);
    return (b - a) * (x / (x + y)) + a - m;
  };
  k.support = [m](double a, double b) { return Interval{std::min(a, b) - m, std::max(a, b) - m}; };
  k.atom = [m](double a, double b) -> std::optional<double> {
    if (a == b) return a - m;
    return std::nullopt;
  };
  return k;
}

std::pair<MarkovDensity, MarkovDensity> beta_candidate_kernels(const BetaPcaParams& p) {
  const double al = p.alpha, be = p.beta, m = p.m_shift, th = p.theta_rate;
  const double reach_d = gamma_reach(al, th), reach_u = gamma_reach(be, th);
  MarkovDensity d, u;
  d.density = [al, th, m](double a, double c) { return gamma_pdf(c - a + m, al, th); };
  d.sample = [al, th, m](double a, CounterRng& rng) { return a - m + gamma_draw(al, th, rng); };
  d.support = [m, reach_d](double a) { return Interval{a - m, a - m + reach_d}; };
  d.preimage = [m, reach_d](double c) { return Interval{c + m - reach_d, c + m}; };
  u.density = [be, th, m](double c, double b) { return gamma_pdf(b - c - m, be, th); };
  u.sample = [be, th, m](double c, CounterRng& rng) { return c + m + gamma_draw(be, th, rng); };
  u.support = [m, reach_u](double c) { return Interval{c + m, c + m + reach_u}; };
  u.preimage = [m, reach_u](double b) { return Interval{b - m - reach_u, b - m}; };
  return {std::move(d), std::move(u)};
}

ContinuousHzmc beta_candidate_hzmc(const BetaPcaParams& params, double rho_sd) {
  if (!(rho_sd > 0)) throw InputError("rho standard deviation must be positive");
  auto [d, u] = beta_candidate_kernels(params);
  return ContinuousHzmc{std::move(d), std::move(u), normal_line_density(0.0, rho_sd)};
}

GridMeasure default_gaussian_grid(const GaussianPcaParams& params, std::size_t points) {
  return GridMeasure::gauss_legendre(points, 8.0 * params.stationary_sd());
}

GridMeasure default_beta_grid(const BetaPcaParams& p, std::size_t points) {
  const double th = p.theta_rate;
  const double spread = (p.alpha + std::sqrt(p.alpha) + p.beta + std::sqrt(p.beta)) / th + std::abs(p.m_shift);
  return GridMeasure::gauss_legendre(points, 8.0 * spread);
}

DiscreteKernel discretize(const KernelDensity& kernel, const GridMeasure& grid) {
  DiscreteKernel k;
  k.n = grid.size();
  k.weights = grid.weights;
  auto density = kernel.density;
  auto points = grid.points;
  k.t = [density, points](std::size_t a, std::size_t b, std::size_t c) {
    return density(points[a], points[b], points[c]);
  };
  return k;
}

GridEtaResult grid_eta_solve(const KernelDensity& kernel, const GridMeasure& grid, const PowerOptions& options) {
  if (grid.size() == 0) throw InputError("empty grid");
  std::size_t origin = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid.points[i]) < std::abs(grid.points[origin])) origin = i;
  const DiscreteKernel k = discretize(kernel, grid);
  GridEtaResult r;
  r.triple = BaseTriple{origin, origin, origin};
  r.nu = solve_nu(k, options);
  r.eta = solve_eta(k, r.triple, r.nu.vector, options);
  return r;
}

std::array<CheckReport, 3> quadrature_check_conditions(const KernelDensity& kernel, const ContinuousHzmc& hzmc,
                                                       const GridMeasure& grid, const QuadratureOptions& options) {
  const std::size_t n = grid.size();
  if (n == 0) throw InputError("empty grid");
  const auto& P = grid.points;
  const PanelQuadrature coarse(options.panel_width, options.order);
  const PanelQuadrature fine = coarse.refined();
  const auto& d = hzmc.d;
  const auto& u = hzmc.u;

  Matrix dtab(n, n), utab(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      dtab(i, j) = d.density(P[i], P[j]);
      utab(i, j) = u.density(P[i], P[j]);
    }

  // Compositions on grid pairs under both rules.
  Matrix du(n, n), du_fine(n, n), ud(n, n), ud_fine(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = P[i], b = P[j];
      auto f_du = [&](double y) { return d.density(a, y) * u.density(y, b); };
      auto f_ud = [&](double y) { return u.density(a, y) * d.density(y, b); };
      const Interval r_du = d.support(a).intersect(u.preimage(b));
      const Interval r_ud = u.support(a).intersect(d.preimage(b));
      du(i, j) = coarse.integrate(f_du, r_du);
      du_fine(i, j) = fine.integrate(f_du, r_du);
      ud(i, j) = coarse.integrate(f_ud, r_ud);
      ud_fine(i, j) = fine.integrate(f_ud, r_ud);
    }

  double r1 = 0.0, r1_fine = 0.0;
  std::vector<double> w1;
  std::size_t atomic_pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (kernel.atomic_at(P[i], P[j])) {
        ++atomic_pairs;
        continue;
      }
      for (std::size_t c = 0; c < n; ++c) {
        const double t = kernel.density(P[i], P[j], P[c]);
        const double rhs = dtab(i, c) * utab(c, j);
        const double r = std::abs(t * du(i, j) - rhs);
        r1_fine = std::max(r1_fine, std::abs(t * du_fine(i, j) - rhs));
        if (r > r1 || std::isnan(r)) {
          r1 = r;
          w1 = {P[i], P[j], P[c]};
        }
      }
    }

  Eigen::Index i2 = 0, j2 = 0;
  const double r2 = (du - ud).cwiseAbs().maxCoeff(&i2, &j2);
  const double r2_fine = (du_fine - ud_fine).cwiseAbs().maxCoeff();

  const auto& rho = hzmc.rho0;
  double r3 = 0.0, r3_fine = 0.0;
  std::vector<double> w3;
  for (std::size_t c = 0; c < n; ++c) {
    const double y = P[c];
    auto f = [&](double x) { return rho.density(x) * d.density(x, y); };
    const Interval range = rho.support.intersect(d.preimage(y));
    const double target = rho.density(y);
    const double r = std::abs(coarse.integrate(f, range) - target);
    r3_fine = std::max(r3_fine, std::abs(fine.integrate(f, range) - target));
    if (r > r3 || std::isnan(r)) {
      r3 = r;
      w3 = {y};
    }
  }

  std::array<CheckReport, 3> out{make_report("factorisation", r1, options.tolerance),
                                 make_report("commutation", r2, options.tolerance),
                                 make_report("stationarity", r3, options.tolerance)};
  out[0].location = w1;
  out[1].location = {P[i2], P[j2]};
  out[2].location = w3;
  const double fines[3] = {r1_fine, r2_fine, r3_fine};
  for (int k = 0; k < 3; ++k) {
    out[k].witnesses.push_back({"refined_residual", {fines[k]}});
    const double r = out[k].max_residual;
    if (r > options.tolerance / 10 && r > 10 * fines[k])
      out[k].notes.push_back("warning: residual drops more than 10x under panel halving; quadrature too coarse");
  }
  out[0].witnesses.push_back({"grid", {double(n), grid.halfwidth()}});
  if (atomic_pairs > 0) out[0].notes.push_back(std::to_string(atomic_pairs) + " atomic grid pairs skipped");
  return out;
}

CheckReport mu_equivalence_probe(const KernelDensity& ka, const KernelDensity& kb, const GridMeasure& grid) {
  const std::size_t n = grid.size();
  const auto& P = grid.points;
  double off_mass = 0.0;
  std::size_t diagonal = 0, off = 0;
  std::vector<double> where;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto atom_a = ka.atom ? ka.atom(P[i], P[j]) : std::nullopt;
      const auto atom_b = kb.atom ? kb.atom(P[i], P[j]) : std::nullopt;
      bool differ = false;
      if (atom_a.has_value() != atom_b.has_value()) {
        differ = true;
      } else if (atom_a) {
        differ = std::abs(*atom_a - *atom_b) > 1e-9;
      } else {
        for (std::size_t c = 0; c < n && !differ; ++c)
          differ = !(std::abs(ka.density(P[i], P[j], P[c]) - kb.density(P[i], P[j], P[c])) <= 1e-9);
      }
      if (!differ) continue;
      if (i == j) {
        ++diagonal;
      } else {
        ++off;
        off_mass += grid.weights[i] * grid.weights[j];
        if (where.empty()) where = {P[i], P[j]};
      }
    }
  CheckReport rep = make_report("mu_equivalence", off_mass, 0.0);
  rep.location = where;
  rep.witnesses.push_back({"diagonal_cells", {double(diagonal)}});
  rep.witnesses.push_back({"off_diagonal_cells", {double(off)}});
  return rep;
}

}  // namespace zigzag
