#include "zigzag/lattice_ext.hpp"

#include <cmath>
#include <sstream>

namespace zigzag {

namespace {

std::size_t guarded_power(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (r > kEnumerationBudget / std::max<std::size_t>(base, 1))
      throw SizeGuardError("cyclic enumeration exceeds budget");
    r *= base;
  }
  return r;
}

void decode(std::size_t idx, std::size_t base, std::vector<std::size_t>& digits) {
  for (std::size_t j = digits.size(); j-- > 0; idx /= base) digits[j] = idx % base;
}

void require_cycle(const ChzmcSpec& spec) {
  if (spec.n == 0) throw InputError("cycle length must be at least 1");
  if (spec.d.rows() != spec.d.cols() || spec.u.rows() != spec.d.rows() || spec.u.cols() != spec.d.cols())
    throw InputError("cyclic chain kernels must be square and of equal size");
}

double cycle_product(const Matrix& m, const std::vector<std::size_t>& x) {
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) p *= m(x[i], x[(i + 1) % x.size()]);
  return p;
}

// Residual of prod du = prod ud over n-cycles: DU = UD screen first, sweep otherwise.
CheckReport cyclic_product_report(std::string name, const Matrix& du, const Matrix& ud, std::size_t n, double tol) {
  const double screen = (du - ud).cwiseAbs().maxCoeff();
  if (screen <= tol) {
    CheckReport rep = make_report(std::move(name), screen, tol);
    rep.witnesses.push_back({"branch", {0.0}});
    rep.notes.push_back("decided by the matrix commutation screen");
    return rep;
  }
  const auto k = static_cast<std::size_t>(du.rows());
  const std::size_t total = guarded_power(k, n);
  std::vector<std::size_t> x(n);
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t idx = 0; idx < total; ++idx) {
    decode(idx, k, x);
    const double r = std::abs(cycle_product(du, x) - cycle_product(ud, x));
    if (r > worst || std::isnan(r)) {
      worst = r;
      where.assign(x.begin(), x.end());
    }
  }
  CheckReport rep = make_report(std::move(name), worst, tol);
  rep.location = where;
  rep.witnesses.push_back({"branch", {1.0}});
  rep.witnesses.push_back({"commutator_norm", {screen}});
  rep.notes.push_back("decided by the n-tuple sweep");
  return rep;
}

}  // namespace

std::size_t CyclicJointLaw::index(std::span<const std::size_t> x, std::span<const std::size_t> y) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) idx = (idx * kappa + x[i]) * kappa + y[i];
  return idx;
}

std::vector<double> CyclicJointLaw::first_line() const {
  std::vector<double> out(guarded_power(kappa, n), 0.0);
  std::vector<std::size_t> z(2 * n);
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    decode(idx, kappa, z);
    std::size_t line = 0;
    for (std::size_t i = 0; i < n; ++i) line = line * kappa + z[2 * i];
    out[line] += weights[idx];
  }
  return out;
}

std::vector<double> CyclicJointLaw::second_line() const {
  std::vector<double> out(guarded_power(kappa, n), 0.0);
  std::vector<std::size_t> z(2 * n);
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    decode(idx, kappa, z);
    std::size_t line = 0;
    for (std::size_t i = 0; i < n; ++i) line = line * kappa + z[2 * i + 1];
    out[line] += weights[idx];
  }
  return out;
}

CheckReport compatibility_check(const Vector& rho0, const Matrix& d, const Matrix& u, const Vector& weights,
                                double tol) {
  return compatibility_check_family({rho0, rho0}, d, u, weights, tol);
}

CheckReport compatibility_check(const Vector& rho0, const Matrix& d, const Matrix& u, double tol) {
  return compatibility_check(rho0, d, u, Vector::Ones(rho0.size()), tol);
}

CheckReport compatibility_check_family(const std::vector<Vector>& family, const Matrix& d, const Matrix& u,
                                       const Vector& weights, double tol) {
  const auto k = d.rows();
  if (d.cols() != k || u.rows() != k || u.cols() != k || weights.size() != k)
    throw InputError("compatibility check: dimension mismatch");
  const Matrix du = d * weights.asDiagonal() * u;
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t i = 0; i + 1 < family.size(); ++i) {
    if (family[i].size() != k || family[i + 1].size() != k) throw InputError("compatibility check: family size");
    const Vector pushed = du.transpose() * (weights.asDiagonal() * family[i]);
    Eigen::Index arg = 0;
    const double r = (pushed - family[i + 1]).cwiseAbs().maxCoeff(&arg);
    if (r > worst || std::isnan(r)) {
      worst = r;
      where = {double(i), double(arg)};
    }
  }
  CheckReport rep = make_report("compatibility", worst, tol);
  rep.location = where;
  return rep;
}

FiniteFamily frozen_exclusion_family(std::size_t particles) {
  if (particles < 2) throw InputError("frozen family needs at least two particles");
  const std::size_t states = 2 * particles - 1;
  FiniteFamily f{{}, Matrix::Identity(states, states), Matrix::Zero(states, states)};
  for (std::size_t j = 0; j < states; ++j) f.u(j, std::min(j + 2, states - 1)) = 1.0;
  for (std::size_t i = 0; i < particles; ++i) {
    Vector delta = Vector::Zero(states);
    delta(2 * i) = 1.0;
    f.family.push_back(std::move(delta));
  }
  return f;
}

std::array<CheckReport, 3> check_hzmc_z(const DiscreteKernel& kernel, const HzmcSpec& hzmc, double tol) {
  auto reports = check_toom_conditions(kernel, hzmc, tol);
  const Vector w = Eigen::Map<const Vector>(kernel.weights.data(), static_cast<Eigen::Index>(kernel.n));
  const CheckReport compat = compatibility_check(hzmc.rho0, hzmc.d, hzmc.u, w, tol);
  CheckReport& st = reports[2];
  st.condition = "stationarity_z";
  st.witnesses.push_back({"stationarity_residual", {st.max_residual}});
  st.witnesses.push_back({"compatibility_residual", {compat.max_residual}});
  if (compat.max_residual > st.max_residual) {
    st.max_residual = compat.max_residual;
    st.location = compat.location;
    st.notes.push_back("constant family is not compatible with (D,U)");
  }
  return reports;
}

std::array<CheckReport, 3> check_hzmc_z(const TransitionTensor& tensor, const HzmcSpec& hzmc, double tol) {
  return check_hzmc_z(DiscreteKernel::from_tensor(tensor), hzmc, tol);
}

double partition_function(const Matrix& d, const Matrix& u, std::size_t n, const Vector& weights) {
  if (n == 0) throw InputError("cycle length must be at least 1");
  const Matrix step = d * weights.asDiagonal() * u * weights.asDiagonal();
  Matrix power = Matrix::Identity(step.rows(), step.cols());
  for (std::size_t i = 0; i < n; ++i) power = power * step;
  const double z = power.trace();
  if (!(z > 0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << "partition function is " << z << "; the cyclic chain is undefined";
    throw InputError(os.str());
  }
  return z;
}

double partition_function(const Matrix& d, const Matrix& u, std::size_t n) {
  return partition_function(d, u, n, Vector::Ones(d.rows()));
}

CyclicJointLaw chzmc_density(const ChzmcSpec& spec) {
  require_cycle(spec);
  const auto k = static_cast<std::size_t>(spec.d.rows());
  const double z = spec.z > 0 ? spec.z : partition_function(spec.d, spec.u, spec.n);
  CyclicJointLaw law{spec.n, k, std::vector<double>(guarded_power(k, 2 * spec.n))};
  std::vector<std::size_t> c(2 * spec.n);
  for (std::size_t idx = 0; idx < law.weights.size(); ++idx) {
    decode(idx, k, c);
    double p = 1.0;
    for (std::size_t i = 0; i < spec.n; ++i) p *= spec.d(c[2 * i], c[2 * i + 1]) * spec.u(c[2 * i + 1], c[(2 * i + 2) % (2 * spec.n)]);
    law.weights[idx] = p / z;
  }
  return law;
}

std::vector<double> chzmc_first_line_formula(const ChzmcSpec& spec) {
  require_cycle(spec);
  const auto k = static_cast<std::size_t>(spec.d.rows());
  const double z = spec.z > 0 ? spec.z : partition_function(spec.d, spec.u, spec.n);
  const Matrix du = spec.d * spec.u;
  std::vector<double> out(guarded_power(k, spec.n));
  std::vector<std::size_t> x(spec.n);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    decode(idx, k, x);
    out[idx] = cycle_product(du, x) / z;
  }
  return out;
}

std::array<CheckReport, 2> check_chzmc_conditions(const TransitionTensor& tensor, const ChzmcSpec& spec, double tol) {
  require_cycle(spec);
  const auto k = tensor.size();
  if (static_cast<std::size_t>(spec.d.rows()) != k) throw InputError("cyclic chain and tensor have different alphabets");
  guarded_power(k, 2 * spec.n);
  const Matrix du = spec.d * spec.u;
  const Matrix ud = spec.u * spec.d;
  Matrix back = Matrix::Identity(k, k);  // (du)^{n-1}
  for (std::size_t i = 1; i < spec.n; ++i) back = back * du;

  double worst = 0.0;
  std::vector<double> where;
  std::size_t skipped = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (back(b, a) <= 1e-14) {
        ++skipped;
        continue;
      }
      for (std::size_t c = 0; c < k; ++c) {
        const double r = std::abs(du(a, b) * tensor(a, b, c) - spec.d(a, c) * spec.u(c, b));
        if (r > worst || std::isnan(r)) {
          worst = r;
          where = {double(a), double(b), double(c)};
        }
      }
    }
  CheckReport fact = make_report("cyclic_factorisation", worst, tol);
  fact.location = where;
  if (skipped > 0) fact.notes.push_back(std::to_string(skipped) + " pairs skipped: no return path of length n-1");
  return {std::move(fact), cyclic_product_report("cyclic_commutation", du, ud, spec.n, tol)};
}

bool ChzmcSolution::invariant() const {
  return report("belyaev").pass() && report("cyclic_product").pass();
}

const CheckReport& ChzmcSolution::report(const std::string& condition) const {
  for (const auto& r : reports)
    if (r.condition == condition) return r;
  throw std::out_of_range("no report named " + condition);
}

ChzmcSolution solve_chzmc(const TransitionTensor& tensor, std::size_t n, double tol, const PowerOptions& options) {
  if (n == 0) throw InputError("cycle length must be at least 1");
  if (!tensor.positive())
    throw InputError("tensor is not positive on its alphabet; restrict it to a support on which it is positive");
  const DiscreteKernel kernel = DiscreteKernel::from_tensor(tensor);
  ChzmcSolution sol;
  sol.triple = select_base_triple(kernel);
  sol.reports.push_back(check_belyaev(kernel, sol.triple, tol));
  sol.nu = solve_nu(kernel, options);
  sol.eta = solve_eta(kernel, sol.triple, sol.nu.vector, options);
  auto [d, u] = build_hzmc_kernels(kernel, sol.triple, sol.eta.vector);
  const Matrix du = d * u;
  const Matrix ud = u * d;
  sol.reports.push_back(cyclic_product_report("cyclic_product", du, ud, n, tol));
  sol.spec = ChzmcSpec{std::move(d), std::move(u), n, 0.0};
  sol.spec.z = partition_function(sol.spec.d, sol.spec.u, n);
  for (auto& r : check_chzmc_conditions(tensor, sol.spec, tol)) sol.reports.push_back(std::move(r));
  sol.reports[1].witnesses.push_back(
      {"eta", std::vector<double>(sol.eta.vector.data(), sol.eta.vector.data() + sol.eta.vector.size())});
  return sol;
}

CheckReport bruteforce_cycle_invariance(const TransitionTensor& tensor, const ChzmcSpec& spec, double tol) {
  const CyclicJointLaw law = chzmc_density(spec);
  const std::size_t k = law.kappa, n = law.n;
  if (tensor.size() != k) throw InputError("cyclic chain and tensor have different alphabets");
  const std::vector<double> second = law.second_line();
  std::vector<std::size_t> c(2 * n);
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t idx = 0; idx < law.weights.size(); ++idx) {
    decode(idx, k, c);
    // c holds (y0, z0, y1, z1, ...): y is the old second line, z its image.
    std::size_t yline = 0;
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      yline = yline * k + c[2 * i];
      p *= tensor(c[2 * i], c[(2 * i + 2) % (2 * n)], c[2 * i + 1]);
    }
    const double r = std::abs(second[yline] * p - law.weights[idx]);
    if (r > worst || std::isnan(r)) {
      worst = r;
      where.assign(c.begin(), c.end());
    }
  }
  CheckReport rep = make_report("bruteforce_cycle_invariance", worst, tol);
  rep.location = where;
  return rep;
}

}  // namespace zigzag
