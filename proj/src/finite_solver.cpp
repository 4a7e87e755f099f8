#include "zigzag/finite_solver.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace zigzag {

namespace {

Vector weights_of(const DiscreteKernel& kernel) {
  return Eigen::Map<const Vector>(kernel.weights.data(), static_cast<Eigen::Index>(kernel.weights.size()));
}

void require_kernel(const DiscreteKernel& kernel) {
  if (kernel.n == 0 || kernel.weights.size() != kernel.n || !kernel.t)
    throw InputError("discrete kernel is empty or inconsistent");
}

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t budget) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (r > budget / std::max<std::size_t>(base, 1)) throw SizeGuardError("enumeration exceeds budget");
    r *= base;
  }
  return r;
}

// Tables shared by the cubic equation and the kernel construction:
// R(a,x) = phi(x) / t(a,x;c0), S(a) = sum_x w_x R(a,x), N(a,b) = sum_x w_x R(a,x) t(a,x;b).
struct PhiTables {
  Matrix R;
  Vector S;
  Matrix N;
};

PhiTables phi_tables(const DiscreteKernel& kernel, std::size_t c0, const Vector& phi) {
  const auto n = kernel.n;
  if (static_cast<std::size_t>(phi.size()) != n) throw InputError("weight function has the wrong length");
  PhiTables tab{Matrix(n, n), Vector::Zero(n), Matrix::Zero(n, n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < n; ++x) {
      const double base = kernel.t(a, x, c0);
      if (!(base > 0)) {
        std::ostringstream os;
        os << "kernel vanishes at (" << a << "," << x << ";" << c0 << "); the construction needs a positive kernel";
        throw InputError(os.str());
      }
      if (!(phi(x) > 0)) throw InputError("weight function must be positive");
      tab.R(a, x) = phi(x) / base;
      tab.S(a) += kernel.weights[x] * tab.R(a, x);
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < n; ++x) {
      const double coef = kernel.weights[x] * tab.R(a, x);
      for (std::size_t b = 0; b < n; ++b) tab.N(a, b) += coef * kernel.t(a, x, b);
    }
  return tab;
}

}  // namespace

EigenSolveResult power_iteration(const Matrix& m, const Vector& weights, const PowerOptions& options) {
  const auto n = m.rows();
  if (m.cols() != n || weights.size() != n) throw InputError("power iteration: dimension mismatch");
  Vector v = options.start ? *options.start : Vector::Ones(n);
  if (v.size() != n || (v.array() <= 0).any()) throw InputError("power iteration: start vector must be positive");
  v /= weights.dot(v);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Vector mv = m * v;
    const double lambda = weights.dot(mv);
    if (!(lambda > 0) || !std::isfinite(lambda)) throw ConvergenceError("power iteration: eigenvalue estimate is not positive", residual);
    residual = (mv - lambda * v).lpNorm<Eigen::Infinity>() / (lambda * v.lpNorm<Eigen::Infinity>());
    if (residual <= options.tolerance) return {v, lambda, it, residual};
    v = mv / lambda;
  }
  std::ostringstream os;
  os << "power iteration did not converge in " << options.max_iterations << " iterations (residual " << residual << ")";
  throw ConvergenceError(os.str(), residual);
}

BaseTriple select_base_triple(const DiscreteKernel& kernel) {
  require_kernel(kernel);
  double best = 0.0;
  std::optional<BaseTriple> found;
  for (std::size_t a = 0; a < kernel.n; ++a)
    for (std::size_t b = 0; b < kernel.n; ++b) {
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kernel.n; ++c) lo = std::min(lo, kernel.t(a, b, c));
      if (lo > best) {
        best = lo;
        found = BaseTriple{a, b, 0};
      }
    }
  if (!found) throw InputError("no admissible base triple: no row of the kernel is everywhere positive");
  return *found;
}

BaseTriple select_base_triple(const TransitionTensor& tensor) {
  return select_base_triple(DiscreteKernel::from_tensor(tensor));
}

std::pair<double, double> belyaev_products(const DiscreteKernel& k, const BaseTriple& tr, std::size_t a,
                                           std::size_t b, std::size_t c) {
  const double lhs = k.t(a, b, c) * k.t(tr.a0, tr.b0, c) * k.t(tr.a0, b, tr.c0) * k.t(a, tr.b0, tr.c0);
  const double rhs = k.t(tr.a0, tr.b0, tr.c0) * k.t(a, b, tr.c0) * k.t(a, tr.b0, c) * k.t(tr.a0, b, c);
  return {lhs, rhs};
}

CheckReport check_belyaev(const DiscreteKernel& k, const BaseTriple& tr, double tol) {
  require_kernel(k);
  const auto n = k.n;
  Matrix base_bc(n, n), a_b0(n, n), ab_c0(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      base_bc(i, j) = k.t(tr.a0, i, j);  // t(a0,b;c)
      a_b0(i, j) = k.t(i, tr.b0, j);     // t(a,b0;c)
      ab_c0(i, j) = k.t(i, j, tr.c0);    // t(a,b;c0)
    }
  const double t000 = k.t(tr.a0, tr.b0, tr.c0);
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        const double lhs = k.t(a, b, c) * a_b0(tr.a0, c) * base_bc(b, tr.c0) * a_b0(a, tr.c0);
        const double rhs = t000 * ab_c0(a, b) * a_b0(a, c) * base_bc(b, c);
        const double r = std::abs(lhs - rhs);
        if (r > worst || std::isnan(r)) {
          worst = r;
          where = {double(a), double(b), double(c)};
        }
      }
  CheckReport rep = make_report("belyaev", worst, tol);
  rep.location = where;
  rep.witnesses.push_back({"triple", {double(tr.a0), double(tr.b0), double(tr.c0)}});

  if (n <= 21) {
    std::vector<double> t(n * n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) t[(a * n + b) * n + c] = k.t(a, b, c);
    auto at = [&](std::size_t a, std::size_t b, std::size_t c) { return t[(a * n + b) * n + c]; };
    double general = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t a2 = 0; a2 < n; ++a2)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t b2 = 0; b2 < n; ++b2)
            for (std::size_t c = 0; c < n; ++c)
              for (std::size_t c2 = 0; c2 < n; ++c2) {
                const double lhs = at(a, b, c) * at(a, b2, c2) * at(a2, b, c2) * at(a2, b2, c);
                const double rhs = at(a2, b2, c2) * at(a2, b, c) * at(a, b2, c) * at(a, b, c2);
                general = std::max(general, std::abs(lhs - rhs));
              }
    rep.witnesses.push_back({"general_residual", {general}});
  } else {
    rep.notes.push_back("six-variable form skipped: support too large");
  }
  return rep;
}

CheckReport check_belyaev(const TransitionTensor& tensor, const BaseTriple& triple, double tol) {
  return check_belyaev(DiscreteKernel::from_tensor(tensor), triple, tol);
}

CheckReport check_belyaev_diag(const DiscreteKernel& k, const BaseTriple& tr, double tol) {
  require_kernel(k);
  const double t000 = k.t(tr.a0, tr.b0, tr.c0);
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t a = 0; a < k.n; ++a)
    for (std::size_t c = 0; c < k.n; ++c) {
      const double lhs = k.t(a, a, c) * k.t(tr.a0, tr.b0, c) * k.t(tr.a0, a, tr.c0) * k.t(a, tr.b0, tr.c0);
      const double rhs = t000 * k.t(a, a, tr.c0) * k.t(a, tr.b0, c) * k.t(tr.a0, a, c);
      const double r = std::abs(lhs - rhs);
      if (r > worst || std::isnan(r)) {
        worst = r;
        where = {double(a), double(c)};
      }
    }
  CheckReport rep = make_report("belyaev_diagonal", worst, tol);
  rep.location = where;
  return rep;
}

EigenSolveResult solve_nu(const DiscreteKernel& k, const PowerOptions& options) {
  require_kernel(k);
  Matrix m(k.n, k.n);
  for (std::size_t a = 0; a < k.n; ++a)
    for (std::size_t c = 0; c < k.n; ++c) m(a, c) = k.t(c, c, a) * k.weights[c];
  return power_iteration(m, weights_of(k), options);
}

EigenSolveResult solve_nu(const TransitionTensor& tensor, const PowerOptions& options) {
  return solve_nu(DiscreteKernel::from_tensor(tensor), options);
}

EigenSolveResult solve_eta(const DiscreteKernel& k, const BaseTriple& tr, const Vector& nu,
                           const PowerOptions& options) {
  require_kernel(k);
  if (static_cast<std::size_t>(nu.size()) != k.n || (nu.array() <= 0).any())
    throw InputError("nu must be a positive vector on the support");
  Matrix m(k.n, k.n);
  for (std::size_t a = 0; a < k.n; ++a) {
    const double diag = k.t(a, a, tr.c0);
    for (std::size_t x = 0; x < k.n; ++x) {
      const double base = k.t(a, x, tr.c0);
      if (!(base > 0)) throw InputError("kernel vanishes on the base column; the eta operator is undefined");
      m(a, x) = nu(a) * diag / base * k.weights[x];
    }
  }
  return power_iteration(m, weights_of(k), options);
}

EigenSolveResult solve_eta(const TransitionTensor& tensor, const BaseTriple& triple, const Vector& nu,
                           const PowerOptions& options) {
  return solve_eta(DiscreteKernel::from_tensor(tensor), triple, nu, options);
}

CheckReport check_eta_cubic(const DiscreteKernel& k, const BaseTriple& tr, const Vector& eta, double tol) {
  require_kernel(k);
  const auto n = k.n;
  const PhiTables tab = phi_tables(k, tr.c0, eta);
  // Right side: sum_c w_c [R(a0,c) t(a0,c;a) / S(c)] [N(c,b) / N(a0,a)].
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t a = 0; a < n; ++a) {
    const double denom = tab.N(tr.a0, a);
    for (std::size_t b = 0; b < n; ++b) {
      const double lhs = tab.R(a, b) / tab.S(a);
      double rhs = 0.0;
      for (std::size_t c = 0; c < n; ++c)
        rhs += k.weights[c] * (tab.R(tr.a0, c) * k.t(tr.a0, c, a) / tab.S(c)) * (tab.N(c, b) / denom);
      const double r = std::abs(lhs - rhs);
      if (r > worst || std::isnan(r)) {
        worst = r;
        where = {double(a), double(b)};
      }
    }
  }
  CheckReport rep = make_report("eta_cubic", worst, tol);
  rep.location = where;
  rep.witnesses.push_back({"eta", std::vector<double>(eta.data(), eta.data() + eta.size())});
  return rep;
}

CheckReport check_eta_cubic(const TransitionTensor& tensor, const BaseTriple& triple, const Vector& eta,
                            double tol) {
  return check_eta_cubic(DiscreteKernel::from_tensor(tensor), triple, eta, tol);
}

std::pair<Matrix, Matrix> build_hzmc_kernels(const DiscreteKernel& k, const BaseTriple& tr, const Vector& phi) {
  require_kernel(k);
  const auto n = k.n;
  const PhiTables tab = phi_tables(k, tr.c0, phi);
  Matrix d(n, n), u(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c) d(a, c) = tab.N(a, c) / tab.S(a);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t b = 0; b < n; ++b) u(c, b) = tab.R(tr.a0, b) * k.t(tr.a0, b, c) / tab.N(tr.a0, c);
  return {std::move(d), std::move(u)};
}

std::pair<Matrix, Matrix> build_hzmc_kernels(const TransitionTensor& tensor, const BaseTriple& triple,
                                             const Vector& phi) {
  return build_hzmc_kernels(DiscreteKernel::from_tensor(tensor), triple, phi);
}

bool irreducible(const Matrix& m) {
  const auto n = m.rows();
  if (n == 0) return true;
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::deque<Eigen::Index> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = transpose ? m(j, i) : m(i, j);
        if (v > 0 && !seen[j]) {
          seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reach_all(false) && reach_all(true);
}

StationaryResult stationary_distribution(const Matrix& d, const Vector& weights, const PowerOptions& options) {
  const auto n = d.rows();
  if (d.cols() != n || weights.size() != n) throw InputError("stationary distribution: dimension mismatch");
  const Matrix step = d.transpose() * weights.asDiagonal();
  Vector rho = options.start ? *options.start : Vector::Ones(n);
  rho /= weights.dot(rho);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Vector next = step * rho;
    residual = (next - rho).lpNorm<Eigen::Infinity>();
    if (residual <= options.tolerance) return {rho, residual, it, irreducible(d)};
    rho = next / weights.dot(next);
  }
  throw ConvergenceError("stationary distribution did not converge", residual);
}

StationaryResult stationary_distribution(const Matrix& d, const PowerOptions& options) {
  return stationary_distribution(d, Vector::Ones(d.rows()), options);
}

std::vector<bool> zigzag_support(const HzmcSpec& hzmc, const Vector& weights) {
  const auto n = hzmc.d.rows();
  const Matrix du = hzmc.d * weights.asDiagonal() * hzmc.u;
  std::vector<bool> in(n, false);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index i = 0; i < n; ++i)
    if (hzmc.rho0(i) > 0) {
      in[i] = true;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const auto a = queue.front();
    queue.pop_front();
    for (Eigen::Index b = 0; b < n; ++b)
      if (!in[b] && du(a, b) > 0) {
        in[b] = true;
        queue.push_back(b);
      }
  }
  return in;
}

std::array<CheckReport, 3> check_toom_conditions(const DiscreteKernel& k, const HzmcSpec& hzmc, double tol) {
  require_kernel(k);
  const auto n = k.n;
  if (hzmc.size() != n || static_cast<std::size_t>(hzmc.u.rows()) != n || static_cast<std::size_t>(hzmc.rho0.size()) != n)
    throw InputError("zigzag chain and kernel have different supports");
  const Vector w = weights_of(k);
  const Matrix du = hzmc.d * w.asDiagonal() * hzmc.u;
  const Matrix ud = hzmc.u * w.asDiagonal() * hzmc.d;
  const std::vector<bool> in = zigzag_support(hzmc, w);

  double r1 = 0.0, r2 = 0.0;
  std::vector<double> w1, w2;
  for (std::size_t a = 0; a < n; ++a) {
    if (!in[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!in[b]) continue;
      const double diff = std::abs(du(a, b) - ud(a, b));
      if (diff > r2 || std::isnan(diff)) {
        r2 = diff;
        w2 = {double(a), double(b)};
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (!in[c]) continue;
        const double r = std::abs(k.t(a, b, c) * du(a, b) - hzmc.d(a, c) * hzmc.u(c, b));
        if (r > r1 || std::isnan(r)) {
          r1 = r;
          w1 = {double(a), double(b), double(c)};
        }
      }
    }
  }
  const Vector pushed = hzmc.d.transpose() * (w.asDiagonal() * hzmc.rho0);
  Eigen::Index arg = 0;
  const double r3 = (pushed - hzmc.rho0).cwiseAbs().maxCoeff(&arg);

  std::array<CheckReport, 3> out{make_report("factorisation", r1, tol), make_report("commutation", r2, tol),
                                 make_report("stationarity", r3, tol)};
  out[0].location = w1;
  out[1].location = w2;
  out[2].location = {double(arg)};
  const auto support_size = std::count(in.begin(), in.end(), true);
  if (static_cast<std::size_t>(support_size) < n)
    for (auto& r : out) r.notes.push_back("quantified over a proper support of " + std::to_string(support_size) + " points");
  return out;
}

std::array<CheckReport, 3> check_toom_conditions(const TransitionTensor& tensor, const HzmcSpec& hzmc, double tol) {
  return check_toom_conditions(DiscreteKernel::from_tensor(tensor), hzmc, tol);
}

std::vector<double> push_forward_zigzag(const TransitionTensor& tensor, const HzmcSpec& hzmc, std::size_t k) {
  const std::size_t K = tensor.size();
  if (hzmc.size() != K) throw InputError("zigzag chain and tensor have different alphabets");
  const std::size_t total = checked_power(K, 2 * k + 3, kEnumerationBudget);
  const std::size_t nb = k + 2;
  const std::size_t b_count = checked_power(K, nb, kEnumerationBudget);
  const std::size_t c_count = checked_power(K, k + 1, kEnumerationBudget);

  // Sums over the hidden first-line letters a_0..a_{k+2}.
  Vector head = hzmc.d.transpose() * hzmc.rho0;          // sum_a r0(a) d(a;b)
  const Matrix link = hzmc.u * hzmc.d;                    // sum_a u(b;a) d(a;b')
  const Vector tail = hzmc.u.rowwise().sum();             // sum_a u(b;a)

  std::vector<double> out(total, 0.0);
  std::vector<std::size_t> b(nb), c(k + 1);
  for (std::size_t bi = 0; bi < b_count; ++bi) {
    for (std::size_t j = 0, r = bi; j < nb; ++j, r /= K) b[nb - 1 - j] = r % K;
    double weight = head(b[0]);
    for (std::size_t i = 0; i + 1 < nb; ++i) weight *= link(b[i], b[i + 1]);
    weight *= tail(b[nb - 1]);
    for (std::size_t ci = 0; ci < c_count; ++ci) {
      for (std::size_t j = 0, r = ci; j <= k; ++j, r /= K) c[k - j] = r % K;
      double w = weight;
      std::size_t idx = 0;
      for (std::size_t i = 0; i <= k; ++i) {
        w *= tensor(b[i], b[i + 1], c[i]);
        idx = (idx * K + b[i]) * K + c[i];
      }
      idx = idx * K + b[nb - 1];
      out[idx] = w;
    }
  }
  return out;
}

std::vector<double> hzmc_cylinder_weights(const HzmcSpec& hzmc, std::size_t k) {
  const std::size_t K = hzmc.size();
  const std::size_t total = checked_power(K, 2 * k + 3, kEnumerationBudget);
  const std::size_t len = 2 * k + 3;
  std::vector<double> out(total);
  std::vector<std::size_t> z(len);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t j = 0, r = idx; j < len; ++j, r /= K) z[len - 1 - j] = r % K;
    double w = hzmc.rho0(z[0]);
    for (std::size_t i = 0; i + 1 < len; ++i) w *= (i % 2 == 0) ? hzmc.d(z[i], z[i + 1]) : hzmc.u(z[i], z[i + 1]);
    out[idx] = w;
  }
  return out;
}

CheckReport bruteforce_invariance(const TransitionTensor& tensor, const HzmcSpec& hzmc, std::size_t k_max,
                                  double tol) {
  double worst = 0.0;
  std::vector<double> where;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const auto pushed = push_forward_zigzag(tensor, hzmc, k);
    const auto original = hzmc_cylinder_weights(hzmc, k);
    for (std::size_t i = 0; i < pushed.size(); ++i) {
      const double r = std::abs(pushed[i] - original[i]);
      if (r > worst || std::isnan(r)) {
        worst = r;
        where = {double(k), double(i)};
      }
    }
  }
  CheckReport rep = make_report("bruteforce_invariance", worst, tol);
  rep.location = where;
  rep.witnesses.push_back({"k_max", {double(k_max)}});
  return rep;
}

bool HzmcSolution::invariant() const {
  return report("belyaev").pass() && report("eta_cubic").pass() && report("stationary_exists").pass();
}

const CheckReport& HzmcSolution::report(const std::string& condition) const {
  for (const auto& r : reports)
    if (r.condition == condition) return r;
  throw std::out_of_range("no report named " + condition);
}

HzmcSolution solve_hzmc(const DiscreteKernel& kernel, double tol, const PowerOptions& options) {
  require_kernel(kernel);
  HzmcSolution sol;
  sol.triple = select_base_triple(kernel);
  sol.reports.push_back(check_belyaev(kernel, sol.triple, tol));
  sol.nu = solve_nu(kernel, options);
  sol.eta = solve_eta(kernel, sol.triple, sol.nu.vector, options);
  sol.reports.push_back(check_belyaev_diag(kernel, sol.triple, tol));
  sol.reports.push_back(check_eta_cubic(kernel, sol.triple, sol.eta.vector, tol));
  auto [d, u] = build_hzmc_kernels(kernel, sol.triple, sol.eta.vector);
  const Vector w = weights_of(kernel);
  const StationaryResult st = stationary_distribution(d, w, options);
  sol.spec = HzmcSpec{std::move(d), std::move(u), st.rho0, Lattice::N};

  CheckReport stat = make_report("stationary_exists", st.residual, tol);
  stat.witnesses.push_back({"rho0", std::vector<double>(st.rho0.data(), st.rho0.data() + st.rho0.size())});
  if (!st.unique) stat.notes.push_back("down kernel is reducible; the stationary law is not unique");
  sol.reports.push_back(std::move(stat));
  for (auto& r : check_toom_conditions(kernel, sol.spec, tol)) sol.reports.push_back(std::move(r));

  auto& bel = sol.reports.front();
  bel.witnesses.push_back({"nu", std::vector<double>(sol.nu.vector.data(), sol.nu.vector.data() + sol.nu.vector.size())});
  bel.witnesses.push_back({"eta", std::vector<double>(sol.eta.vector.data(), sol.eta.vector.data() + sol.eta.vector.size())});
  return sol;
}

HzmcSolution solve_hzmc(const TransitionTensor& tensor, double tol, const PowerOptions& options) {
  if (!tensor.positive())
    throw InputError("tensor is not positive on its alphabet; restrict it to a support on which it is positive");
  return solve_hzmc(DiscreteKernel::from_tensor(tensor), tol, options);
}

}  // namespace zigzag
