// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zigzag/continuous_kernels.hpp"
#include "zigzag/finite_solver.hpp"
#include "zigzag/lattice_ext.hpp"
#include "zigzag/simulator.hpp"
#include "zigzag/stats.hpp"

using namespace zigzag;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool all_pass(const auto& reports) {
  for (const auto& r : reports)
    if (!r.pass()) return false;
  return true;
}

double max_gap(const Vector& v, const std::vector<double>& target) {
  double g = 0;
  for (std::size_t i = 0; i < target.size(); ++i) g = std::max(g, std::abs(v(static_cast<Eigen::Index>(i)) - target[i]));
  return g;
}

Outcome golden_values() {
  Outcome o;
  const TransitionTensor t = fixture::two_letter();
  const HzmcSolution sol = solve_hzmc(t);
  const double third = 1.0 / 3;
  double err = 0;
  err = std::max(err, max_gap(sol.nu.vector, {0.5, 0.5}));
  err = std::max(err, max_gap(sol.eta.vector, {third, 2 * third}));
  Matrix d(2, 2), u(2, 2);
  d << 2 * third, third, third, 2 * third;
  u << third, 2 * third, 2 * third, third;
  err = std::max(err, (sol.spec.d - d).cwiseAbs().maxCoeff());
  err = std::max(err, (sol.spec.u - u).cwiseAbs().maxCoeff());
  err = std::max(err, max_gap(sol.spec.rho0, {0.5, 0.5}));
  o.require(err <= 1e-10, "max error " + fmt("%.3g", err));
  const auto [lhs, rhs] = belyaev_products(DiscreteKernel::from_tensor(t), sol.triple, 1, 1, 1);
  const double berr = std::max(std::abs(lhs - 0.04), std::abs(rhs - 0.04));
  o.require(berr <= 1e-12, "quartic products off by " + fmt("%.3g", berr));
  o.detail = o.pass ? "max error " + fmt("%.2g", err) + ", quartic products " + fmt("%.12g", lhs) : o.detail;
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto corpus = oracle::corpus(200, 2024);
  std::size_t compared = 0, agree = 0, invariant = 0;
  for (const auto& e : corpus) {
    std::vector<HzmcSpec> chains{solve_hzmc(e.tensor, 1e-8).spec};
    if (e.generator) chains.push_back(*e.generator);
    for (const auto& h : chains) {
      const bool exhaustive = bruteforce_invariance(e.tensor, h, 2, 1e-8).pass();
      const bool direct = all_pass(check_toom_conditions(e.tensor, h, 1e-8));
      ++compared;
      if (exhaustive == direct) ++agree;
      if (exhaustive) ++invariant;
    }
  }
  o.require(agree == compared, std::to_string(compared - agree) + " disagreements");
  o.require(invariant > 0 && invariant < compared, "verdicts are not mixed");
  if (o.pass)
    o.detail = std::to_string(corpus.size()) + " tensors, " + std::to_string(compared) + " chains, " +
               std::to_string(invariant) + " invariant";
  return o;
}

Outcome construction_soundness() {
  Outcome o;
  std::size_t solved = 0;
  double worst = 0;
  for (const auto& e : oracle::corpus(200, 2024)) {
    const HzmcSolution sol = solve_hzmc(e.tensor);
    if (!(sol.report("belyaev").pass() && sol.report("eta_cubic").pass() && sol.report("stationary_exists").pass()))
      continue;
    ++solved;
    const CheckReport r = bruteforce_invariance(e.tensor, sol.spec, 3, 1e-10);
    worst = std::max(worst, r.max_residual);
    o.require(r.pass(), "seed " + std::to_string(e.seed) + " residual " + fmt("%.3g", r.max_residual));
  }
  o.require(solved >= 100, "only " + std::to_string(solved) + " tensors passed the eigenfunction route");
  if (o.pass) o.detail = std::to_string(solved) + " solved, worst residual " + fmt("%.2g", worst);
  return o;
}

Outcome cyclic_case() {
  Outcome o;
  const ChzmcSolution sol = solve_chzmc(fixture::two_letter(), 3);
  const CheckReport pushed = bruteforce_cycle_invariance(fixture::two_letter(), sol.spec);
  o.require(pushed.max_residual < 1e-10, "cyclic push-forward distance " + fmt("%.3g", pushed.max_residual));
  const auto cond = check_chzmc_conditions(fixture::two_letter(), sol.spec);
  o.require(cond[0].pass() && cond[1].pass(), "cyclic conditions fail on the two-letter chain");

  std::mt19937_64 rng(41);
  const Matrix d = oracle::random_stochastic(2, rng), u = oracle::random_stochastic(2, rng);
  const ChzmcSpec bad{d, u, 3, partition_function(d, u, 3)};
  const TransitionTensor t = oracle::factorised_tensor(d, u);
  const auto bad_cond = check_chzmc_conditions(t, bad);
  const CheckReport bad_push = bruteforce_cycle_invariance(t, bad);
  o.require(!bad_cond[1].pass(), "non-commuting pair passes the cycle products");
  o.require(!bad_push.pass(), "non-commuting pair passes the cyclic oracle");
  if (o.pass)
    o.detail = "distance " + fmt("%.2g", pushed.max_residual) + ", control residual " +
               fmt("%.3g", bad_push.max_residual);
  return o;
}

Outcome gaussian_closed_forms() {
  Outcome o;
  const GaussianPcaParams p(3, 1);
  const GridMeasure g = default_gaussian_grid(p, 257);
  const GridEtaResult r = grid_eta_solve(gaussian_kernel_density(p), g);
  const double nu_sd = 1 / std::sqrt(1 - 4.0 / 9), eta_sd = std::sqrt(2 / p.l());
  double nu_err = 0, eta_err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    nu_err = std::max(nu_err, std::abs(r.nu.vector(i) - normal_pdf(g.points[i], 0, nu_sd)));
    eta_err = std::max(eta_err, std::abs(r.eta.vector(i) - normal_pdf(g.points[i], 0, eta_sd)));
  }
  o.require(nu_err <= 1e-6, "nu error " + fmt("%.3g", nu_err));
  o.require(eta_err <= 1e-6, "eta error " + fmt("%.3g", eta_err));
  const auto q = quadrature_check_conditions(gaussian_kernel_density(p), gaussian_invariant_hzmc(p).chain, g);
  double qmax = 0;
  for (const auto& c : q) qmax = std::max(qmax, c.max_residual);
  o.require(qmax < 1e-6, "quadrature residual " + fmt("%.3g", qmax));
  if (o.pass)
    o.detail = "nu " + fmt("%.2g", nu_err) + ", eta " + fmt("%.2g", eta_err) + ", conditions " + fmt("%.2g", qmax);
  return o;
}

Outcome ar1_validation() {
  Outcome o;
  const GaussianPcaParams p(3, 1);
  const GaussianInvariant g = gaussian_invariant_hzmc(p);
  const std::size_t width = 200000;
  CounterRng rng(6, kStreamLine, 0);
  const auto x = even_entries(sample_hzmc_line(g.chain, 2 * width - 1, rng));
  ModelInstance m;
  m.kernel = PcaKernel::from_density(gaussian_kernel_density(p));
  m.seed = 6;
  m.threads = 4;
  const auto y = step_pca(x, m, 0);
  std::vector<double> zz;
  for (std::size_t i = 0; i < y.size(); ++i) {
    zz.push_back(x[i]);
    zz.push_back(y[i]);
  }
  const LineSummary line = summarize_line(y);
  const LineSummary zig = summarize_line(zz);
  const double var = g.stationary_sd * g.stationary_sd;
  o.require(std::abs(line.variance - var) < 3 * line.variance_se,
            "variance " + fmt("%.5f", line.variance) + " vs " + fmt("%.5f", var));
  o.require(std::abs(zig.autocorrelation[0] - g.phi) < 3 * zig.autocorrelation_se[0],
            "lag-1 " + fmt("%.5f", zig.autocorrelation[0]) + " vs " + fmt("%.5f", g.phi));
  if (o.pass)
    o.detail = "variance " + fmt("%.5f", line.variance) + " (se " + fmt("%.1e", line.variance_se) + "), lag-1 " +
               fmt("%.5f", zig.autocorrelation[0]) + " (se " + fmt("%.1e", zig.autocorrelation_se[0]) + ")";
  return o;
}

Outcome beta_model() {
  Outcome o;
  const BetaPcaParams p(1, 1, 1, 1);
  const ContinuousHzmc chain = beta_candidate_hzmc(p);
  const KernelDensity k = beta_kernel_density(p);
  const auto q = quadrature_check_conditions(k, chain, default_beta_grid(p, 257));
  o.require(q[0].max_residual < 1e-5, "factorisation " + fmt("%.3g", q[0].max_residual));
  o.require(q[1].max_residual < 1e-5, "commutation " + fmt("%.3g", q[1].max_residual));
  o.require(q[2].max_residual > 0.1, "stationarity residual only " + fmt("%.3g", q[2].max_residual));

  std::vector<double> image, direct, shifted_off;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    CounterRng a(77, kStreamLine, 2 * r), b(77, kStreamLine, 2 * r + 1), c(77, kStreamCell, r);
    const auto line = sample_hzmc_line(chain, 3, a);
    image.push_back(k.sample(line[0], line[2], c));
    const auto other = sample_hzmc_line(chain, 2, b);
    direct.push_back(other[1]);
    shifted_off.push_back(other[0]);
  }
  const DistanceResult same = two_sample_distance(image, direct);
  const DistanceResult control = two_sample_distance(image, shifted_off);
  o.require(same.pass, "image vs rho D1: distance " + fmt("%.4f", same.distance));
  o.require(!control.pass, "negative control not rejected");
  if (o.pass)
    o.detail = "conditions 1-2 " + fmt("%.2g", std::max(q[0].max_residual, q[1].max_residual)) + ", stationarity " +
               fmt("%.3f", q[2].max_residual) + ", two-sample " + fmt("%.4f", same.distance) + " <= " +
               fmt("%.4f", same.threshold) + ", control " + fmt("%.3f", control.distance);
  return o;
}

Outcome mu_equivalence() {
  Outcome o;
  const GaussianPcaParams p(3, 1);
  CounterRng rng(8, kStreamLine, 0);
  const auto init = even_entries(sample_hzmc_line(gaussian_invariant_hzmc(p).chain, 2 * 400 - 1, rng));
  ModelInstance a, b;
  a.kernel = PcaKernel::from_density(gaussian_kernel_density(p));
  b.kernel = PcaKernel::from_density(gaussian_diag_kernel_density(p));
  a.seed = b.seed = 8;
  const SpaceTimeDiagram da = simulate_diagram(a, init, 100), db = simulate_diagram(b, init, 100);
  o.require(std::memcmp(da.states.data(), db.states.data(), da.states.size() * sizeof(double)) == 0,
            "diagrams differ");

  const TasepConfig frozen = tasep_frozen(64, 0.5, 1, 0.7);
  ModelInstance t;
  t.kernel = tasep_kernel(0.5, 1, 0.7);
  t.seed = 8;
  const SpaceTimeDiagram dt = simulate_diagram(t, frozen.positions, 50);
  bool still = true;
  for (std::size_t s = 0; s <= 50; ++s)
    for (std::size_t j = 0; j + s < 64; ++j) still = still && dt.at(s, j) == frozen.positions[j];
  for (std::size_t s = 0; s < 50; ++s) {
    // The rightmost particle of a finite window is unobstructed.
    const TasepConfig next = tasep_step(frozen, 8, s);
    for (std::size_t i = 0; i + 1 < 64; ++i) still = still && next.positions[i] == frozen.positions[i];
  }
  o.require(still, "frozen exclusion configuration moved");
  if (o.pass) o.detail = "100-step diagrams identical, frozen configuration fixed";
  return o;
}

Outcome uniqueness() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  double worst = 0;
  const auto corpus = oracle::corpus(200, 2024);
  for (const auto& e : corpus) {
    const std::size_t k = e.tensor.size();
    const BaseTriple tr = select_base_triple(e.tensor);
    const Vector nu = solve_nu(e.tensor).vector;
    const Vector eta = solve_eta(e.tensor, tr, nu).vector;
    for (int s = 0; s < 10; ++s) {
      PowerOptions opt;
      Vector start(k);
      for (std::size_t i = 0; i < k; ++i) start(i) = unif(rng);
      opt.start = start;
      worst = std::max(worst, (solve_nu(e.tensor, opt).vector - nu).cwiseAbs().maxCoeff());
      worst = std::max(worst, (solve_eta(e.tensor, tr, nu, opt).vector - eta).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst <= 1e-8, "spread " + fmt("%.3g", worst));
  if (o.pass) o.detail = std::to_string(corpus.size()) + " tensors, spread " + fmt("%.2g", worst);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "finite golden values", 1, golden_values},
      {2, "exhaustive oracle agrees with direct conditions", 30, oracle_equivalence},
      {3, "constructed chains are invariant", 0, construction_soundness},
      {4, "cyclic chain", 5, cyclic_case},
      {5, "gaussian closed forms", 60, gaussian_closed_forms},
      {6, "AR(1) statistics after one step", 120, ar1_validation},
      {7, "beta candidate chain", 0, beta_model},
      {8, "equivalent kernels and frozen exclusion", 0, mu_equivalence},
      {9, "eigenfunctions independent of the start", 0, uniqueness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the ") + fmt("%.0f", c.budget_seconds) +
                  " s budget";
    }
    std::printf("%s %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
