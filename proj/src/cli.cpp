#include "zigzag/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "zigzag/continuous_kernels.hpp"
#include "zigzag/finite_solver.hpp"
#include "zigzag/lattice_ext.hpp"
#include "zigzag/model_io.hpp"
#include "zigzag/simulator.hpp"
#include "zigzag/stats.hpp"

namespace zigzag {

namespace {

using json = nlohmann::json;

// Battery output shared by check and report.
struct Battery {
  std::vector<CheckReport> reports;
  json info = json::object();

  bool pass() const {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass(); });
  }
};

json finite_or_string(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite_or_string(v(i)));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

json reports_json(const std::vector<CheckReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(json::parse(report_json(r)));
  return out;
}

Model load_with_overrides(const RunConfig& c) {
  if (c.model_path.empty()) throw InputError("--model is required");
  Model m = load_model(c.model_path);
  if (c.grid_points) {
    if (*c.grid_points < 3) throw InputError("--grid-points must be at least 3");
    m.grid_points = *c.grid_points;
  }
  if (c.grid_halfwidth) {
    if (!(*c.grid_halfwidth > 0)) throw InputError("--grid-halfwidth must be positive");
    m.grid_halfwidth = *c.grid_halfwidth;
  }
  return m;
}

double tolerance_for(const Model& m, const RunConfig& c) {
  const double tol = c.tol.value_or(m.finite() ? kFiniteTol : kQuadratureTol);
  if (!(tol >= 0)) throw InputError("--tol must be non-negative");
  return tol;
}

json header(const char* command, const Model& m, const RunConfig& c, double tol) {
  json h;
  h["command"] = command;
  h["model"] = m.source;
  h["kind"] = to_string(m.kind);
  h["lattice"] = to_string(m.lattice);
  if (m.lattice == Lattice::Cycle) h["cycle_length"] = m.cycle_length;
  h["seed"] = c.seed;
  h["tolerance"] = tol;
  if (!m.finite() && m.kind != ModelKind::Tasep && m.kind != ModelKind::Fpp) {
    const GridMeasure g = m.grid();
    h["grid"] = {{"points", g.size()}, {"halfwidth", g.halfwidth()}};
  }
  return h;
}

const char* kNotPositive =
    "kernel is not positive on its support; restrict it with \"support\" or check a candidate chain "
    "with `verify --spec`";

HzmcSolution solve_finite(const Model& m, double tol) {
  const TransitionTensor t = m.restricted();
  if (!t.positive()) throw InputError(m.source + ": " + kNotPositive);
  HzmcSolution sol = solve_hzmc(t, tol);
  sol.spec.lattice = m.lattice;
  if (m.lattice == Lattice::Z) {
    const auto z = check_hzmc_z(t, sol.spec, tol);
    for (auto& r : sol.reports)
      for (const auto& zr : z)
        if (r.condition == zr.condition) r = zr;
    auto it = std::find_if(sol.reports.begin(), sol.reports.end(),
                           [](const CheckReport& r) { return r.condition == "stationarity"; });
    if (it != sol.reports.end()) *it = z[2];
  }
  return sol;
}

void add_solution_info(Battery& b, const HzmcSolution& sol, const std::vector<std::string>& labels) {
  b.info["triple"] = {labels[sol.triple.a0], labels[sol.triple.b0], labels[sol.triple.c0]};
  b.info["nu"] = vector_json(sol.nu.vector);
  b.info["eta"] = vector_json(sol.eta.vector);
  b.info["nu_eigenvalue"] = sol.nu.eigenvalue;
  b.info["eta_eigenvalue"] = sol.eta.eigenvalue;
  b.info["d"] = matrix_json(sol.spec.d);
  b.info["u"] = matrix_json(sol.spec.u);
  b.info["rho0"] = vector_json(sol.spec.rho0);
  b.info["invariant"] = sol.invariant();
}

std::size_t tasep_particles(const Model& m, const RunConfig& c) {
  if (c.width) return *c.width;
  return m.init.particles > 0 ? m.init.particles : 16;
}

Battery gaussian_battery(const Model& m, double tol) {
  Battery b;
  const GaussianPcaParams& p = *m.gaussian;
  const GaussianInvariant closed = gaussian_invariant_hzmc(p);
  const GridMeasure grid = m.grid();
  QuadratureOptions opts;
  opts.tolerance = tol;
  for (auto& r : quadrature_check_conditions(m.density(), closed.chain, grid, opts)) b.reports.push_back(r);

  // Eigenfunction route on the grid, for the plain Gaussian kernel.
  const GridEtaResult ge = grid_eta_solve(gaussian_kernel_density(p), grid);
  const std::size_t origin = ge.triple.a0;
  const double nu_sd = p.sigma / std::sqrt(1.0 - 4.0 / (p.m * p.m));
  CheckReport nu = make_report("nu_closed_form", 0.0, tol);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double diff = std::abs(ge.nu.vector(i) - normal_pdf(grid.points[i], 0.0, nu_sd));
    if (diff > nu.max_residual) {
      nu.max_residual = diff;
      nu.location = {grid.points[i]};
    }
  }
  nu.notes.push_back("nu against the N(0, sigma^2 / (1 - 4/m^2)) density");
  b.reports.push_back(nu);
  const double eta_sd = p.sigma * std::sqrt(2.0 / closed.l);
  CheckReport eta = make_report("eta_closed_form", 0.0, tol);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double diff = std::abs(ge.eta.vector(i) - normal_pdf(grid.points[i], 0.0, eta_sd));
    if (diff > eta.max_residual) {
      eta.max_residual = diff;
      eta.location = {grid.points[i]};
    }
  }
  eta.notes.push_back("eta against the N(0, 2 sigma^2 / l) density");
  b.reports.push_back(eta);

  const double observed = ge.eta.eigenvalue / ge.nu.vector(origin);
  const double analytic = gaussian_eta_eigenvalue(p);
  CheckReport eig = make_report("eta_eigenvalue", std::abs(observed - analytic) / analytic, tol);
  eig.witnesses = {{"observed", {observed}}, {"analytic", {analytic}}, {"quoted", {gaussian_eta_eigenvalue_quoted(p)}}};
  eig.notes.push_back("eigenvalue rescaled to nu(0) = 1; relative residual");
  b.reports.push_back(eig);

  if (m.kind == ModelKind::GaussianDiag)
    b.reports.push_back(mu_equivalence_probe(m.density(), gaussian_kernel_density(p), grid));

  b.info["l"] = closed.l;
  b.info["phi"] = closed.phi;
  b.info["innovation_var"] = closed.innovation_sd * closed.innovation_sd;
  b.info["stationary_var"] = closed.stationary_sd * closed.stationary_sd;
  b.info["eta_eigenvalue_observed"] = observed;
  b.info["eta_eigenvalue_analytic"] = analytic;
  b.info["eta_eigenvalue_quoted"] = gaussian_eta_eigenvalue_quoted(p);
  return b;
}

Battery beta_battery(const Model& m, double tol) {
  Battery b;
  const BetaPcaParams& p = *m.beta;
  QuadratureOptions opts;
  opts.tolerance = tol;
  for (auto& r : quadrature_check_conditions(m.density(), beta_candidate_hzmc(p, m.beta_rho_sd), m.grid(), opts))
    b.reports.push_back(r);
  b.info["candidate"] = "rho0 = N(0, rho_sd^2), d = Gamma(alpha, theta) shifted by a - m, u = Gamma(beta, theta) shifted by c + m";
  b.info["rho_sd"] = m.beta_rho_sd;
  b.info["drift_per_step"] = (p.alpha + p.beta) / p.theta_rate;
  return b;
}

Battery tasep_battery(const Model& m, const RunConfig& c, double tol) {
  Battery b;
  const std::size_t particles = tasep_particles(m, c);
  const FiniteFamily fam = frozen_exclusion_family(particles);
  b.reports.push_back(compatibility_check_family(fam.family, fam.d, fam.u, Vector::Ones(fam.d.rows()), tol));

  const TasepConfig frozen = tasep_frozen(particles, m.tasep_r, m.tasep_v, m.tasep_p);
  const TasepConfig next = tasep_step(frozen, c.seed, 0);
  CheckReport inv = make_report("frozen_invariance", 0.0, tol);
  for (std::size_t i = 0; i + 1 < particles; ++i) {
    const double diff = std::abs(next.positions[i] - frozen.positions[i]);
    if (diff > inv.max_residual) {
      inv.max_residual = diff;
      inv.location = {static_cast<double>(i)};
    }
  }
  inv.notes.push_back("the rightmost particle of the window moves freely and is excluded");
  b.reports.push_back(inv);
  b.info["particles"] = particles;
  b.info["r"] = m.tasep_r;
  b.info["v"] = m.tasep_v;
  b.info["p"] = m.tasep_p;
  return b;
}

Battery run_battery(const Model& m, const RunConfig& c, double tol) {
  switch (m.kind) {
    case ModelKind::Tensor: {
      Battery b;
      const auto labels = m.support_labels();
      if (m.lattice == Lattice::Cycle) {
        const TransitionTensor t = m.restricted();
        if (!t.positive()) throw InputError(m.source + ": " + kNotPositive);
        const ChzmcSolution sol = solve_chzmc(t, m.cycle_length, tol);
        b.reports = sol.reports;
        b.info["triple"] = {labels[sol.triple.a0], labels[sol.triple.b0], labels[sol.triple.c0]};
        b.info["z"] = finite_or_string(sol.spec.z);
        b.info["invariant"] = sol.invariant();
      } else {
        const HzmcSolution sol = solve_finite(m, tol);
        b.reports = sol.reports;
        add_solution_info(b, sol, labels);
      }
      return b;
    }
    case ModelKind::Gaussian:
    case ModelKind::GaussianDiag: return gaussian_battery(m, tol);
    case ModelKind::Beta: return beta_battery(m, tol);
    case ModelKind::Tasep: return tasep_battery(m, c, tol);
    case ModelKind::Fpp: break;
  }
  throw InputError(m.source + ": no invariance conditions are available for the fpp kernel; use `simulate`");
}

void emit(std::ostream& out, const json& doc, const std::string& path) {
  if (path.empty()) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << doc.dump(2) << "\n";
}

void emit_text(std::ostream& out, const std::string& text, const std::string& path) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

json summary_json(const LineSummary& s) {
  json j;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["mean_se"] = finite_or_string(s.mean_se);
  j["variance"] = s.variance;
  j["variance_se"] = finite_or_string(s.variance_se);
  json ac = json::array(), se = json::array();
  for (std::size_t k = 0; k < kMaxLag; ++k) {
    ac.push_back(finite_or_string(s.autocorrelation[k]));
    se.push_back(finite_or_string(s.autocorrelation_se[k]));
  }
  j["autocorrelation"] = ac;
  j["autocorrelation_se"] = se;
  j["autocorrelation_defined"] = s.autocorrelation_defined;
  return j;
}

std::vector<double> defined_cells(std::span<const double> row) {
  std::vector<double> out;
  for (double v : row)
    if (!std::isnan(v)) out.push_back(v);
  return out;
}

/// (x_0, y_0, x_1, y_1, ...) from consecutive rows, up to the last defined pair.
std::vector<double> interleave(std::span<const double> x, std::span<const double> y) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size() && !std::isnan(x[i]); ++i) {
    out.push_back(x[i]);
    if (i >= y.size() || std::isnan(y[i])) break;
    out.push_back(y[i]);
  }
  return out;
}

std::function<double(double, CounterRng&)> right_edge_sampler(const Model& m, double tol) {
  switch (m.kind) {
    case ModelKind::Tensor: {
      const Matrix d = solve_finite(m, tol).spec.d;
      return [d](double x, CounterRng& rng) {
        const auto row = static_cast<Eigen::Index>(x);
        double u = rng.uniform() * d.row(row).sum(), acc = 0.0;
        for (Eigen::Index j = 0; j < d.cols(); ++j)
          if ((acc += d(row, j)) >= u) return static_cast<double>(j);
        return static_cast<double>(d.cols() - 1);
      };
    }
    case ModelKind::Gaussian:
    case ModelKind::GaussianDiag: {
      const MarkovDensity d = gaussian_invariant_hzmc(*m.gaussian).chain.d;
      return d.sample;
    }
    case ModelKind::Beta: return beta_candidate_hzmc(*m.beta, m.beta_rho_sd).d.sample;
    default: throw InputError(m.source + ": the resample boundary needs a down kernel; use \"shrink\"");
  }
}

std::vector<double> initial_line(const Model& m, const RunConfig& c, double tol, std::size_t& width) {
  CounterRng rng(c.seed, kStreamLine, 0);
  switch (m.init.kind) {
    case InitSpec::Kind::Values:
      width = m.init.values.size();
      return m.init.values;
    case InitSpec::Kind::Constant:
      if (!c.width) throw InputError("--width is required for a constant initial line");
      width = *c.width;
      return std::vector<double>(width, m.init.value);
    case InitSpec::Kind::TasepFrozen: {
      width = tasep_particles(m, c);
      return tasep_frozen(width, m.tasep_r, m.tasep_v, m.tasep_p).positions;
    }
    case InitSpec::Kind::Hzmc: break;
  }
  if (m.lattice == Lattice::Cycle) {
    if (m.kind != ModelKind::Tensor) throw InputError(m.source + ": cyclic lattices need a tensor kernel");
    const TransitionTensor t = m.restricted();
    if (!t.positive()) throw InputError(m.source + ": " + kNotPositive);
    const ChzmcSolution sol = solve_chzmc(t, m.cycle_length, tol);
    if (!sol.invariant()) throw InputError(m.source + ": the kernel has no invariant cyclic chain to start from");
    width = m.cycle_length;
    return even_entries(sample_chzmc_line(sol.spec, rng));
  }
  width = c.width.value_or(1000 + c.steps);
  switch (m.kind) {
    case ModelKind::Tensor: {
      const HzmcSolution sol = solve_finite(m, tol);
      HzmcSpec spec = sol.spec;
      if (m.rho) spec.rho0 = Eigen::Map<const Vector>(m.rho->data(), static_cast<Eigen::Index>(m.rho->size()));
      return even_entries(sample_hzmc_line(spec, 2 * width - 1, rng));
    }
    case ModelKind::Gaussian:
    case ModelKind::GaussianDiag:
      return even_entries(sample_hzmc_line(gaussian_invariant_hzmc(*m.gaussian).chain, 2 * width - 1, rng));
    case ModelKind::Beta:
      return even_entries(sample_hzmc_line(beta_candidate_hzmc(*m.beta, m.beta_rho_sd), 2 * width - 1, rng));
    default:
      throw InputError(m.source + ": " + to_string(m.kind) + " models need an explicit \"init\" (values or constant)");
  }
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

}  // namespace

int cmd_check(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Model m = load_with_overrides(c);
  const double tol = tolerance_for(m, c);
  const Battery b = run_battery(m, c, tol);
  json doc = header("check", m, c, tol);
  doc["reports"] = reports_json(b.reports);
  doc["info"] = b.info;
  doc["pass"] = b.pass();
  emit(out, doc, c.out_path);
  return b.pass() ? kExitPass : kExitFailure;
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Model m = load_with_overrides(c);
  const double tol = tolerance_for(m, c);
  json failure = header("solve", m, c, tol);
  switch (m.kind) {
    case ModelKind::Tensor: {
      const auto labels = m.support_labels();
      if (m.lattice == Lattice::Cycle) {
        const TransitionTensor t = m.restricted();
        if (!t.positive()) throw InputError(m.source + ": " + kNotPositive);
        const ChzmcSolution sol = solve_chzmc(t, m.cycle_length, tol);
        if (sol.invariant()) {
          emit_text(out, write_chzmc_spec(sol.spec, labels), c.out_path);
          return kExitPass;
        }
        failure["reports"] = reports_json(sol.reports);
      } else {
        const HzmcSolution sol = solve_finite(m, tol);
        const bool z_ok = m.lattice != Lattice::Z || sol.report("stationarity_z").pass();
        if (sol.invariant() && z_ok) {
          emit_text(out, write_hzmc_spec(sol.spec, labels, &sol), c.out_path);
          return kExitPass;
        }
        failure["reports"] = reports_json(sol.reports);
      }
      break;
    }
    case ModelKind::Gaussian:
    case ModelKind::GaussianDiag:
      emit_text(out, write_gaussian_spec(*m.gaussian), c.out_path);
      return kExitPass;
    case ModelKind::Beta: {
      const Battery b = beta_battery(m, tol);
      failure["reports"] = reports_json(b.reports);
      failure["reason"] = b.reports[2].pass() ? "candidate chain failed a condition"
                                              : "stationarity fails: the candidate first-cell law is not invariant";
      break;
    }
    case ModelKind::Tasep:
    case ModelKind::Fpp:
      throw InputError(m.source + ": no zigzag chain solver for the " + to_string(m.kind) + " kernel");
  }
  failure["pass"] = false;
  out << failure.dump(2) << "\n";
  err << "no invariant zigzag chain found\n";
  return kExitFailure;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Model m = load_with_overrides(c);
  const double tol = tolerance_for(m, c);
  if (c.spec_path.empty()) throw InputError("--spec is required");
  const SpecFile s = load_spec(c.spec_path);
  json doc = header("verify", m, c, tol);
  doc["spec"] = c.spec_path;
  std::vector<CheckReport> reports;

  if (m.kind == ModelKind::Tensor && s.kind == SpecFile::Kind::Hzmc) {
    const TransitionTensor t = m.restricted();
    if (s.hzmc.size() != t.size()) throw InputError(c.spec_path + ": chain size does not match the model support");
    if (!s.labels.empty() && s.labels != m.support_labels())
      throw InputError(c.spec_path + ": chain labels do not match the model support");
    HzmcSpec h = s.hzmc;
    h.lattice = m.lattice == Lattice::Cycle ? Lattice::N : m.lattice;
    if (m.lattice == Lattice::Cycle) throw InputError(c.spec_path + ": a cyclic lattice needs a cyclic chain");
    reports.push_back(bruteforce_invariance(t, h, c.kmax, tol));
    const auto toom = m.lattice == Lattice::Z ? check_hzmc_z(t, h, tol) : check_toom_conditions(t, h, tol);
    reports.insert(reports.end(), toom.begin(), toom.end());
    doc["kmax"] = c.kmax;
  } else if (m.kind == ModelKind::Tensor && s.kind == SpecFile::Kind::Chzmc) {
    if (m.lattice != Lattice::Cycle || m.cycle_length != s.chzmc.n)
      throw InputError(c.spec_path + ": cycle length does not match the model lattice");
    const TransitionTensor t = m.restricted();
    if (static_cast<std::size_t>(s.chzmc.d.rows()) != t.size())
      throw InputError(c.spec_path + ": chain size does not match the model support");
    ChzmcSpec spec = s.chzmc;
    spec.z = partition_function(spec.d, spec.u, spec.n);
    reports.push_back(bruteforce_cycle_invariance(t, spec, tol));
    const auto cc = check_chzmc_conditions(t, spec, tol);
    reports.insert(reports.end(), cc.begin(), cc.end());
  } else if ((m.kind == ModelKind::Gaussian || m.kind == ModelKind::GaussianDiag) &&
             s.kind == SpecFile::Kind::GaussianClosedForm) {
    const GaussianPcaParams sp(s.m, s.sigma);
    const GaussianInvariant chain = gaussian_invariant_hzmc(sp);
    QuadratureOptions opts;
    opts.tolerance = tol;
    for (auto& r : quadrature_check_conditions(m.density(), chain.chain, m.grid(), opts)) reports.push_back(r);

    // One PCA step applied to a sampled first line.
    const std::size_t width = c.width.value_or(20000);
    if (width < 1000) throw InputError("--width must be at least 1000 for the Monte-Carlo check");
    CounterRng rng(c.seed, kStreamLine, 0);
    const std::vector<double> x = even_entries(sample_hzmc_line(chain.chain, 2 * width - 1, rng));
    ModelInstance inst;
    inst.kernel = m.pca_kernel();
    inst.seed = c.seed;
    const std::vector<double> y = step_pca(x, inst, 0);
    const double sd = chain.stationary_sd;
    const DistanceResult ks = ks_distance(y, [sd](double v) { return 0.5 * std::erfc(-v / (sd * std::sqrt(2.0))); });
    CheckReport mc = make_report("monte_carlo_marginal", ks.distance, ks.threshold);
    mc.notes.push_back("KS distance of the updated line to N(0, stationary_var)");
    reports.push_back(mc);
    const LineSummary zs = summarize_line(interleave(x, y));
    CheckReport lag = make_report("monte_carlo_lag1", std::abs(zs.autocorrelation[0] - chain.phi),
                                  3.0 * zs.autocorrelation_se[0]);
    lag.witnesses = {{"observed", {zs.autocorrelation[0]}}, {"phi", {chain.phi}}};
    lag.notes.push_back("lag-1 autocorrelation of the zigzag (old line, new line) within 3 standard errors of phi");
    reports.push_back(lag);
    doc["width"] = width;
  } else {
    throw InputError("chain file kind does not fit a " + to_string(m.kind) + " model");
  }

  const bool pass = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass(); });
  doc["reports"] = reports_json(reports);
  doc["pass"] = pass;
  emit(out, doc, c.out_path);
  return pass ? kExitPass : kExitFailure;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Model m = load_with_overrides(c);
  const double tol = tolerance_for(m, c);
  std::size_t width = 0;
  const std::vector<double> init = initial_line(m, c, tol, width);

  ModelInstance inst;
  inst.kernel = m.pca_kernel();
  inst.lattice = m.lattice;
  inst.boundary = m.boundary;
  inst.seed = c.seed;
  inst.cycle_length = m.cycle_length;
  inst.threads = c.threads;
  if (m.boundary == Boundary::ResampleRightEdge) inst.right_edge = right_edge_sampler(m, tol);
  if (inst.boundary == Boundary::Shrink && width < c.steps + 1)
    throw InputError("a shrinking window needs --width >= steps + 1");

  const SpaceTimeDiagram diagram = simulate_diagram(inst, init, c.steps);

  json doc = header("simulate", m, c, tol);
  doc.erase("tolerance");
  doc["width"] = width;
  doc["steps"] = c.steps;
  doc["boundary"] = to_string(m.boundary);
  const std::vector<double> last = defined_cells(diagram.row(c.steps));
  if (last.size() >= 10) doc["final_line"] = summary_json(summarize_line(last));
  if (c.steps >= 1) {
    const std::vector<double> zz = interleave(diagram.row(c.steps - 1), diagram.row(c.steps));
    if (zz.size() >= 10) doc["zigzag"] = summary_json(summarize_line(zz));
  }
  if (!c.out_path.empty()) {
    std::ofstream csv(c.out_path + ".csv");
    std::ofstream bin(c.out_path + ".bin", std::ios::binary);
    if (!csv || !bin) throw InputError("cannot write " + c.out_path + ".csv/.bin");
    write_diagram_csv(diagram, csv);
    write_diagram_binary(diagram, bin);
    doc["files"] = {c.out_path + ".csv", c.out_path + ".bin", c.out_path + ".json"};
    std::ofstream js(c.out_path + ".json");
    js << doc.dump(2) << "\n";
  }
  out << doc.dump(2) << "\n";
  return kExitPass;
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::ostringstream os;
  if (!c.model_path.empty()) {
    const Model m = load_with_overrides(c);
    const double tol = tolerance_for(m, c);
    const Battery b = run_battery(m, c, tol);
    os << "model      " << m.source << "\n";
    os << "kernel     " << to_string(m.kind) << "\n";
    os << "lattice    " << to_string(m.lattice);
    if (m.lattice == Lattice::Cycle) os << " (length " << m.cycle_length << ")";
    os << "\n";
    os << "tolerance  " << tol << "\n\n";
    os << std::left << std::setw(30) << "condition" << std::setw(16) << "residual" << std::setw(16) << "tolerance"
       << "result\n";
    for (const auto& r : b.reports) {
      os << std::left << std::setw(30) << r.condition << std::setw(16) << fixed(r.max_residual) << std::setw(16)
         << fixed(r.tolerance) << (r.pass() ? "PASS" : "FAIL") << "\n";
      for (const auto& n : r.notes) os << "    " << n << "\n";
    }
    os << "\n";
    for (const auto& [key, value] : b.info.items()) os << std::left << std::setw(28) << key << value.dump() << "\n";
    os << "\n" << (b.pass() ? "all conditions hold" : "some conditions fail") << "\n";
    emit_text(out, os.str(), c.out_path);
    return b.pass() ? kExitPass : kExitFailure;
  }
  if (c.spec_path.empty()) throw InputError("report needs --model or --spec");
  const SpecFile s = load_spec(c.spec_path);
  os << "chain file " << c.spec_path << "\n";
  switch (s.kind) {
    case SpecFile::Kind::Hzmc: {
      const HzmcSpec& h = s.hzmc;
      os << "kind       zigzag chain on " << to_string(h.lattice) << ", " << h.size() << " letters\n";
      os << "row sums   d " << fixed((h.d.rowwise().sum().array() - 1.0).abs().maxCoeff()) << ", u "
         << fixed((h.u.rowwise().sum().array() - 1.0).abs().maxCoeff()) << " (max deviation from 1)\n";
      os << "rho0       mass " << h.rho0.sum() << ", stationary residual "
         << fixed((h.rho0.transpose() * h.d - h.rho0.transpose()).cwiseAbs().maxCoeff()) << "\n";
      break;
    }
    case SpecFile::Kind::Chzmc:
      os << "kind       cyclic zigzag chain, cycle length " << s.chzmc.n << ", " << s.chzmc.d.rows() << " letters\n";
      os << "Z          " << format_double(partition_function(s.chzmc.d, s.chzmc.u, s.chzmc.n)) << "\n";
      break;
    case SpecFile::Kind::GaussianClosedForm: {
      const GaussianPcaParams p(s.m, s.sigma);
      const GaussianInvariant g = gaussian_invariant_hzmc(p);
      os << "kind       Gaussian closed form, m = " << s.m << ", sigma = " << s.sigma << "\n";
      os << "phi        " << format_double(g.phi) << "\n";
      os << "innovation " << format_double(g.innovation_sd * g.innovation_sd) << "\n";
      os << "stationary " << format_double(g.stationary_sd * g.stationary_sd) << "\n";
      break;
    }
  }
  emit_text(out, os.str(), c.out_path);
  return kExitPass;
}

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "check") return cmd_check(c, out, err);
    if (c.command == "solve") return cmd_solve(c, out, err);
    if (c.command == "verify") return cmd_verify(c, out, err);
    if (c.command == "simulate") return cmd_simulate(c, out, err);
    if (c.command == "report") return cmd_report(c, out, err);
    err << "error: unknown command \"" << c.command << "\"\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SizeGuardError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (last residual " << e.last_residual() << ")\n";
    return kExitFailure;
  }
}

}  // namespace zigzag
