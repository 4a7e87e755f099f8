#include "zigzag/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace zigzag {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw InputError(source + ": " + what);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << source << ": parse error at line " << line << ", column " << column << ": " << e.what();
    throw InputError(os.str());
  }
}

double number_of(const json& v, const std::string& source, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_number(v.get<std::string>());
    } catch (const InputError& e) {
      fail(source, field + ": " + e.what());
    }
  }
  fail(source, field + " must be a number or a numeric string");
}

double required_number(const json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.contains(key)) fail(source, where + " is missing \"" + key + "\"");
  return number_of(obj.at(key), source, where + "." + key);
}

void flatten(const json& v, std::vector<double>& out, const std::string& source) {
  if (v.is_array()) {
    for (const auto& x : v) flatten(x, out, source);
  } else {
    out.push_back(number_of(v, source, "kernel.tensor"));
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_double(v(i)));
  return out;
}

Matrix matrix_of(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(source, field + " must be a non-empty list of rows");
  const auto rows = v.size(), cols = v.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(source, field + " rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = number_of(v[i][j], source, field);
  }
  return m;
}

Vector vector_of(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array()) fail(source, field + " must be a list");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = number_of(v[i], source, field);
  return out;
}

Lattice lattice_of(const json& v, std::size_t& cycle, const std::string& source) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "N") return Lattice::N;
    if (s == "Z") return Lattice::Z;
    fail(source, "lattice must be \"N\", \"Z\" or {\"cycle\": n}");
  }
  if (v.is_object() && v.contains("cycle")) {
    const double n = number_of(v.at("cycle"), source, "lattice.cycle");
    if (!(n >= 1) || n != std::floor(n)) fail(source, "cycle length must be a positive integer");
    cycle = static_cast<std::size_t>(n);
    return Lattice::Cycle;
  }
  fail(source, "lattice must be \"N\", \"Z\" or {\"cycle\": n}");
}

std::size_t count_of(const json& obj, const char* key, const std::string& source, const std::string& where) {
  const double v = required_number(obj, key, source, where);
  if (!(v >= 0) || v != std::floor(v)) fail(source, where + "." + key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Tensor: return "tensor";
    case ModelKind::Gaussian: return "gaussian";
    case ModelKind::GaussianDiag: return "gaussian_diag";
    case ModelKind::Beta: return "beta";
    case ModelKind::Tasep: return "tasep";
    case ModelKind::Fpp: return "fpp";
  }
  return "?";
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_plain = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: \"" + s + "\"");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw InputError("not a number: \"" + s + "\"");
    return v;
  };
  if (slash == std::string::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0) throw InputError("zero denominator in \"" + text + "\"");
  return num / den;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

TransitionTensor Model::restricted() const {
  if (!tensor) throw InputError(source + ": model has no tensor");
  if (support.empty()) return *tensor;
  return tensor->restrict_to(support);
}

std::vector<std::string> Model::support_labels() const {
  if (!tensor) return {};
  if (support.empty()) return tensor->alphabet().labels;
  std::vector<std::string> out;
  for (std::size_t s : support) out.push_back(tensor->alphabet().labels[s]);
  return out;
}

GridMeasure Model::grid() const {
  switch (kind) {
    case ModelKind::Gaussian:
    case ModelKind::GaussianDiag:
      return grid_halfwidth > 0 ? GridMeasure::gauss_legendre(grid_points, grid_halfwidth)
                                : default_gaussian_grid(*gaussian, grid_points);
    case ModelKind::Beta:
      return grid_halfwidth > 0 ? GridMeasure::gauss_legendre(grid_points, grid_halfwidth)
                                : default_beta_grid(*beta, grid_points);
    default: throw InputError(source + ": model has no evaluation grid");
  }
}

KernelDensity Model::density() const {
  switch (kind) {
    case ModelKind::Gaussian: return gaussian_kernel_density(*gaussian);
    case ModelKind::GaussianDiag: return gaussian_diag_kernel_density(*gaussian);
    case ModelKind::Beta: return beta_kernel_density(*beta);
    default: throw InputError(source + ": " + to_string(kind) + " kernel has no density form");
  }
}

PcaKernel Model::pca_kernel() const {
  switch (kind) {
    case ModelKind::Tensor: return PcaKernel::from_tensor(restricted());
    case ModelKind::Tasep: return tasep_kernel(tasep_r, tasep_v, tasep_p);
    case ModelKind::Fpp: return fpp_kernel(fpp_law);
    default: return PcaKernel::from_density(density());
  }
}

static Model parse_model_impl(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) fail(source, "model must be a JSON object");
  Model m;
  m.source = source;

  if (!doc.contains("kernel") || !doc.at("kernel").is_object()) fail(source, "missing \"kernel\" object");
  const json& k = doc.at("kernel");

  std::optional<FiniteAlphabet> alphabet;
  if (doc.contains("alphabet")) {
    const json& a = doc.at("alphabet");
    if (a.contains("labels")) {
      std::vector<std::string> labels;
      for (const auto& l : a.at("labels")) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
      alphabet = FiniteAlphabet(labels.size(), labels);
    } else if (a.contains("size")) {
      alphabet = FiniteAlphabet::indexed(count_of(a, "size", source, "alphabet"));
    } else if (a.contains("grid")) {
      const json& g = a.at("grid");
      if (g.contains("points")) m.grid_points = count_of(g, "points", source, "alphabet.grid");
      if (g.contains("halfwidth")) m.grid_halfwidth = required_number(g, "halfwidth", source, "alphabet.grid");
      if (m.grid_points < 3) fail(source, "grid needs at least 3 points");
    } else {
      fail(source, "alphabet needs \"labels\", \"size\" or \"grid\"");
    }
  }

  if (k.contains("tensor")) {
    m.kind = ModelKind::Tensor;
    std::vector<double> entries;
    flatten(k.at("tensor"), entries, source);
    std::size_t size = 0;
    while (size * size * size < entries.size()) ++size;
    if (size * size * size != entries.size()) fail(source, "kernel.tensor must have k^3 entries");
    if (!alphabet) alphabet = FiniteAlphabet::indexed(size);
    if (alphabet->size != size) fail(source, "kernel.tensor size does not match the alphabet");
    m.tensor = TransitionTensor(*alphabet, std::move(entries));
  } else if (k.contains("family")) {
    const auto family = k.at("family").get<std::string>();
    const std::string where = "kernel";
    if (family == "gaussian" || family == "gaussian_diag") {
      m.kind = family == "gaussian" ? ModelKind::Gaussian : ModelKind::GaussianDiag;
      m.gaussian.emplace(required_number(k, "m", source, where), required_number(k, "sigma", source, where));
    } else if (family == "beta") {
      m.kind = ModelKind::Beta;
      m.beta.emplace(required_number(k, "alpha", source, where), required_number(k, "beta", source, where),
                     required_number(k, "m", source, where), required_number(k, "theta", source, where));
      if (k.contains("rho_sd")) m.beta_rho_sd = required_number(k, "rho_sd", source, where);
      if (!(m.beta_rho_sd > 0)) fail(source, "kernel.rho_sd must be positive");
    } else if (family == "tasep") {
      m.kind = ModelKind::Tasep;
      m.tasep_r = required_number(k, "r", source, where);
      m.tasep_v = required_number(k, "v", source, where);
      m.tasep_p = required_number(k, "p", source, where);
      TasepConfig{{}, m.tasep_r, m.tasep_v, m.tasep_p}.validate();
    } else if (family == "fpp") {
      m.kind = ModelKind::Fpp;
      if (!k.contains("law")) fail(source, "kernel.law is required for fpp");
      const json& law = k.at("law");
      const auto kind = law.value("kind", std::string("constant"));
      if (kind == "constant") {
        m.fpp_law = {WeightLaw::Kind::Constant, required_number(law, "value", source, "kernel.law"), 0.0};
      } else if (kind == "exponential") {
        m.fpp_law = {WeightLaw::Kind::Exponential, required_number(law, "rate", source, "kernel.law"), 0.0};
      } else if (kind == "uniform") {
        m.fpp_law = {WeightLaw::Kind::Uniform, required_number(law, "lo", source, "kernel.law"),
                     required_number(law, "hi", source, "kernel.law")};
      } else {
        fail(source, "unknown edge-weight law \"" + kind + "\"");
      }
      m.fpp_law.validate();
    } else {
      fail(source, "unknown kernel family \"" + family + "\"");
    }
  } else {
    fail(source, "kernel needs \"tensor\" or \"family\"");
  }

  if (doc.contains("support")) {
    if (!m.tensor) fail(source, "support applies to tensor kernels only");
    const auto& labels = m.tensor->alphabet().labels;
    for (const auto& s : doc.at("support")) {
      const std::string label = s.is_string() ? s.get<std::string>() : s.dump();
      const auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) fail(source, "support label \"" + label + "\" is not in the alphabet");
      m.support.push_back(static_cast<std::size_t>(it - labels.begin()));
    }
    m.restricted();  // validates that the restriction is stochastic
  }

  if (doc.contains("lattice")) m.lattice = lattice_of(doc.at("lattice"), m.cycle_length, source);
  if (m.lattice == Lattice::Cycle) m.boundary = Boundary::Cycle;

  if (doc.contains("boundary")) {
    const auto b = doc.at("boundary").get<std::string>();
    if (b == "shrink") {
      m.boundary = Boundary::Shrink;
    } else if (b == "resample") {
      m.boundary = Boundary::ResampleRightEdge;
    } else if (b == "cycle") {
      m.boundary = Boundary::Cycle;
    } else {
      fail(source, "boundary must be \"shrink\", \"resample\" or \"cycle\"");
    }
    if ((m.boundary == Boundary::Cycle) != (m.lattice == Lattice::Cycle))
      fail(source, "the cycle boundary goes with a cyclic lattice");
  }

  if (doc.contains("rho")) {
    if (!m.tensor) fail(source, "rho applies to tensor kernels; use kernel.rho_sd for beta");
    Vector r = vector_of(doc.at("rho"), source, "rho");
    if (static_cast<std::size_t>(r.size()) != m.restricted().size()) fail(source, "rho length does not match the support");
    m.rho = std::vector<double>(r.data(), r.data() + r.size());
  }

  if (doc.contains("init")) {
    const json& init = doc.at("init");
    const auto type = init.value("type", std::string("hzmc"));
    if (type == "hzmc") {
      m.init.kind = InitSpec::Kind::Hzmc;
    } else if (type == "tasep_frozen") {
      m.init.kind = InitSpec::Kind::TasepFrozen;
      if (m.kind != ModelKind::Tasep) fail(source, "tasep_frozen init needs the tasep family");
      if (init.contains("particles")) m.init.particles = count_of(init, "particles", source, "init");
    } else if (type == "values") {
      m.init.kind = InitSpec::Kind::Values;
      if (!init.contains("values")) fail(source, "init.values is required");
      const Vector v = vector_of(init.at("values"), source, "init.values");
      m.init.values.assign(v.data(), v.data() + v.size());
    } else if (type == "constant") {
      m.init.kind = InitSpec::Kind::Constant;
      m.init.value = required_number(init, "value", source, "init");
    } else {
      fail(source, "unknown init type \"" + type + "\"");
    }
  } else if (m.kind == ModelKind::Tasep) {
    m.init.kind = InitSpec::Kind::TasepFrozen;
  }
  return m;
}

Model parse_model(const std::string& text, const std::string& source) {
  try {
    return parse_model_impl(text, source);
  } catch (const json::exception& e) {
    fail(source, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Model load_model(const std::string& path) { return parse_model(read_file(path), path); }

std::string write_hzmc_spec(const HzmcSpec& spec, const std::vector<std::string>& labels, const HzmcSolution* sol) {
  json doc;
  doc["kind"] = "hzmc";
  doc["lattice"] = to_string(spec.lattice);
  doc["labels"] = labels;
  doc["d"] = matrix_json(spec.d);
  doc["u"] = matrix_json(spec.u);
  doc["rho0"] = vector_json(spec.rho0);
  if (sol) {
    doc["triple"] = {sol->triple.a0, sol->triple.b0, sol->triple.c0};
    doc["nu"] = vector_json(sol->nu.vector);
    doc["eta"] = vector_json(sol->eta.vector);
  }
  return doc.dump(2) + "\n";
}

std::string write_chzmc_spec(const ChzmcSpec& spec, const std::vector<std::string>& labels) {
  json doc;
  doc["kind"] = "chzmc";
  doc["n"] = spec.n;
  doc["labels"] = labels;
  doc["d"] = matrix_json(spec.d);
  doc["u"] = matrix_json(spec.u);
  doc["z"] = format_double(spec.z);
  return doc.dump(2) + "\n";
}

std::string write_gaussian_spec(const GaussianPcaParams& params) {
  const GaussianInvariant g = gaussian_invariant_hzmc(params);
  const Ar1Params ar = ar1_parameters(params);
  json doc;
  doc["kind"] = "gaussian_closed_form";
  doc["m"] = format_double(params.m);
  doc["sigma"] = format_double(params.sigma);
  doc["l"] = format_double(g.l);
  doc["phi"] = format_double(g.phi);
  doc["innovation_var"] = format_double(ar.innovation_var);
  doc["stationary_var"] = format_double(g.stationary_sd * g.stationary_sd);
  doc["d"] = "normal(phi * a, innovation_var)";
  doc["u"] = "normal(phi * c, innovation_var)";
  doc["rho0"] = "normal(0, stationary_var)";
  return doc.dump(2) + "\n";
}

static SpecFile parse_spec_impl(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object() || !doc.contains("kind")) fail(source, "spec must be an object with a \"kind\"");
  SpecFile s;
  const auto kind = doc.at("kind").get<std::string>();
  if (doc.contains("labels"))
    for (const auto& l : doc.at("labels")) s.labels.push_back(l.get<std::string>());
  if (kind == "hzmc") {
    s.kind = SpecFile::Kind::Hzmc;
    s.hzmc.d = matrix_of(doc.at("d"), source, "d");
    s.hzmc.u = matrix_of(doc.at("u"), source, "u");
    s.hzmc.rho0 = vector_of(doc.at("rho0"), source, "rho0");
    std::size_t unused = 0;
    if (doc.contains("lattice")) s.hzmc.lattice = lattice_of(doc.at("lattice"), unused, source);
    const auto k = s.hzmc.d.rows();
    if (s.hzmc.d.cols() != k || s.hzmc.u.rows() != k || s.hzmc.u.cols() != k || s.hzmc.rho0.size() != k)
      fail(source, "d, u and rho0 must share one size");
  } else if (kind == "chzmc") {
    s.kind = SpecFile::Kind::Chzmc;
    s.chzmc.d = matrix_of(doc.at("d"), source, "d");
    s.chzmc.u = matrix_of(doc.at("u"), source, "u");
    s.chzmc.n = static_cast<std::size_t>(number_of(doc.at("n"), source, "n"));
    s.chzmc.z = doc.contains("z") ? number_of(doc.at("z"), source, "z") : 0.0;
    if (s.chzmc.d.rows() != s.chzmc.u.rows()) fail(source, "d and u must share one size");
  } else if (kind == "gaussian_closed_form") {
    s.kind = SpecFile::Kind::GaussianClosedForm;
    s.m = number_of(doc.at("m"), source, "m");
    s.sigma = number_of(doc.at("sigma"), source, "sigma");
  } else {
    fail(source, "unknown spec kind \"" + kind + "\"");
  }
  return s;
}

SpecFile parse_spec(const std::string& text, const std::string& source) {
  try {
    return parse_spec_impl(text, source);
  } catch (const json::exception& e) {
    fail(source, e.what());
  }
}

SpecFile load_spec(const std::string& path) { return parse_spec(read_file(path), path); }

std::string report_json(const CheckReport& r, int indent) {
  json doc;
  doc["condition"] = r.condition;
  doc["pass"] = r.pass();
  doc["max_residual"] = std::isfinite(r.max_residual) ? json(r.max_residual) : json(format_double(r.max_residual));
  doc["tolerance"] = r.tolerance;
  doc["location"] = r.location;
  json w = json::object();
  for (const auto& [name, values] : r.witnesses) {
    json arr = json::array();
    for (double v : values) arr.push_back(std::isfinite(v) ? json(v) : json(format_double(v)));
    w[name] = std::move(arr);
  }
  doc["witnesses"] = std::move(w);
  doc["notes"] = r.notes;
  return doc.dump(indent);
}

}  // namespace zigzag
