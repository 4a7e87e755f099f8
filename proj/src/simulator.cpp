#include "zigzag/simulator.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace zigzag {

namespace {

std::size_t draw_index(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<std::vector<double>> cumulative_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) < 0) throw InputError("negative transition weight");
      acc += m(i, j);
      rows[i].push_back(acc);
    }
    if (!(acc > 0)) throw InputError("transition row " + std::to_string(i) + " has no mass");
  }
  return rows;
}

std::size_t letter(double x, std::size_t k) {
  if (!(x >= 0) || x != std::floor(x) || x >= static_cast<double>(k))
    throw InputError("cell value is not a letter of the alphabet");
  return static_cast<std::size_t>(x);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  if (!in.read(reinterpret_cast<char*>(bits.data()), sizeof(T))) throw InputError("truncated diagram file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

PcaKernel PcaKernel::from_tensor(const TransitionTensor& tensor) {
  const std::size_t k = tensor.size();
  std::vector<std::vector<double>> cum(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double acc = 0.0;
      for (double v : tensor.row(a, b)) cum[a * k + b].push_back(acc += v);
    }
  PcaKernel kernel;
  kernel.name = "tensor";
  kernel.sample = [cum, k](double a, double b, CounterRng& rng) {
    return static_cast<double>(draw_index(cum[letter(a, k) * k + letter(b, k)], rng.uniform()));
  };
  kernel.validate = [k](std::span<const double> line) {
    for (double x : line) letter(x, k);
  };
  return kernel;
}

PcaKernel PcaKernel::from_density(const KernelDensity& kernel) {
  if (!kernel.sample) throw InputError("kernel '" + kernel.name + "' has no sampler");
  return PcaKernel{kernel.name, kernel.sample, {}};
}

std::string to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::Shrink: return "shrink";
    case Boundary::Cycle: return "cycle";
    case Boundary::ResampleRightEdge: return "resample_right_edge";
  }
  return "?";
}

CounterRng cell_rng(std::uint64_t seed, std::size_t t, std::size_t j) {
  return CounterRng(seed, (static_cast<std::uint64_t>(t) << 8) | kStreamCell, j);
}

std::vector<double> step_pca(std::span<const double> line, const ModelInstance& model, std::size_t t) {
  const std::size_t len = line.size();
  const bool cyclic = model.boundary == Boundary::Cycle;
  if (cyclic ? len < 1 : len < 2) throw InputError("line too short for a two-neighbour update");
  if (cyclic && model.cycle_length != 0 && model.cycle_length != len)
    throw InputError("line length does not match the cycle length");
  if (model.boundary == Boundary::ResampleRightEdge && !model.right_edge)
    throw InputError("resampling boundary needs a right-edge sampler");
  if (model.kernel.validate) model.kernel.validate(line);

  const std::size_t out_len = model.boundary == Boundary::Shrink ? len - 1 : len;
  const std::size_t interior = cyclic ? len : len - 1;
  std::vector<double> out(out_len);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      CounterRng rng = cell_rng(model.seed, t, j);
      out[j] = model.kernel.sample(line[j], line[(j + 1) % len], rng);
    }
  };
  const unsigned threads = std::max(1u, model.threads);
  if (threads == 1 || interior < 4096) {
    work(0, interior);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (interior + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(interior, lo + chunk);
      if (lo < hi)
        pool.emplace_back([&, w, lo, hi] {
          try {
            work(lo, hi);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  if (model.boundary == Boundary::ResampleRightEdge) {
    CounterRng rng = cell_rng(model.seed, t, len - 1);
    out[len - 1] = model.right_edge(line[len - 1], rng);
  }
  return out;
}

SpaceTimeDiagram simulate_diagram(const ModelInstance& model, std::span<const double> init, std::size_t steps) {
  const std::size_t width = init.size();
  if (model.boundary == Boundary::Shrink && width < steps + 1)
    throw InputError("shrinking window: width must exceed the number of steps");
  if (model.lattice == Lattice::Cycle && model.boundary != Boundary::Cycle)
    throw InputError("cyclic lattice requires the cycle boundary");
  SpaceTimeDiagram diag;
  diag.lattice = model.lattice;
  diag.width = width;
  diag.steps = steps;
  diag.seed = model.seed;
  diag.states.assign((steps + 1) * width, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> line(init.begin(), init.end());
  std::copy(line.begin(), line.end(), diag.states.begin());
  for (std::size_t t = 0; t < steps; ++t) {
    line = step_pca(line, model, t);
    std::copy(line.begin(), line.end(), diag.states.begin() + static_cast<std::ptrdiff_t>((t + 1) * width));
  }
  return diag;
}

std::vector<double> sample_hzmc_line(const HzmcSpec& hzmc, std::size_t length, CounterRng& rng) {
  const auto d = cumulative_rows(hzmc.d);
  const auto u = cumulative_rows(hzmc.u);
  std::vector<double> r0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < hzmc.rho0.size(); ++i) r0.push_back(acc += hzmc.rho0(i));
  if (!(acc > 0)) throw InputError("rho0 has no mass");
  std::vector<double> out;
  out.reserve(length);
  if (length == 0) return out;
  std::size_t s = draw_index(r0, rng.uniform());
  out.push_back(static_cast<double>(s));
  for (std::size_t i = 1; i < length; ++i) {
    s = draw_index(i % 2 == 1 ? d[s] : u[s], rng.uniform());
    out.push_back(static_cast<double>(s));
  }
  return out;
}

std::vector<double> sample_hzmc_line(const ContinuousHzmc& hzmc, std::size_t length, CounterRng& rng) {
  std::vector<double> out;
  out.reserve(length);
  if (length == 0) return out;
  double x = hzmc.rho0.sample(rng);
  out.push_back(x);
  for (std::size_t i = 1; i < length; ++i) {
    x = i % 2 == 1 ? hzmc.d.sample(x, rng) : hzmc.u.sample(x, rng);
    out.push_back(x);
  }
  return out;
}

std::vector<double> sample_chzmc_line(const ChzmcSpec& spec, CounterRng& rng) {
  const std::size_t n = spec.n;
  const Eigen::Index k = spec.d.rows();
  if (n == 0 || k == 0) throw InputError("empty cyclic chain");
  // Sequential conditioning: powers[j](x, x0) is the weight of closing the cycle in j more DU steps.
  const Matrix p = spec.d * spec.u;
  std::vector<Matrix> powers{Matrix::Identity(k, k)};
  for (std::size_t j = 1; j <= n; ++j) powers.push_back(powers.back() * p);
  auto pick = [&rng](const Vector& w) {
    std::vector<double> cum;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) cum.push_back(acc += std::max(0.0, w(i)));
    if (!(acc > 0)) throw InputError("cyclic chain has no admissible configuration");
    return static_cast<Eigen::Index>(draw_index(cum, rng.uniform()));
  };
  std::vector<double> out;
  const Eigen::Index x0 = pick(powers[n].diagonal());
  Eigen::Index x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = n - i - 1;
    const Vector close = spec.u * powers[left].col(x0);
    const Eigen::Index y = pick(spec.d.row(x).transpose().cwiseProduct(close));
    out.push_back(static_cast<double>(x));
    out.push_back(static_cast<double>(y));
    if (left > 0) x = pick(spec.u.row(y).transpose().cwiseProduct(powers[left].col(x0)));
  }
  return out;
}

std::vector<double> even_entries(std::span<const double> zigzag) {
  std::vector<double> out;
  for (std::size_t i = 0; i < zigzag.size(); i += 2) out.push_back(zigzag[i]);
  return out;
}

std::vector<double> odd_entries(std::span<const double> zigzag) {
  std::vector<double> out;
  for (std::size_t i = 1; i < zigzag.size(); i += 2) out.push_back(zigzag[i]);
  return out;
}

void TasepConfig::validate() const {
  if (!(r >= 0) || !(v >= 0)) throw InputError("exclusion process needs r >= 0 and v >= 0");
  if (!(p > 0 && p <= 1)) throw InputError("exclusion process needs 0 < p <= 1");
  for (std::size_t i = 0; i + 1 < positions.size(); ++i)
    if (!(positions[i] + 2 * r <= positions[i + 1])) {
      std::ostringstream os;
      os << "inadmissible configuration: particles " << i << " and " << i + 1 << " overlap";
      throw InputError(os.str());
    }
}

PcaKernel tasep_kernel(double r, double v, double p) {
  TasepConfig{{}, r, v, p}.validate();
  PcaKernel k;
  k.name = "tasep";
  k.sample = [r, v, p](double a, double b, CounterRng& rng) {
    if (!(a + 2 * r <= b)) throw InputError("inadmissible pair for the exclusion kernel");
    return rng.uniform() < p ? std::min(a + v, b - 2 * r) : a;
  };
  k.validate = [r, v, p](std::span<const double> line) {
    TasepConfig{std::vector<double>(line.begin(), line.end()), r, v, p}.validate();
  };
  return k;
}

TasepConfig tasep_step(const TasepConfig& config, std::uint64_t seed, std::size_t t) {
  config.validate();
  const auto& x = config.positions;
  TasepConfig next = config;
  for (std::size_t i = 0; i < x.size(); ++i) {
    CounterRng rng = cell_rng(seed, t, i);
    const double limit = i + 1 < x.size() ? x[i + 1] - 2 * config.r : std::numeric_limits<double>::infinity();
    if (rng.uniform() < config.p) next.positions[i] = std::min(x[i] + config.v, limit);
  }
  return next;
}

TasepConfig tasep_frozen(std::size_t particles, double r, double v, double p) {
  TasepConfig c{{}, r, v, p};
  for (std::size_t i = 0; i < particles; ++i) c.positions.push_back(2 * r * static_cast<double>(i));
  c.validate();
  return c;
}

void WeightLaw::validate() const {
  switch (kind) {
    case Kind::Constant:
      if (!(a >= 0)) throw InputError("constant edge weight must be non-negative");
      break;
    case Kind::Exponential:
      if (!(a > 0)) throw InputError("exponential edge weight needs a positive rate");
      break;
    case Kind::Uniform:
      if (!(a >= 0 && b >= a)) throw InputError("uniform edge weight needs 0 <= lo <= hi");
      break;
  }
}

double WeightLaw::quantile(double u) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Exponential: return -std::log1p(-u) / a;
    case Kind::Uniform: return a + (b - a) * u;
  }
  return a;
}

PcaKernel fpp_kernel(const WeightLaw& law) {
  law.validate();
  PcaKernel k;
  k.name = "fpp";
  k.sample = [law](double a, double b, CounterRng& rng) {
    const double t1 = law.quantile(rng.uniform());
    const double t2 = law.quantile(rng.uniform());
    return std::min(a + t1, b + t2);
  };
  k.validate = [](std::span<const double> line) {
    for (double x : line)
      if (!(x >= 0)) throw InputError("travel times must be non-negative");
  };
  return k;
}

std::vector<double> fpp_step(std::span<const double> row, const WeightLaw& law, std::uint64_t seed, std::size_t t) {
  ModelInstance model;
  model.kernel = fpp_kernel(law);
  model.seed = seed;
  return step_pca(row, model, t);
}

void write_diagram_csv(const SpaceTimeDiagram& diagram, std::ostream& out) {
  const auto old = out.precision(17);
  for (std::size_t t = 0; t <= diagram.steps; ++t) {
    for (std::size_t i = 0; i < diagram.width; ++i) {
      if (i > 0) out << ',';
      const double v = diagram.at(t, i);
      if (!std::isnan(v)) out << v;
    }
    out << '\n';
  }
  out.precision(old);
}

void write_diagram_binary(const SpaceTimeDiagram& diagram, std::ostream& out) {
  put_le<std::uint64_t>(out, diagram.width);
  put_le<std::uint64_t>(out, diagram.steps);
  for (double v : diagram.states) put_le<double>(out, v);
}

SpaceTimeDiagram read_diagram_binary(std::istream& in) {
  SpaceTimeDiagram d;
  d.width = get_le<std::uint64_t>(in);
  d.steps = get_le<std::uint64_t>(in);
  if (d.width > (std::size_t{1} << 40) / (d.steps + 1)) throw InputError("diagram header is implausible");
  d.states.resize((d.steps + 1) * d.width);
  for (double& v : d.states) v = get_le<double>(in);
  return d;
}

}  // namespace zigzag
