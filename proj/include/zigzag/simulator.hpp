#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "zigzag/core_types.hpp"
#include "zigzag/rng.hpp"

// Synchronous space-time simulation. Cell j of step t draws from its own
// counter-based stream keyed by (seed, t, j), so results do not depend on the
// number of worker threads.

namespace zigzag {

/// Sampling side of a two-neighbour kernel, plus an optional admissibility check
/// for whole lines (throws InputError on rejection).
struct PcaKernel {
  std::string name;
  std::function<double(double, double, CounterRng&)> sample;
  std::function<void(std::span<const double>)> validate;

  /// Letters are stored as their indices (0.0, 1.0, ...).
  static PcaKernel from_tensor(const TransitionTensor& tensor);
  static PcaKernel from_density(const KernelDensity& kernel);
};

enum class Boundary {
  /// Each step drops the rightmost cell (exact on N and Z windows).
  Shrink,
  /// Periodic: cell j reads (j, j+1 mod width).
  Cycle,
  /// The rightmost cell is redrawn from `right_edge` given the last input cell.
  /// Approximate: it ignores the missing right neighbour.
  ResampleRightEdge,
};

std::string to_string(Boundary boundary);

struct ModelInstance {
  PcaKernel kernel;
  Lattice lattice = Lattice::N;
  Boundary boundary = Boundary::Shrink;
  std::uint64_t seed = 0;
  /// Cycle length when lattice == Cycle.
  std::size_t cycle_length = 0;
  /// Draw of the new rightmost cell given the old rightmost cell.
  std::function<double(double, CounterRng&)> right_edge;
  unsigned threads = 1;
};

/// Generator for cell j of the transition from step t to t+1.
CounterRng cell_rng(std::uint64_t seed, std::size_t t, std::size_t j);

/// One synchronous update of `line` (time t to t+1).
std::vector<double> step_pca(std::span<const double> line, const ModelInstance& model, std::size_t t);

/// (steps+1) x width diagram started from `init`; row 0 is `init`.
SpaceTimeDiagram simulate_diagram(const ModelInstance& model, std::span<const double> init, std::size_t steps);

/// Zigzag sample (x0, y0, x1, y1, ...) of total length `length`; letters as indices.
std::vector<double> sample_hzmc_line(const HzmcSpec& hzmc, std::size_t length, CounterRng& rng);
std::vector<double> sample_hzmc_line(const ContinuousHzmc& hzmc, std::size_t length, CounterRng& rng);

/// Exact draw (x0, y0, ..., x_{n-1}, y_{n-1}) from a cyclic chain on a finite alphabet.
std::vector<double> sample_chzmc_line(const ChzmcSpec& spec, CounterRng& rng);

/// Entries 0, 2, 4, ... (the first line) and 1, 3, 5, ... (the second line).
std::vector<double> even_entries(std::span<const double> zigzag);
std::vector<double> odd_entries(std::span<const double> zigzag);

struct TasepConfig {
  std::vector<double> positions;
  double r = 0.0;
  double v = 0.0;
  double p = 1.0;

  /// Throws InputError unless positions are admissible (x_i + 2r <= x_{i+1}) and parameters are in range.
  void validate() const;
};

/// Kernel: with probability p move to min(a + v, b - 2r), else stay.
PcaKernel tasep_kernel(double r, double v, double p);

/// Particle update on a finite window; the rightmost particle moves unobstructed.
TasepConfig tasep_step(const TasepConfig& config, std::uint64_t seed, std::size_t t);

/// Evenly spaced blocked configuration x_i = 2 r i.
TasepConfig tasep_frozen(std::size_t particles, double r, double v, double p);

struct WeightLaw {
  enum class Kind { Constant, Exponential, Uniform };
  Kind kind = Kind::Constant;
  /// Constant: the value. Exponential: the rate. Uniform: lower end.
  double a = 1.0;
  /// Uniform: upper end.
  double b = 1.0;

  void validate() const;
  /// Inverse CDF; non-decreasing in u.
  double quantile(double u) const;
};

struct FppConfig {
  std::vector<double> row;
  WeightLaw law;
};

/// Kernel: min(a + T1, b + T2) with T1, T2 i.i.d. from `law` via inverse CDF.
PcaKernel fpp_kernel(const WeightLaw& law);

/// Next row of travel times (length one shorter than the input).
std::vector<double> fpp_step(std::span<const double> row, const WeightLaw& law, std::uint64_t seed, std::size_t t);

/// Rows as lines, cells separated by commas; dropped cells are empty fields.
void write_diagram_csv(const SpaceTimeDiagram& diagram, std::ostream& out);
/// Header: u64 width, u64 steps (little endian); then (steps+1)*width f64, row-major.
void write_diagram_binary(const SpaceTimeDiagram& diagram, std::ostream& out);
SpaceTimeDiagram read_diagram_binary(std::istream& in);

}  // namespace zigzag
