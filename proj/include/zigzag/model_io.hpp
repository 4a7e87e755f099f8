#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zigzag/continuous_kernels.hpp"
#include "zigzag/core_types.hpp"
#include "zigzag/finite_solver.hpp"
#include "zigzag/simulator.hpp"

// Model files (JSON), solved-chain files and report serialisation.
//
// Model file fields:
//   alphabet   {"labels": [...]} | {"size": k} | {"grid": {"points": n, "halfwidth": L}}
//   kernel     {"tensor": k x k x k nested or flat list}
//              | {"family": "gaussian" | "gaussian_diag", "m": .., "sigma": ..}
//              | {"family": "beta", "alpha": .., "beta": .., "m": .., "theta": .., "rho_sd": ..}
//              | {"family": "tasep", "r": .., "v": .., "p": ..}
//              | {"family": "fpp", "law": {"kind": "constant"|"exponential"|"uniform", ...}}
//   support    optional list of labels the tensor is restricted to
//   lattice    "N" | "Z" | {"cycle": n}
//   rho        optional first-cell law for finite chains (same length as the support)
//   boundary   optional "shrink" | "resample"
//   init       {"type": "hzmc"} | {"type": "tasep_frozen", "particles": n}
//              | {"type": "values", "values": [...]} | {"type": "constant", "value": x}
// Tensor entries are numbers or strings ("4/5", "0.80000000000000004").

namespace zigzag {

enum class ModelKind { Tensor, Gaussian, GaussianDiag, Beta, Tasep, Fpp };

std::string to_string(ModelKind kind);

struct InitSpec {
  enum class Kind { Hzmc, TasepFrozen, Values, Constant };
  Kind kind = Kind::Hzmc;
  std::vector<double> values;
  double value = 0.0;
  std::size_t particles = 0;
};

struct Model {
  std::string source;
  ModelKind kind = ModelKind::Tensor;
  /// Full tensor as written; `support` lists the kept letters (all when empty).
  std::optional<TransitionTensor> tensor;
  std::vector<std::size_t> support;
  std::optional<GaussianPcaParams> gaussian;
  std::optional<BetaPcaParams> beta;
  double beta_rho_sd = 0.5;
  double tasep_r = 0.5, tasep_v = 1.0, tasep_p = 1.0;
  WeightLaw fpp_law;
  Lattice lattice = Lattice::N;
  std::size_t cycle_length = 0;
  std::optional<std::vector<double>> rho;
  Boundary boundary = Boundary::Shrink;
  std::size_t grid_points = 257;
  /// 0 selects the family default.
  double grid_halfwidth = 0.0;
  InitSpec init;

  bool finite() const { return kind == ModelKind::Tensor; }
  /// Tensor restricted to the support.
  TransitionTensor restricted() const;
  std::vector<std::string> support_labels() const;
  /// Evaluation grid for continuous families, honouring overrides.
  GridMeasure grid() const;
  /// Density form of a continuous family.
  KernelDensity density() const;
  /// Sampling form of any model.
  PcaKernel pca_kernel() const;
};

/// Throws InputError; JSON syntax errors carry "line L, column C".
Model parse_model(const std::string& text, const std::string& source = "<model>");
Model load_model(const std::string& path);

/// Parses "4/5", decimal strings and plain numbers.
double parse_number(const std::string& text);

/// A solved chain as stored on disk.
struct SpecFile {
  enum class Kind { Hzmc, Chzmc, GaussianClosedForm };
  Kind kind = Kind::Hzmc;
  std::vector<std::string> labels;
  HzmcSpec hzmc;
  ChzmcSpec chzmc;
  double m = 0.0, sigma = 0.0;
};

std::string write_hzmc_spec(const HzmcSpec& spec, const std::vector<std::string>& labels, const HzmcSolution* solution);
std::string write_chzmc_spec(const ChzmcSpec& spec, const std::vector<std::string>& labels);
std::string write_gaussian_spec(const GaussianPcaParams& params);
SpecFile parse_spec(const std::string& text, const std::string& source = "<spec>");
SpecFile load_spec(const std::string& path);

/// Decimal form with 17 significant digits (round-trips exactly).
std::string format_double(double value);

/// JSON object text for a report.
std::string report_json(const CheckReport& report, int indent = -1);

std::string read_file(const std::string& path);

}  // namespace zigzag
