#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace zigzag {

enum ExitCode : int { kExitPass = 0, kExitFailure = 1, kExitInput = 2 };

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string out_path;
  std::string spec_path;
  std::uint64_t seed = 1;
  std::optional<std::size_t> grid_points;
  std::optional<double> grid_halfwidth;
  std::optional<double> tol;
  std::size_t kmax = 3;
  std::size_t steps = 0;
  std::optional<std::size_t> width;
  unsigned threads = 1;
};

/// Condition battery as JSON: finite kernels go through the eigenfunction
/// route, continuous families through quadrature.
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Writes the invariant chain to --out (or stdout).
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Exhaustive push-forward (finite) or quadrature plus Monte-Carlo (Gaussian) check of --spec.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Space-time diagram to <out>.csv / <out>.bin and a line summary.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Plain-text rendering of the battery (with --model) or of a chain file (with --spec).
int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.command; maps exceptions to exit codes.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace zigzag
