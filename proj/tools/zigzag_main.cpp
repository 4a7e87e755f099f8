#include <iostream>

#include "CLI11.hpp"
#include "zigzag/cli.hpp"

int main(int argc, char** argv) {
  zigzag::RunConfig config;
  CLI::App app{"zigzag: invariant zigzag Markov chains of two-neighbour probabilistic cellular automata"};
  app.require_subcommand(1);

  std::size_t grid_points = 0;
  double grid_halfwidth = 0.0, tol = 0.0;
  std::size_t width = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", config.model_path, "model file (JSON)");
    sub->add_option("--out", config.out_path, "output path");
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--grid-points", grid_points, "quadrature grid size");
    sub->add_option("--grid-halfwidth", grid_halfwidth, "quadrature grid half-width");
    sub->add_option("--tol", tol, "residual tolerance");
    sub->add_option("--width", width, "line width (simulate, verify) or particle count (tasep)");
    sub->add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "run the condition battery and print a JSON report");
  auto* solve = app.add_subcommand("solve", "construct the invariant zigzag chain");
  auto* verify = app.add_subcommand("verify", "verify a chain file against the model");
  auto* simulate = app.add_subcommand("simulate", "simulate a space-time diagram");
  auto* report = app.add_subcommand("report", "human-readable battery or chain-file summary");
  for (auto* sub : {check, solve, verify, simulate, report}) add_common(sub);
  verify->add_option("--spec", config.spec_path, "chain file written by solve")->required();
  verify->add_option("--kmax", config.kmax, "largest cylinder length for the exhaustive check");
  simulate->add_option("--steps", config.steps, "number of synchronous updates")->required();
  report->add_option("--spec", config.spec_path, "chain file written by solve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : zigzag::kExitInput;
  }

  for (auto* sub : app.get_subcommands()) config.command = sub->get_name();
  auto given = [&](const char* flag) {
    for (auto* sub : app.get_subcommands())
      if (sub->count(flag) > 0) return true;
    return false;
  };
  if (given("--grid-points")) config.grid_points = grid_points;
  if (given("--grid-halfwidth")) config.grid_halfwidth = grid_halfwidth;
  if (given("--tol")) config.tol = tol;
  if (given("--width")) config.width = width;

  return zigzag::run_command(config, std::cout, std::cerr);
}
