// pcminimax solve|verify|sweep --config <path> [--out <dir>] [--threads <n>]

#include <iostream>

#include "CLI11.hpp"
#include "pcminimax/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimax estimation error for periodically correlated processes"};
  app.require_subcommand(1);

  pcm::RunOptions opts;
  std::string config;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config (JSON)")->required();
    sub->add_option("--out", out, "Output directory (overrides output.dir)");
    sub->add_option("--threads", opts.threads, "Worker threads for simulation")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Compute P * nu_N^2 and the least-favorable model");
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the saddle value");
  auto* sweep = app.add_subcommand("sweep", "nu_N^2 over a list of horizons N");
  add_common(solve);
  add_common(verify);
  add_common(sweep);
  // test hook for exercising the failure path
  verify->add_option("--inject-target-offset", opts.target_offset)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(pcm::ExitCode::invalid_config);
  }

  opts.config = config;
  if (!out.empty()) opts.out = out;

  if (solve->parsed()) return pcm::run_solve(opts);
  if (verify->parsed()) return pcm::run_verify(opts);
  return pcm::run_sweep(opts);
}
