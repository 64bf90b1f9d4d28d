#include "pcminimax/app.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "pcminimax/csv.hpp"

namespace pcm {

using nlohmann::ordered_json;

namespace {

std::ostream& log_stream(const RunOptions& opts) { return opts.log ? *opts.log : std::cerr; }

ExperimentConfig prepare(const RunOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.out) cfg.output.dir = *opts.out;
  cfg.mc.threads = std::max(1u, opts.threads);
  if (const char* env = std::getenv(kSeedEnvVar)) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError(kSeedEnvVar, "must be a non-negative integer");
    cfg.mc.seed = seed;
  }
  return cfg;
}

void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

template <typename Body>
int guarded(const RunOptions& opts, const char* command, Body body) {
  std::ostream& log = log_stream(opts);
  try {
    return static_cast<int>(body());
  } catch (const ConfigError& e) {
    log << command << ": invalid config: " << e.what() << '\n';
    return static_cast<int>(ExitCode::invalid_config);
  } catch (const InvalidArgument& e) {
    log << command << ": invalid input: " << e.what() << '\n';
    return static_cast<int>(ExitCode::invalid_config);
  } catch (const NumericalError& e) {
    log << command << ": numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  }
}

}  // namespace

FourierBlockCoefficients coefficients_for(const ExperimentConfig& cfg) {
  return fourier_coefficients(block_function(cfg.weight, cfg.period, cfg.J), cfg.K, cfg.quad_nodes);
}

SolveResult solve(const ExperimentConfig& cfg, const FourierBlockCoefficients& c, std::size_t N) {
  SolveResult r;
  r.N = N;
  r.admissibility = check_summability(c, cfg.tail);
  r.op = assemble_QN(c, N);
  r.top = solve_top_eigen(r.op, cfg.eigen);
  if (!r.top.pair.converged)
    throw NumericalError("power iteration did not converge after " + std::to_string(r.top.pair.iterations) +
                         " iterations and the operator (dim " + std::to_string(r.op.dim()) +
                         ") is above the dense fallback cap");
  r.nu2 = std::max(0.0, r.top.pair.value);
  r.value = cfg.power * r.nu2;
  r.model = build_least_favorable(r.top.pair, cfg.power, N, c.K());
  r.trace_power = trace_power(r.model, 2 * (N + 1));
  const auto lambdas = uniform_lambda_grid(std::max<std::size_t>(cfg.output.spectral_grid, 2 * (N + 1)));
  r.factorization = verify_factorization(spectral_density(r.model, lambdas));
  r.upper_bound = upper_bound_grid(c, N, std::max<std::size_t>(4096, 2 * (N + 1)));

  if (r.nu2 == 0.0)
    r.warnings.push_back("weight function has no energy on the retained blocks; the minimax value is 0");
  if (!r.admissibility.pass) r.warnings.push_back("coefficient summability check failed: " + r.admissibility.diagnosis);
  if (r.top.degenerate)
    r.warnings.push_back("top eigenvalue is degenerate; the least-favorable process is one of several");
  return r;
}

ordered_json solve_report(const ExperimentConfig& cfg, const SolveResult& r) {
  ordered_json doc;
  doc["N"] = r.N;
  doc["K"] = cfg.K;
  doc["J"] = cfg.J;
  doc["T"] = cfg.period;
  doc["P"] = cfg.power;
  doc["weight_kind"] = to_string(cfg.weight.kind());
  doc["nu2"] = r.nu2;
  doc["value"] = r.value;
  doc["eigen"] = {{"method", r.top.method},
                  {"converged", r.top.pair.converged},
                  {"iterations", r.top.pair.iterations},
                  {"residual", r.top.pair.residual},
                  {"power_value", r.top.power_value},
                  {"power_converged", r.top.power_converged},
                  {"gap", r.top.gap_known ? ordered_json(r.top.gap) : ordered_json(nullptr)},
                  {"degenerate", r.top.degenerate}};
  if (r.top.gap_known) doc["eigen"]["oracle_value"] = r.top.oracle_value;
  doc["admissibility"] = {{"sum_norm", r.admissibility.total_l1},
                          {"sum_weighted_norm_sq", r.admissibility.total_weighted},
                          {"partial_sum_norm", r.admissibility.partial_l1},
                          {"partial_sum_weighted_norm_sq", r.admissibility.partial_weighted},
                          {"last_block_norms", r.admissibility.last_block_norms},
                          {"pass", r.admissibility.pass},
                          {"diagnosis", r.admissibility.diagnosis}};
  ordered_json blocks = ordered_json::array();
  for (const auto& g : r.model.g) blocks.push_back(g.frobenius_norm());
  doc["least_favorable"] = {{"order", r.model.order},
                            {"M", r.model.M},
                            {"power", r.model.coefficient_power()},
                            {"block_norms", blocks},
                            {"trace_power", r.trace_power},
                            {"factorization_residual", r.factorization.max_residual},
                            {"min_psd_margin", r.factorization.min_psd_margin}};
  doc["upper_bound"] = cfg.power * r.upper_bound;
  doc["warnings"] = r.warnings;
  return doc;
}

double horizon_tail_norm(const FourierBlockCoefficients& c, std::size_t N, const TailModel& tail) {
  double s = 0.0;
  for (std::size_t j = N + 1; j < c.J(); ++j) s += static_cast<double>(j + 1) * std::pow(c.block_norm(j), 2);
  s += check_summability(c, tail).tail_weighted;
  return std::sqrt(s);
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const FourierBlockCoefficients& c,
                            const std::vector<std::size_t>& horizons) {
  std::vector<SweepRow> rows;
  for (const std::size_t N : horizons) {
    const auto start = std::chrono::steady_clock::now();
    const BlockOperator op = assemble_QN(c, N);
    const TopEigen top = solve_top_eigen(op, cfg.eigen);
    if (!top.pair.converged) throw NumericalError("sweep: eigensolver failed at N = " + std::to_string(N));
    SweepRow row;
    row.N = N;
    row.nu2 = std::max(0.0, top.pair.value);
    row.gap = top.gap_known ? top.gap : std::nan("");
    row.tail_norm = horizon_tail_norm(c, N, cfg.tail);
    row.defect_bound = row.tail_norm * (2.0 * std::sqrt(row.nu2) + row.tail_norm);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

int run_solve(const RunOptions& opts) {
  return guarded(opts, "solve", [&] {
    const ExperimentConfig cfg = prepare(opts);
    const auto c = coefficients_for(cfg);
    const SolveResult r = solve(cfg, c, cfg.horizons.back());
    std::filesystem::create_directories(cfg.output.dir);
    write_json(solve_report(cfg, r), cfg.output.dir / "solve.json");
    if (cfg.output.operator_csv) write_matrix_csv(r.op.explicit_matrix(), cfg.output.dir / "operator.csv");
    if (cfg.output.spectral_csv)
      write_spectral_csv(spectral_density(r.model, uniform_lambda_grid(cfg.output.spectral_grid)),
                         cfg.output.dir / "spectral.csv");
    if (cfg.output.trace_csv) write_trace_csv(r.top.pair, cfg.output.dir / "trace.csv");
    for (const auto& w : r.warnings) log_stream(opts) << "solve: warning: " << w << '\n';
    return ExitCode::ok;
  });
}

int run_verify(const RunOptions& opts) {
  return guarded(opts, "verify", [&] {
    const ExperimentConfig cfg = prepare(opts);
    const auto c = coefficients_for(cfg);
    const std::size_t N = cfg.horizons.back();
    const SolveResult r = solve(cfg, c, N);
    const double target = r.value + opts.target_offset;
    const double analytic = population_mse(r.model, c, N);
    const MonteCarloReport mc = mc_mse(r.model, c, N, target, cfg.mc);
    bool pass = std::abs(mc.z_score) <= 4.0;

    ordered_json doc;
    doc["target"] = mc.target;
    doc["mse"] = mc.mse;
    doc["stderr"] = mc.stderr_mse;
    doc["z_score"] = mc.z_score;
    doc["replicates"] = mc.replicates;
    doc["seed"] = mc.seed;
    doc["N"] = N;
    doc["K"] = cfg.K;
    doc["P"] = cfg.power;
    doc["nu2"] = r.nu2;
    doc["analytic_mse"] = analytic;
    doc["analytic_defect"] = std::abs(analytic - r.value);

    if (cfg.pc_check.enabled) {
      const auto last = static_cast<std::int64_t>(cfg.pc_check.periods) - 1;
      const auto paths = synthesize_pc_ensemble(r.model, cfg.period, 0, last, cfg.pc_check.u_grid,
                                                cfg.pc_check.paths, cfg.mc.seed ^ 0x9C0FFEEull,
                                                default_noise_law(r.model, c), cfg.mc.threads);
      const PcCovariance cov = empirical_pc_covariance(paths);
      const bool pc_pass = cov.max_defect_z <= 5.0;
      doc["pc_periodicity"] = {{"paths", cov.ensemble},
                               {"periods", cfg.pc_check.periods},
                               {"u_grid", cfg.pc_check.u_grid},
                               {"max_defect", cov.max_defect},
                               {"max_defect_z", cov.max_defect_z},
                               {"pass", pc_pass}};
      if (cfg.output.path_csv) {
        std::filesystem::create_directories(cfg.output.dir);
        write_path_csv(paths.front(), cfg.output.dir / "path.csv");
      }
      pass = pass && pc_pass;
    }
    doc["pass"] = pass;

    std::filesystem::create_directories(cfg.output.dir);
    write_json(doc, cfg.output.dir / "verify.json");
    if (!pass) log_stream(opts) << "verify: Monte Carlo check failed (z = " << mc.z_score << ")\n";
    return pass ? ExitCode::ok : ExitCode::verification_failed;
  });
}

int run_sweep(const RunOptions& opts) {
  return guarded(opts, "sweep", [&] {
    const ExperimentConfig cfg = prepare(opts);
    const auto c = coefficients_for(cfg);
    const auto rows = sweep(cfg, c, cfg.horizons);
    std::filesystem::create_directories(cfg.output.dir);
    {
      CsvWriter out(cfg.output.dir / "sweep.csv", {"N", "nu2", "gap", "tail_norm", "defect_bound"});
      for (const auto& row : rows) out.row(row.N, row.nu2, row.gap, row.tail_norm, row.defect_bound);
    }
    CsvWriter timing(cfg.output.dir / "sweep_timing.csv", {"N", "runtime_seconds"});
    for (const auto& row : rows) timing.row(row.N, row.seconds);
    return ExitCode::ok;
  });
}

}  // namespace pcm
