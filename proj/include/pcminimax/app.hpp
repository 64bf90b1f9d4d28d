#pragma once

// Solve / verify / sweep pipelines behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcminimax/config.hpp"
#include "pcminimax/leastfav.hpp"

namespace pcm {

enum class ExitCode : int { ok = 0, verification_failed = 1, invalid_config = 2, numerical_failure = 3 };

/// Env var that replaces the Monte Carlo seed of any config.
inline constexpr const char* kSeedEnvVar = "PCMINIMAX_SEED";

struct SolveResult {
  std::size_t N = 0;
  BlockOperator op;
  TopEigen top;
  MovingAverageModel model;
  AdmissibilityReport admissibility;
  double nu2 = 0.0;
  double value = 0.0;  // P * nu2
  double trace_power = 0.0;
  FactorizationCheck factorization;
  double upper_bound = 0.0;
  std::vector<std::string> warnings;
};

FourierBlockCoefficients coefficients_for(const ExperimentConfig& cfg);

/// Throws NumericalError when power iteration fails and no dense fallback is
/// available.
SolveResult solve(const ExperimentConfig& cfg, const FourierBlockCoefficients& c, std::size_t N);

nlohmann::ordered_json solve_report(const ExperimentConfig& cfg, const SolveResult& r);

/// sqrt(sum_{j>N} (j+1) ||a_j||^2) over retained blocks plus the tail-model
/// estimate past J. Bounds ||A - A_N|| in Hilbert-Schmidt norm.
double horizon_tail_norm(const FourierBlockCoefficients& c, std::size_t N, const TailModel& tail);

struct SweepRow {
  std::size_t N = 0;
  double nu2 = 0.0;
  double gap = 0.0;
  double tail_norm = 0.0;
  double defect_bound = 0.0;  // tail (2 nu_N + tail) >= nu^2 - nu_N^2
  double seconds = 0.0;
};

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const FourierBlockCoefficients& c,
                            const std::vector<std::size_t>& horizons);

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  unsigned threads = 1;
  double target_offset = 0.0;  // test hook: shifts the Monte Carlo target
  std::ostream* log = nullptr;  // defaults to std::cerr
};

int run_solve(const RunOptions& opts);
int run_verify(const RunOptions& opts);
int run_sweep(const RunOptions& opts);

}  // namespace pcm
