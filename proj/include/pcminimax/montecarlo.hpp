#pragma once

// Simulation of the least-favorable moving average, its optimal estimate from
// past innovations, and Monte Carlo checks of the minimax error.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcminimax/blocking.hpp"
#include "pcminimax/leastfav.hpp"
#include "pcminimax/types.hpp"

namespace pcm {

enum class NoiseLaw { complex_gaussian, real_gaussian };

/// Unit-variance innovations eps_m(s) for s in [s_min, s_max], m = 0..M-1.
/// The value at (seed, stream, s, m) does not depend on the requested range.
struct InnovationStream {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  std::int64_t s_min = 0;
  std::int64_t s_max = -1;
  std::size_t M = 1;
  NoiseLaw law = NoiseLaw::complex_gaussian;
  std::vector<cplx> values;  // (s - s_min) * M + m

  bool covers(std::int64_t lo, std::int64_t hi) const { return lo >= s_min && hi <= s_max; }
  std::span<const cplx> at(std::int64_t s) const;

  /// Stream with caller-chosen values, e.g. impulses.
  static InnovationStream from_values(std::int64_t s_min, std::size_t M, std::vector<cplx> values);
};

InnovationStream simulate_innovations(std::uint64_t seed, std::int64_t s_min, std::int64_t s_max, std::size_t M,
                                      std::uint32_t stream = 0, NoiseLaw law = NoiseLaw::complex_gaussian);

/// K-vectors zeta_j for j in [j_min, j_max].
struct SequenceRealization {
  std::int64_t j_min = 0;
  std::int64_t j_max = -1;
  std::size_t K = 1;
  std::vector<cplx> zeta;  // (j - j_min) * K + (k - 1)

  std::span<const cplx> at(std::int64_t j) const;
  std::span<cplx> at(std::int64_t j);
};

/// zeta_j = sum_{s=j-order}^{j} g(j - s) eps(s).
SequenceRealization realize_sequence(const MovingAverageModel& model, const InnovationStream& noise,
                                     std::int64_t j_min, std::int64_t j_max);

/// Same convolution restricted to innovations with s <= -1.
SequenceRealization optimal_estimate(const MovingAverageModel& model, const InnovationStream& noise,
                                     std::int64_t j_min, std::int64_t j_max);

/// sum_{j=0}^{N} sum_k a_{kj} zeta_{kj}.
cplx functional_value(const FourierBlockCoefficients& c, const SequenceRealization& r, std::size_t N);

/// Exact error variance of the optimal estimate, summed over the innovations
/// that the estimate cannot see: sum_{s=0}^{N} sum_m |sum_{p,k} a_{k,p+s} g_km(p)|^2.
double population_mse(const MovingAverageModel& model, const FourierBlockCoefficients& c, std::size_t N);

/// Real Gaussian innovations when both model and coefficients are real.
NoiseLaw default_noise_law(const MovingAverageModel& model, const FourierBlockCoefficients& c);

struct MonteCarloOptions {
  std::size_t replicates = 100000;
  std::uint64_t seed = 7;
  unsigned threads = 1;
};

struct MonteCarloReport {
  std::size_t replicates = 0;
  double mse = 0.0;
  double stderr_mse = 0.0;
  double target = 0.0;
  double z_score = 0.0;
  std::uint64_t seed = 0;
};

/// Replicate r draws its own innovation stream (stream id r), forms
/// A_N zeta - A_N zeta_hat, and the squared errors are averaged in
/// replicate order, so the report does not depend on the thread count.
MonteCarloReport mc_mse(const MovingAverageModel& model, const FourierBlockCoefficients& c, std::size_t N,
                        double target, const MonteCarloOptions& opts = {});

/// max over a uniform lambda grid of ||sum_{j=0}^{N} a_j e^{i j lambda}||^2.
double upper_bound_grid(const FourierBlockCoefficients& c, std::size_t N, std::size_t grid_size);

/// zeta(u + jT) on a uniform u-grid of u_grid points per block.
struct PcPath {
  double period = 1.0;
  std::size_t u_grid = 1;
  std::int64_t j_min = 0;
  std::vector<cplx> samples;

  double time(std::size_t i) const;
};

PcPath synthesize_pc_path(const SequenceRealization& r, double period, std::size_t u_grid);
PcPath synthesize_pc_path(const MovingAverageModel& model, double period, std::int64_t j_min, std::int64_t j_max,
                          std::size_t u_grid, const InnovationStream& noise);

/// count independent paths; path i uses innovation stream i.
std::vector<PcPath> synthesize_pc_ensemble(const MovingAverageModel& model, double period, std::int64_t j_min,
                                           std::int64_t j_max, std::size_t u_grid, std::size_t count,
                                           std::uint64_t seed, NoiseLaw law, unsigned threads = 1);

struct PcCovariance {
  std::size_t points = 0;
  std::size_t shift = 0;     // one period in grid steps
  std::size_t ensemble = 0;
  CMatrix cov;               // cov(a, b) = mean zeta(t_a) conj(zeta(t_b))
  double max_defect = 0.0;   // max |cov(a, b) - cov(a + shift, b + shift)|
  double max_defect_z = 0.0; // largest defect in units of its standard error
};

constexpr std::size_t kMinEnsemble = 1000;

PcCovariance empirical_pc_covariance(std::span<const PcPath> paths);

/// t,real,imag
void write_path_csv(const PcPath& path, const std::filesystem::path& file);

}  // namespace pcm
