#include "pcminimax/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "pcminimax/csv.hpp"
#include "pcminimax/rng.hpp"

namespace pcm {

namespace {

// Runs fn(i) for i in [0, count) over contiguous chunks; each index is
// handled by exactly one thread, so results written per index are
// independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::size_t span_length(std::int64_t lo, std::int64_t hi) {
  return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1);
}

// Convolution over innovations s in [max(j - order, s_lo), min(j, s_hi)].
SequenceRealization convolve(const MovingAverageModel& model, const InnovationStream& noise, std::int64_t j_min,
                             std::int64_t j_max, std::int64_t s_hi_cap) {
  if (j_max < j_min) throw InvalidArgument("sequence range is empty");
  if (noise.M != model.M) throw InvalidArgument("innovation multiplicity does not match the model");
  const auto order = static_cast<std::int64_t>(model.order);
  const std::int64_t need_lo = j_min - order;
  const std::int64_t need_hi = std::min(j_max, s_hi_cap);
  if (need_lo <= need_hi && !noise.covers(need_lo, need_hi))
    throw InvalidArgument("innovation stream [" + std::to_string(noise.s_min) + ", " + std::to_string(noise.s_max) +
                          "] does not cover [" + std::to_string(need_lo) + ", " + std::to_string(need_hi) + "]");

  SequenceRealization r;
  r.j_min = j_min;
  r.j_max = j_max;
  r.K = model.K;
  r.zeta.assign(span_length(j_min, j_max) * model.K, cplx{});
  for (std::int64_t j = j_min; j <= j_max; ++j) {
    auto out = r.at(j);
    const std::int64_t s_hi = std::min(j, s_hi_cap);
    for (std::int64_t s = j - order; s <= s_hi; ++s) {
      const CMatrix& g = model.g[static_cast<std::size_t>(j - s)];
      const auto eps = noise.at(s);
      for (std::size_t k = 0; k < model.K; ++k) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < model.M; ++m) acc += g(k, m) * eps[m];
        out[k] += acc;
      }
    }
  }
  return r;
}

}  // namespace

std::span<const cplx> InnovationStream::at(std::int64_t s) const {
  if (s < s_min || s > s_max) throw InvalidArgument("innovation index " + std::to_string(s) + " out of range");
  return {values.data() + static_cast<std::size_t>(s - s_min) * M, M};
}

InnovationStream InnovationStream::from_values(std::int64_t s_min, std::size_t M, std::vector<cplx> values) {
  if (M == 0 || values.size() % M != 0) throw InvalidArgument("innovation values must fill whole M-vectors");
  InnovationStream st;
  st.s_min = s_min;
  st.s_max = s_min + static_cast<std::int64_t>(values.size() / M) - 1;
  st.M = M;
  st.values = std::move(values);
  return st;
}

InnovationStream simulate_innovations(std::uint64_t seed, std::int64_t s_min, std::int64_t s_max, std::size_t M,
                                      std::uint32_t stream, NoiseLaw law) {
  if (s_min > s_max) throw InvalidArgument("simulate_innovations: s_min > s_max");
  if (M == 0) throw InvalidArgument("simulate_innovations: M must be positive");
  InnovationStream st;
  st.seed = seed;
  st.stream = stream;
  st.s_min = s_min;
  st.s_max = s_max;
  st.M = M;
  st.law = law;
  st.values.resize(span_length(s_min, s_max) * M);
  std::size_t i = 0;
  for (std::int64_t s = s_min; s <= s_max; ++s)
    for (std::size_t m = 0; m < M; ++m) {
      const DrawIndex at{s, static_cast<std::uint32_t>(m), stream};
      st.values[i++] = law == NoiseLaw::complex_gaussian ? complex_gaussian(seed, at) : cplx{real_gaussian(seed, at)};
    }
  return st;
}

std::span<const cplx> SequenceRealization::at(std::int64_t j) const {
  if (j < j_min || j > j_max) throw InvalidArgument("block index " + std::to_string(j) + " out of range");
  return {zeta.data() + static_cast<std::size_t>(j - j_min) * K, K};
}

std::span<cplx> SequenceRealization::at(std::int64_t j) {
  if (j < j_min || j > j_max) throw InvalidArgument("block index " + std::to_string(j) + " out of range");
  return {zeta.data() + static_cast<std::size_t>(j - j_min) * K, K};
}

SequenceRealization realize_sequence(const MovingAverageModel& model, const InnovationStream& noise,
                                     std::int64_t j_min, std::int64_t j_max) {
  return convolve(model, noise, j_min, j_max, std::numeric_limits<std::int64_t>::max());
}

SequenceRealization optimal_estimate(const MovingAverageModel& model, const InnovationStream& noise,
                                     std::int64_t j_min, std::int64_t j_max) {
  return convolve(model, noise, j_min, j_max, -1);
}

cplx functional_value(const FourierBlockCoefficients& c, const SequenceRealization& r, std::size_t N) {
  const auto last = static_cast<std::int64_t>(N);
  if (r.j_min > 0 || r.j_max < last) throw InvalidArgument("functional_value: realization does not cover 0..N");
  if (N + 1 > c.J()) throw InvalidArgument("functional_value: N exceeds available coefficient blocks");
  if (r.K != c.K()) throw InvalidArgument("functional_value: K mismatch");
  cplx acc = 0.0;
  for (std::size_t j = 0; j <= N; ++j) {
    const auto z = r.at(static_cast<std::int64_t>(j));
    for (std::size_t k = 1; k <= c.K(); ++k) acc += c.at(k, j) * z[k - 1];
  }
  return acc;
}

double population_mse(const MovingAverageModel& model, const FourierBlockCoefficients& c, std::size_t N) {
  if (N + 1 > c.J() || model.K != c.K()) throw InvalidArgument("population_mse: shape mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s <= N; ++s)
    for (std::size_t m = 0; m < model.M; ++m) {
      cplx acc = 0.0;
      for (std::size_t p = 0; p <= model.order && p + s <= N; ++p)
        for (std::size_t k = 1; k <= c.K(); ++k) acc += c.at(k, p + s) * model.g[p](k - 1, m);
      total += std::norm(acc);
    }
  return total;
}

NoiseLaw default_noise_law(const MovingAverageModel& model, const FourierBlockCoefficients& c) {
  return model.is_real() && c.is_real() ? NoiseLaw::real_gaussian : NoiseLaw::complex_gaussian;
}

MonteCarloReport mc_mse(const MovingAverageModel& model, const FourierBlockCoefficients& c, std::size_t N,
                        double target, const MonteCarloOptions& opts) {
  if (opts.replicates == 0) throw InvalidArgument("mc_mse: replicates must be positive");
  if (N + 1 > c.J() || model.K != c.K()) throw InvalidArgument("mc_mse: shape mismatch");
  const NoiseLaw law = default_noise_law(model, c);
  const auto last = static_cast<std::int64_t>(N);
  const std::int64_t s_lo = -static_cast<std::int64_t>(model.order);

  std::vector<double> sq(opts.replicates);
  parallel_for(opts.replicates, opts.threads, [&](std::size_t r) {
    const auto noise = simulate_innovations(opts.seed, s_lo, last, model.M, static_cast<std::uint32_t>(r), law);
    const auto zeta = realize_sequence(model, noise, 0, last);
    const auto zeta_hat = optimal_estimate(model, noise, 0, last);
    sq[r] = std::norm(functional_value(c, zeta, N) - functional_value(c, zeta_hat, N));
  });

  MonteCarloReport rep;
  rep.replicates = opts.replicates;
  rep.seed = opts.seed;
  rep.target = target;
  double sum = 0.0;
  for (double x : sq) sum += x;
  rep.mse = sum / static_cast<double>(sq.size());
  double ss = 0.0;
  for (double x : sq) ss += (x - rep.mse) * (x - rep.mse);
  const double var = sq.size() > 1 ? ss / static_cast<double>(sq.size() - 1) : 0.0;
  rep.stderr_mse = std::sqrt(var / static_cast<double>(sq.size()));
  const double diff = rep.mse - target;
  if (rep.stderr_mse > 0.0)
    rep.z_score = diff / rep.stderr_mse;
  else
    rep.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return rep;
}

double upper_bound_grid(const FourierBlockCoefficients& c, std::size_t N, std::size_t grid_size) {
  if (grid_size < 2 * (N + 1)) throw InvalidArgument("upper_bound_grid: grid_size below 2 (N + 1)");
  if (N + 1 > c.J()) throw InvalidArgument("upper_bound_grid: N exceeds available coefficient blocks");
  double best = 0.0;
  for (const double lambda : uniform_lambda_grid(grid_size)) {
    double norm_sq = 0.0;
    for (std::size_t k = 1; k <= c.K(); ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j <= N; ++j) acc += c.at(k, j) * std::polar(1.0, static_cast<double>(j) * lambda);
      norm_sq += std::norm(acc);
    }
    best = std::max(best, norm_sq);
  }
  return best;
}

double PcPath::time(std::size_t i) const {
  return (static_cast<double>(j_min) + static_cast<double>(i) / static_cast<double>(u_grid)) * period;
}

PcPath synthesize_pc_path(const SequenceRealization& r, double period, std::size_t u_grid) {
  if (!(period > 0.0)) throw InvalidArgument("synthesize_pc_path: period must be positive");
  if (u_grid < 2 * r.K) throw InvalidArgument("synthesize_pc_path: u_grid must be at least 2K");
  PcPath path;
  path.period = period;
  path.u_grid = u_grid;
  path.j_min = r.j_min;
  path.samples.resize(span_length(r.j_min, r.j_max) * u_grid);

  // basis values e_k(u_i) = T^{-1/2} exp(2 pi i m(k) i / u_grid)
  const double scale = 1.0 / std::sqrt(period);
  CMatrix basis(u_grid, r.K);
  for (std::size_t i = 0; i < u_grid; ++i)
    for (std::size_t k = 1; k <= r.K; ++k) {
      const auto n = static_cast<long>(u_grid);
      const long idx = (basis_frequency(k) * static_cast<long>(i)) % n;
      basis(i, k - 1) =
          std::polar(scale, 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(u_grid));
    }

  std::size_t out = 0;
  for (std::int64_t j = r.j_min; j <= r.j_max; ++j) {
    const auto z = r.at(j);
    for (std::size_t i = 0; i < u_grid; ++i) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < r.K; ++k) acc += z[k] * basis(i, k);
      path.samples[out++] = acc;
    }
  }
  return path;
}

PcPath synthesize_pc_path(const MovingAverageModel& model, double period, std::int64_t j_min, std::int64_t j_max,
                          std::size_t u_grid, const InnovationStream& noise) {
  return synthesize_pc_path(realize_sequence(model, noise, j_min, j_max), period, u_grid);
}

std::vector<PcPath> synthesize_pc_ensemble(const MovingAverageModel& model, double period, std::int64_t j_min,
                                           std::int64_t j_max, std::size_t u_grid, std::size_t count,
                                           std::uint64_t seed, NoiseLaw law, unsigned threads) {
  std::vector<PcPath> paths(count);
  const std::int64_t s_lo = j_min - static_cast<std::int64_t>(model.order);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto noise = simulate_innovations(seed, s_lo, j_max, model.M, static_cast<std::uint32_t>(i), law);
    paths[i] = synthesize_pc_path(model, period, j_min, j_max, u_grid, noise);
  });
  return paths;
}

PcCovariance empirical_pc_covariance(std::span<const PcPath> paths) {
  if (paths.size() < kMinEnsemble)
    throw InvalidArgument("empirical_pc_covariance: degenerate ensemble of " + std::to_string(paths.size()) +
                          " paths (need at least " + std::to_string(kMinEnsemble) + ")");
  const std::size_t n = paths.front().samples.size();
  const std::size_t shift = paths.front().u_grid;
  for (const auto& p : paths)
    if (p.samples.size() != n || p.u_grid != shift)
      throw InvalidArgument("empirical_pc_covariance: degenerate ensemble (paths differ in shape)");
  if (n < 2 * shift) throw InvalidArgument("empirical_pc_covariance: paths must span at least two periods");

  PcCovariance out;
  out.points = n;
  out.shift = shift;
  out.ensemble = paths.size();
  out.cov = CMatrix(n, n);
  const double count = static_cast<double>(paths.size());
  for (const auto& p : paths)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) out.cov(a, b) += p.samples[a] * std::conj(p.samples[b]);
  for (std::size_t a = 0; a < n; ++a)
    for (auto& z : out.cov.row(a)) z /= count;

  for (std::size_t a = 0; a + shift < n; ++a)
    for (std::size_t b = 0; b + shift < n; ++b) {
      const cplx mean = out.cov(a, b) - out.cov(a + shift, b + shift);
      double var_re = 0.0;
      double var_im = 0.0;
      for (const auto& p : paths) {
        const cplx d = p.samples[a] * std::conj(p.samples[b]) -
                       p.samples[a + shift] * std::conj(p.samples[b + shift]) - mean;
        var_re += d.real() * d.real();
        var_im += d.imag() * d.imag();
      }
      const double se = std::sqrt((var_re + var_im) / (count - 1.0) / count);
      const double defect = std::abs(mean);
      out.max_defect = std::max(out.max_defect, defect);
      const double z = se > 0.0 ? defect / se : (defect == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      out.max_defect_z = std::max(out.max_defect_z, z);
    }
  return out;
}

void write_path_csv(const PcPath& path, const std::filesystem::path& file) {
  CsvWriter out(file, {"t", "real", "imag"});
  for (std::size_t i = 0; i < path.samples.size(); ++i)
    out.row(path.time(i), path.samples[i].real(), path.samples[i].imag());
}

}  // namespace pcm
