#include "pcminimax/leastfav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcminimax/csv.hpp"

namespace pcm {

double MovingAverageModel::coefficient_power() const {
  double s = 0.0;
  for (const auto& m : g) s += std::pow(m.frobenius_norm(), 2);
  return s;
}

bool MovingAverageModel::is_real() const {
  for (const auto& m : g)
    for (const auto& z : m.data())
      if (z.imag() != 0.0) return false;
  return true;
}

MovingAverageModel build_least_favorable(const Eigenpair& e, double power, std::size_t order, std::size_t K) {
  if (!e.converged) throw InvalidArgument("build_least_favorable: eigenpair did not converge");
  if (!(power > 0.0) || !std::isfinite(power)) throw InvalidArgument("build_least_favorable: P must be positive");
  if (K == 0 || e.vector.size() != (order + 1) * K)
    throw InvalidArgument("build_least_favorable: eigenvector length " + std::to_string(e.vector.size()) +
                          " does not match (order + 1) * K = " + std::to_string((order + 1) * K));
  const double n = norm2(e.vector);
  if (!(n > 0.0)) throw InvalidArgument("build_least_favorable: zero eigenvector");

  MovingAverageModel model;
  model.order = order;
  model.K = K;
  model.M = 1;
  model.power = power;
  // fix the global phase: largest component real and positive
  std::size_t big = 0;
  for (std::size_t i = 1; i < e.vector.size(); ++i)
    if (std::abs(e.vector[i]) > std::abs(e.vector[big])) big = i;
  const cplx phase = std::conj(e.vector[big]) / std::abs(e.vector[big]);
  const double scale = std::sqrt(power) / n;
  model.g.assign(order + 1, CMatrix(K, 1));
  for (std::size_t p = 0; p <= order; ++p)
    for (std::size_t k = 1; k <= K; ++k) {
      model.g[p](k - 1, 0) = std::conj(phase * e.vector[flat_index(p, k, K)]) * scale;
    }
  return model;
}

std::vector<double> uniform_lambda_grid(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  return out;
}

std::vector<SpectralDensitySample> spectral_density(const MovingAverageModel& model,
                                                    std::span<const double> lambdas) {
  std::vector<SpectralDensitySample> out;
  out.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    SpectralDensitySample smp;
    smp.lambda = lambda;
    smp.G = CMatrix(model.K, model.M);
    for (std::size_t s = 0; s <= model.order; ++s) {
      const cplx phase = std::polar(1.0, -static_cast<double>(s) * lambda);
      for (std::size_t k = 0; k < model.K; ++k)
        for (std::size_t m = 0; m < model.M; ++m) smp.G(k, m) += model.g[s](k, m) * phase;
    }
    smp.f = smp.G * smp.G.adjoint();
    out.push_back(std::move(smp));
  }
  return out;
}

FactorizationCheck verify_factorization(std::span<const SpectralDensitySample> samples) {
  FactorizationCheck chk;
  chk.min_psd_margin = std::numeric_limits<double>::infinity();
  for (const auto& smp : samples) {
    const CMatrix ggh = smp.G * smp.G.adjoint();
    const std::size_t K = smp.f.rows();
    double res = 0.0;
    double herm = 0.0;
    double trace = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      trace += smp.f(i, i).real();
      for (std::size_t j = 0; j < K; ++j) {
        res += std::norm(smp.f(i, j) - ggh(i, j));
        herm = std::max(herm, std::abs(smp.f(i, j) - std::conj(smp.f(j, i))));
      }
    }
    chk.max_residual = std::max(chk.max_residual, std::sqrt(res));
    chk.max_hermitian_defect = std::max(chk.max_hermitian_defect, herm);

    const auto spectrum = hermitian_eigen(smp.f);
    const double lmin = spectrum.back().value;
    const double margin = trace > 0.0 ? lmin / trace : lmin;
    chk.min_psd_margin = std::min(chk.min_psd_margin, margin);
    if (lmin < -1e-10 * std::max(trace, 0.0)) chk.psd = false;
  }
  if (samples.empty()) chk.min_psd_margin = 0.0;
  return chk;
}

double trace_power(const MovingAverageModel& model, std::size_t grid_size) {
  if (grid_size < 2 * (model.order + 1))
    throw InvalidArgument("trace_power: grid_size " + std::to_string(grid_size) + " below 2 (order + 1) = " +
                          std::to_string(2 * (model.order + 1)));
  const auto lambdas = uniform_lambda_grid(grid_size);
  const auto samples = spectral_density(model, lambdas);
  double acc = 0.0;
  for (const auto& smp : samples)
    for (std::size_t k = 0; k < model.K; ++k) acc += smp.f(k, k).real();
  return acc / static_cast<double>(grid_size);
}

double error_functional_value(const BlockOperator& q, const MovingAverageModel& model) {
  if (q.horizon_blocks() != model.order + 1 || q.K() != model.K)
    throw InvalidArgument("error_functional_value: operator and model shapes differ");
  cplx acc = 0.0;
  for (std::size_t k = 1; k <= model.K; ++k)
    for (std::size_t n = 1; n <= model.K; ++n)
      for (std::size_t m = 0; m < model.M; ++m)
        for (std::size_t p = 0; p <= model.order; ++p)
          for (std::size_t qq = 0; qq <= model.order; ++qq)
            acc += model.g[p](k - 1, m) * std::conj(model.g[qq](n - 1, m)) * q.entry(p, k, qq, n);
  return acc.real();
}

void write_spectral_csv(std::span<const SpectralDensitySample> samples, const std::filesystem::path& path) {
  CsvWriter out(path, {"lambda", "k", "n", "real", "imag"});
  for (const auto& smp : samples)
    for (std::size_t k = 0; k < smp.f.rows(); ++k)
      for (std::size_t n = 0; n < smp.f.cols(); ++n)
        out.row(smp.lambda, k + 1, n + 1, smp.f(k, n).real(), smp.f(k, n).imag());
}

}  // namespace pcm
