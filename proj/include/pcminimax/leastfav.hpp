#pragma once

#include <filesystem>
#include <vector>

#include "pcminimax/eigensolve.hpp"
#include "pcminimax/operator.hpp"
#include "pcminimax/types.hpp"

namespace pcm {

/// One-sided moving average zeta_j = sum_{p=0}^{order} g(p) eps(j - p) with
/// K x M coefficient matrices g(p), normalized to sum_p ||g(p)||_F^2 = P.
struct MovingAverageModel {
  std::size_t order = 0;
  std::size_t K = 1;
  std::size_t M = 1;
  std::vector<CMatrix> g;
  double power = 1.0;

  double coefficient_power() const;
  bool is_real() const;
};

/// g(p)_{k,1} = sqrt(P) * conj(v_{(p,k)}) / ||v||, with the phase of v fixed
/// so that its largest component is real and positive. The single innovation
/// channel (M = 1) carries the whole power budget.
MovingAverageModel build_least_favorable(const Eigenpair& e, double power, std::size_t order, std::size_t K);

struct SpectralDensitySample {
  double lambda = 0.0;
  CMatrix G;  // K x M transfer matrix sum_s g(s) e^{-i s lambda}
  CMatrix f;  // G G*
};

std::vector<SpectralDensitySample> spectral_density(const MovingAverageModel& model,
                                                    std::span<const double> lambdas);

/// lambda_i = -pi + 2 pi i / n, i = 0..n-1.
std::vector<double> uniform_lambda_grid(std::size_t n);

struct FactorizationCheck {
  double max_residual = 0.0;     // max_lambda ||f - G G*||_F
  double min_psd_margin = 0.0;   // min_lambda lambda_min(f) / Tr f
  double max_hermitian_defect = 0.0;
  bool psd = true;               // lambda_min(f) >= -1e-10 Tr f everywhere
};

FactorizationCheck verify_factorization(std::span<const SpectralDensitySample> samples);

/// (1/2pi) int Tr f(lambda) d lambda on a uniform grid; exact for the
/// trigonometric polynomial Tr f when grid_size >= 2 (order + 1).
double trace_power(const MovingAverageModel& model, std::size_t grid_size);

/// sum_{k,n,m,p,q} g_km(p) conj(g_nm(q)) Q_kn(p,q) evaluated entry by entry.
double error_functional_value(const BlockOperator& q, const MovingAverageModel& model);

/// lambda,k,n,real,imag with 1-based k, n.
void write_spectral_csv(std::span<const SpectralDensitySample> samples, const std::filesystem::path& path);

}  // namespace pcm
