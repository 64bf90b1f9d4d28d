#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pcminimax/leastfav.hpp"

using namespace pcm;

namespace {

Eigenpair converged_pair(CVector v, double value = 1.0) {
  Eigenpair e;
  e.vector = std::move(v);
  e.value = value;
  e.converged = true;
  return e;
}

MovingAverageModel model_from(std::vector<cplx> taps, double power) {
  MovingAverageModel m;
  m.order = taps.size() - 1;
  m.K = 1;
  m.M = 1;
  m.power = power;
  for (cplx t : taps) {
    CMatrix g(1, 1);
    g(0, 0) = t;
    m.g.push_back(g);
  }
  return m;
}

MovingAverageModel solved_model(const FourierBlockCoefficients& c, std::size_t N, double P) {
  const TopEigen top = solve_top_eigen(assemble_QN(c, N));
  return build_least_favorable(top.pair, P, N, c.K());
}

}  // namespace

TEST_CASE("single block with P = 4 gives g = 2") {
  const auto model = build_least_favorable(converged_pair({cplx{1.0}}), 4.0, 0, 1);
  CHECK(model.g.size() == 1);
  CHECK(model.g[0](0, 0) == cplx{2.0});
  CHECK(model.coefficient_power() == 4.0);
  CHECK(model.is_real());
}

TEST_CASE("a = (1, 1) gives taps in the golden ratio") {
  const auto model = solved_model(oracle::scalar_coefficients({1.0, 1.0}), 1, 1.0);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(model.g[0](0, 0) / model.g[1](0, 0) - phi) <= 1e-5);
  CHECK(std::abs(model.coefficient_power() - 1.0) <= 1e-14);
  CHECK(model.is_real());
}

TEST_CASE("power normalization and phase convention") {
  std::mt19937_64 rng(6);
  const auto c = oracle::random_coefficients(rng, 3, 5);
  const TopEigen top = solve_top_eigen(assemble_QN(c, 4));
  for (double P : {0.5, 1.0, 7.0}) {
    const auto model = build_least_favorable(top.pair, P, 4, 3);
    CHECK(std::abs(model.coefficient_power() - P) <= 1e-12 * P);
    // g = conj(v) up to one global phase and scale
    const double s = std::sqrt(P) / norm2(top.pair.vector);
    const cplx ratio = model.g[0](0, 0) / (std::conj(top.pair.vector[0]) * s);
    CHECK(std::abs(std::abs(ratio) - 1.0) <= 1e-12);
    for (std::size_t p = 0; p <= 4; ++p)
      for (std::size_t k = 1; k <= 3; ++k)
        CHECK(std::abs(model.g[p](k - 1, 0) - ratio * std::conj(top.pair.vector[flat_index(p, k, 3)]) * s) <= 1e-12);
  }
}

TEST_CASE("real coefficients give a real model") {
  std::mt19937_64 rng(71);
  const auto c = oracle::random_coefficients(rng, 2, 4, false);
  CHECK(c.is_real());
  const auto model = solved_model(c, 3, 2.0);
  CHECK(model.is_real());
}

TEST_CASE("invalid inputs") {
  Eigenpair bad = converged_pair({cplx{1.0}, cplx{0.0}});
  CHECK_THROWS_AS(build_least_favorable(bad, 1.0, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(build_least_favorable(bad, 0.0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(build_least_favorable(bad, -1.0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(build_least_favorable(converged_pair({cplx{0.0}}), 1.0, 0, 1), InvalidArgument);
  bad.converged = false;
  CHECK_THROWS_AS(build_least_favorable(bad, 1.0, 1, 1), InvalidArgument);
}

TEST_CASE("spectral density of white and MA(1) models") {
  const auto white = model_from({cplx{1.5}}, 2.25);
  for (const auto& smp : spectral_density(white, uniform_lambda_grid(16)))
    CHECK(std::abs(smp.f(0, 0) - cplx{2.25}) <= 1e-15);

  const auto ma = model_from({cplx{1.0}, cplx{0.5}}, 1.25);
  for (const auto& smp : spectral_density(ma, uniform_lambda_grid(64))) {
    const double expected = 1.25 + std::cos(smp.lambda);
    CHECK(std::abs(smp.f(0, 0).real() - expected) <= 1e-14);
    CHECK(std::abs(smp.f(0, 0).imag()) <= 1e-15);
  }
  const auto grid = uniform_lambda_grid(4);
  CHECK(grid[0] == -std::numbers::pi);
  CHECK(std::abs(grid[2]) <= 1e-15);
}

TEST_CASE("integrated trace of the spectral density equals P") {
  std::mt19937_64 rng(13);
  const auto c = oracle::random_coefficients(rng, 3, 6);
  const double P = 3.0;
  const auto model = solved_model(c, 5, P);
  const auto samples = spectral_density(model, uniform_lambda_grid(4096));
  double riemann = 0.0;
  for (const auto& smp : samples)
    for (std::size_t k = 0; k < 3; ++k) riemann += smp.f(k, k).real();
  riemann *= (2.0 * std::numbers::pi / 4096.0) / (2.0 * std::numbers::pi);
  CHECK(std::abs(riemann - P) <= 1e-6);

  const double exact_grid = trace_power(model, 2 * (model.order + 1));
  const double fine = trace_power(model, 4096);
  CHECK(std::abs(exact_grid - P) <= 1e-13 * P);
  CHECK(std::abs(fine - exact_grid) <= 1e-13 * P);
  CHECK_THROWS_AS(trace_power(model, 2 * model.order + 1), InvalidArgument);
}

TEST_CASE("factorization check passes and catches a corrupted entry") {
  std::mt19937_64 rng(19);
  const auto c = oracle::random_coefficients(rng, 2, 4);
  const auto model = solved_model(c, 3, 1.0);
  auto samples = spectral_density(model, uniform_lambda_grid(128));
  const FactorizationCheck ok = verify_factorization(samples);
  CHECK(ok.max_residual <= 1e-12);
  CHECK(ok.max_hermitian_defect <= 1e-15);
  CHECK(ok.psd);
  CHECK(ok.min_psd_margin >= -1e-12);

  samples[17].f(0, 1) += 1e-3;
  const FactorizationCheck bad = verify_factorization(samples);
  CHECK(bad.max_residual >= 0.9e-3);
  CHECK(bad.max_hermitian_defect >= 0.9e-3);
}

TEST_CASE("error functional at the least-favorable model equals P nu^2") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t K = 1 + rng() % 3;
    const std::size_t N = rng() % 6;
    const auto c = oracle::random_coefficients(rng, K, N + 1);
    const auto op = assemble_QN(c, N);
    const TopEigen top = solve_top_eigen(op);
    const double P = 0.5 + trial;
    const auto model = build_least_favorable(top.pair, P, N, K);
    const double value = error_functional_value(op, model);
    CHECK(std::abs(value - P * top.pair.value) <= 1e-10 * P * top.pair.value);
  }
}

TEST_CASE("error functional is invariant under a global phase") {
  std::mt19937_64 rng(29);
  const auto c = oracle::random_coefficients(rng, 2, 4);
  const auto op = assemble_QN(c, 3);
  auto model = solved_model(c, 3, 1.0);
  const double before = error_functional_value(op, model);
  const cplx rot = std::polar(1.0, std::numbers::pi / 3.0);
  for (auto& g : model.g)
    for (std::size_t p = 0; p < g.rows(); ++p) g(p, 0) *= rot;
  CHECK(std::abs(error_functional_value(op, model) - before) <= 1e-13 * before);
  CHECK_THROWS_AS(error_functional_value(assemble_QN(c, 2), model), InvalidArgument);
}

TEST_CASE("spectral CSV") {
  const auto ma = model_from({cplx{1.0}, cplx{0.5}}, 1.25);
  const auto path = std::filesystem::temp_directory_path() / "pcminimax_spectral.csv";
  write_spectral_csv(spectral_density(ma, uniform_lambda_grid(8)), path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda,k,n,real,imag");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
  std::filesystem::remove(path);
}
