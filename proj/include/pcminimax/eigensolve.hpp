#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pcminimax/operator.hpp"
#include "pcminimax/types.hpp"

namespace pcm {

struct Eigenpair {
  double value = 0.0;
  CVector vector;
  double residual = 0.0;  // ||Q v - value v||
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> rayleigh_trace;  // one Rayleigh quotient per iteration
  std::vector<double> residual_trace;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iter = 0;  // 0 means 100 * dimension
  std::uint64_t seed = 1;
  bool real_start = false;  // real start vector; set automatically for real operators
};

using LinearMap = std::function<CVector(std::span<const cplx>)>;

/// Power iteration on a Hermitian PSD map. Stops once successive Rayleigh
/// quotients differ by at most tol * max(1, rho) and the residual is at most
/// sqrt(tol) * rho. Returns the last iterate with converged = false when
/// max_iter runs out; a zero map yields value 0 immediately.
Eigenpair power_iteration(const LinearMap& apply, std::size_t dim, const PowerIterationOptions& opts = {});
Eigenpair power_iteration(const BlockOperator& op, const PowerIterationOptions& opts = {});

/// Full spectrum of a Hermitian matrix (dense self-adjoint solver), sorted by
/// descending eigenvalue.
std::vector<Eigenpair> hermitian_eigen(const CMatrix& m);

constexpr std::size_t kDefaultOracleCap = 512;

/// hermitian_eigen on the operator's explicit matrix; rejects dimensions
/// above cap.
std::vector<Eigenpair> dense_hermitian_eigen(const BlockOperator& op, std::size_t cap = kDefaultOracleCap);

/// lambda_1 - lambda_2 of a descending spectrum; 0 for a single eigenvalue.
double top_eigen_gap(const std::vector<Eigenpair>& spectrum);

/// Top eigenpair with the oracle cross-check and degeneracy handling applied.
struct TopEigen {
  Eigenpair pair;
  double gap = 0.0;
  bool gap_known = false;
  bool degenerate = false;  // gap < 1e-8 * lambda_1
  bool oracle_used = false;
  double oracle_value = 0.0;
  double power_value = 0.0;
  bool power_converged = false;
  std::string method;
};

TopEigen solve_top_eigen(const BlockOperator& op, const PowerIterationOptions& opts = {},
                         std::size_t oracle_cap = kDefaultOracleCap);

/// iter,rayleigh,residual
void write_trace_csv(const Eigenpair& e, const std::filesystem::path& path);

}  // namespace pcm
