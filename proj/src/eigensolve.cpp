#include "pcminimax/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "pcminimax/csv.hpp"
#include "pcminimax/rng.hpp"

namespace pcm {

namespace {

constexpr std::uint32_t kStartVectorStream = 0xE16E0000u;

CVector start_vector(std::size_t dim, std::uint64_t seed, bool real) {
  CVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const DrawIndex at{static_cast<std::int64_t>(i), 0, kStartVectorStream};
    v[i] = real ? cplx{real_gaussian(seed, at)} : complex_gaussian(seed, at);
  }
  const double n = norm2(v);
  for (auto& z : v) z /= n;
  return v;
}

bool finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double residual_norm(std::span<const cplx> qv, std::span<const cplx> v, double rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(qv[i] - rho * v[i]);
  return std::sqrt(s);
}

}  // namespace

Eigenpair power_iteration(const LinearMap& apply, std::size_t dim, const PowerIterationOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("power_iteration: tol must be positive");
  if (dim == 0) throw InvalidArgument("power_iteration: empty operator");
  const std::size_t max_iter = opts.max_iter ? opts.max_iter : 100 * dim;
  const double sqrt_tol = std::sqrt(opts.tol);

  Eigenpair e;
  CVector v = start_vector(dim, opts.seed, opts.real_start);
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const CVector w = apply(v);
    if (w.size() != dim) throw InvalidArgument("power_iteration: map changed dimension");
    if (!finite(w)) throw NumericalError("power_iteration: NaN or Inf in matvec");
    const double wn = norm2(w);
    const double rho = dot(v, w).real();
    const double res = residual_norm(w, v, rho);
    e.rayleigh_trace.push_back(rho);
    e.residual_trace.push_back(res);
    e.iterations = it;
    e.value = rho;
    e.vector = v;
    e.residual = res;

    if (wn == 0.0) {
      e.value = 0.0;
      e.residual = 0.0;
      e.converged = true;
      return e;
    }
    const bool eigvec = res <= opts.tol * std::max(1.0, rho);
    const bool stalled = it > 1 && std::abs(rho - prev) <= opts.tol * std::max(1.0, rho);
    if (eigvec || (stalled && res <= sqrt_tol * rho)) {
      e.converged = true;
      return e;
    }
    prev = rho;
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / wn;
  }
  e.converged = false;
  return e;
}

Eigenpair power_iteration(const BlockOperator& op, const PowerIterationOptions& opts) {
  PowerIterationOptions o = opts;
  o.real_start = o.real_start || op.is_real();
  return power_iteration([&op](std::span<const cplx> v) { return matvec(op, v); }, op.dim(), o);
}

std::vector<Eigenpair> hermitian_eigen(const CMatrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw InvalidArgument("hermitian_eigen: matrix must be square");
  if (n == 0) return {};
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd a(dim, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigen: eigensolver did not converge");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  // solver order is ascending; reverse it, keeping ties in solver order
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return values(static_cast<Eigen::Index>(x)) > values(static_cast<Eigen::Index>(y));
  });

  std::vector<Eigenpair> out;
  out.reserve(n);
  for (std::size_t idx : order) {
    const auto col = static_cast<Eigen::Index>(idx);
    Eigenpair e;
    e.value = values(col);
    e.vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.vector[i] = vectors(static_cast<Eigen::Index>(i), col);
    const CVector mv = m.multiply(e.vector);
    e.residual = residual_norm(mv, e.vector, e.value);
    e.converged = true;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Eigenpair> dense_hermitian_eigen(const BlockOperator& op, std::size_t cap) {
  if (op.dim() > cap)
    throw InvalidArgument("dense_hermitian_eigen: dimension " + std::to_string(op.dim()) + " above oracle cap " +
                          std::to_string(cap));
  if (op.has_explicit()) return hermitian_eigen(op.explicit_matrix());
  BlockOperator copy = op;
  copy.materialize();
  return hermitian_eigen(copy.explicit_matrix());
}

double top_eigen_gap(const std::vector<Eigenpair>& spectrum) {
  if (spectrum.empty()) throw InvalidArgument("top_eigen_gap: empty spectrum");
  if (spectrum.size() == 1) return 0.0;
  return spectrum[0].value - spectrum[1].value;
}

TopEigen solve_top_eigen(const BlockOperator& op, const PowerIterationOptions& opts, std::size_t oracle_cap) {
  TopEigen out;
  Eigenpair power = power_iteration(op, opts);
  out.power_value = power.value;
  out.power_converged = power.converged;
  out.pair = power;
  out.method = "power-iteration";

  if (op.dim() <= oracle_cap) {
    const auto spectrum = dense_hermitian_eigen(op, oracle_cap);
    out.oracle_value = spectrum[0].value;
    out.gap = top_eigen_gap(spectrum);
    out.gap_known = true;
    out.degenerate = out.gap < 1e-8 * spectrum[0].value || spectrum[0].value == 0.0;
    if (out.degenerate) {
      out.pair = spectrum[0];
      out.oracle_used = true;
      out.method = "dense-oracle (degenerate top eigenvalue)";
    } else if (!power.converged) {
      out.pair = spectrum[0];
      out.oracle_used = true;
      out.method = "dense-oracle (power iteration did not converge)";
    }
    // keep the power-iteration trace for diagnostics
    if (out.oracle_used) {
      out.pair.rayleigh_trace = power.rayleigh_trace;
      out.pair.residual_trace = power.residual_trace;
    }
  }
  return out;
}

void write_trace_csv(const Eigenpair& e, const std::filesystem::path& path) {
  CsvWriter out(path, {"iter", "rayleigh", "residual"});
  for (std::size_t i = 0; i < e.rayleigh_trace.size(); ++i)
    out.row(i + 1, e.rayleigh_trace[i], e.residual_trace[i]);
}

}  // namespace pcm
