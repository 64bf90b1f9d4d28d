#include "pcminimax/operator.hpp"

#include <algorithm>
#include <cmath>

#include "pcminimax/csv.hpp"

namespace pcm {

BlockOperator BlockOperator::build(const FourierBlockCoefficients& c, std::size_t rows, std::size_t cols,
                                   Representation rep) {
  if (cols > c.J())
    throw InvalidArgument("operator needs " + std::to_string(cols) + " coefficient blocks, only " +
                          std::to_string(c.J()) + " available");
  BlockOperator op;
  op.rows_ = rows;
  op.cols_ = cols;
  op.K_ = c.K();
  op.coeffs_ = c;
  if (rep == Representation::explicit_matrix) op.materialize();
  return op;
}

const CMatrix& BlockOperator::explicit_matrix() const {
  if (!explicit_) throw InvalidArgument("operator holds no explicit matrix");
  return *explicit_;
}

cplx BlockOperator::entry(std::size_t p, std::size_t k, std::size_t q, std::size_t n) const {
  // s runs while both p + s and q + s stay below cols_
  const std::size_t top = cols_ - std::max(p, q);
  cplx acc = 0.0;
  for (std::size_t s = 0; s < top; ++s) acc += coeffs_.at(k, s + p) * std::conj(coeffs_.at(n, s + q));
  return acc;
}

void BlockOperator::materialize() {
  if (explicit_) return;
  const std::size_t d = dim();
  CMatrix m(d, d);
  for (std::size_t p = 0; p < rows_; ++p)
    for (std::size_t q = p; q < rows_; ++q)
      for (std::size_t k = 1; k <= K_; ++k)
        for (std::size_t n = 1; n <= K_; ++n) {
          const cplx v = entry(p, k, q, n);
          m(flat_index(p, k, K_), flat_index(q, n, K_)) = v;
          m(flat_index(q, n, K_), flat_index(p, k, K_)) = std::conj(v);
        }
  // diagonal entries are sums of |.|^2
  for (std::size_t i = 0; i < d; ++i) m(i, i) = m(i, i).real();
  explicit_ = std::move(m);
}

CMatrix BlockOperator::factor() const {
  CMatrix a(dim(), cols_);
  for (std::size_t p = 0; p < rows_; ++p)
    for (std::size_t s = 0; p + s < cols_; ++s)
      for (std::size_t k = 1; k <= K_; ++k) a(flat_index(p, k, K_), s) = coeffs_.at(k, p + s);
  return a;
}

CVector BlockOperator::apply_explicit(std::span<const cplx> v) const {
  if (v.size() != dim()) throw InvalidArgument("matvec: dimension mismatch");
  return explicit_matrix().multiply(v);
}

CVector BlockOperator::adjoint_factor_apply(std::span<const cplx> v) const {
  if (v.size() != dim()) throw InvalidArgument("matvec: dimension mismatch");
  CVector w(cols_);
  for (std::size_t s = 0; s < cols_; ++s) {
    cplx acc = 0.0;
    for (std::size_t p = 0; p < rows_ && p + s < cols_; ++p)
      for (std::size_t k = 1; k <= K_; ++k) acc += std::conj(coeffs_.at(k, p + s)) * v[flat_index(p, k, K_)];
    w[s] = acc;
  }
  return w;
}

CVector BlockOperator::apply_factored(std::span<const cplx> v) const {
  const CVector w = adjoint_factor_apply(v);
  CVector out(dim());
  for (std::size_t p = 0; p < rows_; ++p)
    for (std::size_t k = 1; k <= K_; ++k) {
      cplx acc = 0.0;
      for (std::size_t s = 0; p + s < cols_; ++s) acc += coeffs_.at(k, p + s) * w[s];
      out[flat_index(p, k, K_)] = acc;
    }
  return out;
}

BlockOperator assemble_QN(const FourierBlockCoefficients& c, std::size_t N, Representation rep) {
  if (N + 1 > c.J())
    throw InvalidArgument("assemble_QN: N = " + std::to_string(N) + " exceeds available blocks (J = " +
                          std::to_string(c.J()) + ")");
  return BlockOperator::build(c, N + 1, N + 1, rep);
}

BlockOperator assemble_Q_truncated(const FourierBlockCoefficients& c, std::size_t p_max, Representation rep) {
  if (p_max + 1 > c.J())
    throw InvalidArgument("assemble_Q_truncated: P_max = " + std::to_string(p_max) +
                          " exceeds available blocks (J = " + std::to_string(c.J()) + ")");
  return BlockOperator::build(c, p_max + 1, c.J(), rep);
}

MirrorMatrix assemble_DN(const FourierBlockCoefficients& c, std::size_t N) {
  if (N + 1 > c.J())
    throw InvalidArgument("assemble_DN: N = " + std::to_string(N) + " exceeds available blocks (J = " +
                          std::to_string(c.J()) + ")");
  const std::size_t K = c.K();
  MirrorMatrix d{N, K, CMatrix((N + 1) * K, (N + 1) * K)};
  for (std::size_t p = 0; p <= N; ++p)
    for (std::size_t q = 0; q <= N; ++q)
      for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t n = 1; n <= K; ++n) {
          cplx acc = 0.0;
          for (std::size_t s = 0; s <= std::min(p, q); ++s)
            acc += c.at(k, N - p + s) * std::conj(c.at(n, N - q + s));
          d.entries(flat_index(p, k, K), flat_index(q, n, K)) = acc;
        }
  return d;
}

CVector matvec(const BlockOperator& op, std::span<const cplx> v) {
  return op.has_explicit() ? op.apply_explicit(v) : op.apply_factored(v);
}

double max_row_sum(const CMatrix& m) {
  double best = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (const auto& z : m.row(r)) s += std::abs(z);
    best = std::max(best, s);
  }
  return best;
}

void write_matrix_csv(const CMatrix& m, const std::filesystem::path& path) {
  CsvWriter out(path, {"row", "col", "real", "imag"});
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out.row(r, c, m(r, c).real(), m(r, c).imag());
}

}  // namespace pcm
