#pragma once

// Hermitian block operators built from block Fourier coefficients.
//
// Layout: block-major, flat index(p, k) = p * K + (k - 1) for block p and
// 1-based basis index k.
//
// Both Q_N and the truncated infinite-horizon Q share the factorization
// Q = A A*, with A[(p,k), s] = a_{k, p+s} for p + s < L and zero otherwise.
// L = N + 1 for Q_N and L = J for the truncated operator.

#include <filesystem>
#include <optional>

#include "pcminimax/blocking.hpp"
#include "pcminimax/types.hpp"

namespace pcm {

enum class Representation { explicit_matrix, factored };

inline std::size_t flat_index(std::size_t p, std::size_t k, std::size_t K) { return p * K + (k - 1); }

class BlockOperator {
 public:
  BlockOperator() = default;

  /// Number of blocks along each side (N + 1 for Q_N).
  std::size_t horizon_blocks() const { return rows_; }
  std::size_t K() const { return K_; }
  std::size_t dim() const { return rows_ * K_; }
  /// Number of coefficient blocks used by the inner sums.
  std::size_t summed_blocks() const { return cols_; }

  /// True when every coefficient is real, so Q is real symmetric.
  bool is_real() const { return coeffs_.is_real(); }

  bool has_explicit() const { return explicit_.has_value(); }
  const CMatrix& explicit_matrix() const;

  /// Q(p,q)_{kn} evaluated from the defining sum, independent of the stored
  /// representation.
  cplx entry(std::size_t p, std::size_t k, std::size_t q, std::size_t n) const;

  /// The A factor as a dense dim() x summed_blocks() matrix.
  CMatrix factor() const;

  CVector apply_explicit(std::span<const cplx> v) const;
  CVector apply_factored(std::span<const cplx> v) const;

  /// A* v, the summed_blocks()-vector w_s = sum_{p,k} conj(a_{k,p+s}) v_{(p,k)}.
  CVector adjoint_factor_apply(std::span<const cplx> v) const;

  /// Builds the dense matrix if it is not held yet.
  void materialize();

  static BlockOperator build(const FourierBlockCoefficients& c, std::size_t rows, std::size_t cols,
                             Representation rep);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t K_ = 0;
  FourierBlockCoefficients coeffs_;
  std::optional<CMatrix> explicit_;
};

/// Q_N with entries sum_{s=0}^{min(N-p,N-q)} a_{k,s+p} conj(a_{n,s+q}).
BlockOperator assemble_QN(const FourierBlockCoefficients& c, std::size_t N,
                          Representation rep = Representation::explicit_matrix);

/// Horizon-truncated Q: same sums as Q_N but running over every retained
/// coefficient block, p, q = 0..p_max.
BlockOperator assemble_Q_truncated(const FourierBlockCoefficients& c, std::size_t p_max,
                                   Representation rep = Representation::explicit_matrix);

/// Mirror of Q_N: D_N(p,q) = sum_{s=0}^{min(p,q)} a_{N-p+s} a_{N-q+s}^*,
/// so that D_N(N-p, N-q) = Q_N(p,q).
struct MirrorMatrix {
  std::size_t N = 0;
  std::size_t K = 0;
  CMatrix entries;
};

MirrorMatrix assemble_DN(const FourierBlockCoefficients& c, std::size_t N);

/// Q v using the explicit matrix when held, the factored product otherwise.
CVector matvec(const BlockOperator& op, std::span<const cplx> v);

/// Largest absolute row sum of the explicit matrix (an upper bound on ||Q||).
double max_row_sum(const CMatrix& m);

/// Writes row,col,real,imag for every entry, 17 significant digits.
void write_matrix_csv(const CMatrix& m, const std::filesystem::path& path);

}  // namespace pcm
