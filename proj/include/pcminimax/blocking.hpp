#pragma once

// Splitting a weight function a(t), t >= 0, into period-T blocks and
// projecting each block onto the exponential basis
//   e_k(u) = T^{-1/2} exp(2 pi i m(k) u / T),  m(k) = (-1)^k floor(k/2),
// which orders frequencies 0, +1, -1, +2, -2, ... for k = 1, 2, 3, ...

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pcminimax/types.hpp"

namespace pcm {

enum class WeightKind { sampled_grid, piecewise_constant, exponential_decay, windowed_cosine, indicator };

std::string to_string(WeightKind kind);

/// A real weight function on [0, inf).
class WeightFunction {
 public:
  /// Samples at t_i = i * step; linear interpolation between samples, zero
  /// from the last sample onwards.
  static WeightFunction sampled_grid(std::vector<double> values, double step);

  /// Value values[i] on [breakpoints[i], breakpoints[i+1]); zero elsewhere.
  static WeightFunction piecewise_constant(std::vector<double> breakpoints, std::vector<double> values);

  /// amplitude * exp(-rate t) on [0, support_end).
  static WeightFunction exponential_decay(double amplitude, double rate,
                                          double support_end = std::numeric_limits<double>::infinity());

  /// amplitude * cos(2 pi frequency t + phase) on [0, window_end).
  static WeightFunction windowed_cosine(double amplitude, double frequency, double phase, double window_end);

  /// level on [start, end).
  static WeightFunction indicator(double start, double end, double level = 1.0);

  /// Reads a "t,value" CSV on a uniform grid; the step is inferred from the
  /// first two rows and every subsequent row is checked against it.
  static WeightFunction from_csv(const std::filesystem::path& path);

  WeightKind kind() const { return kind_; }
  double support_end() const { return support_end_; }
  const std::vector<double>& parameters() const { return params_; }

  double operator()(double t) const;

  /// Closed form of the integral of a(t) exp(-i omega t) over [t0, t1), for the
  /// kinds that have one.
  std::optional<cplx> exact_fourier_integral(double t0, double t1, double omega) const;

  /// Integral of |a(t)| over [0, inf); exact for the analytic kinds, trapezoid
  /// for sampled grids.
  double l1_norm() const;

 private:
  WeightKind kind_ = WeightKind::indicator;
  std::vector<double> params_;
  std::vector<double> xs_;  // sampled values or breakpoints
  std::vector<double> ys_;  // piecewise values
  double support_end_ = 0.0;
};

/// a_j(u) = a(u + jT), u in [0, T), j = 0..J-1.
class BlockedFunction {
 public:
  BlockedFunction(WeightFunction a, double period, std::size_t blocks);

  double period() const { return period_; }
  std::size_t blocks() const { return blocks_; }
  const WeightFunction& weight() const { return weight_; }

  /// True when block j lies entirely past the support of a.
  bool beyond_support(std::size_t j) const;

  double operator()(std::size_t j, double u) const;

 private:
  WeightFunction weight_;
  double period_;
  std::size_t blocks_;
};

BlockedFunction block_function(const WeightFunction& a, double period, std::size_t blocks);

/// Basis frequency of the 1-based basis index k.
long basis_frequency(std::size_t k);

/// a_{kj} stored with a 0-based row for basis index k = row + 1.
class FourierBlockCoefficients {
 public:
  FourierBlockCoefficients() = default;
  FourierBlockCoefficients(double period, CMatrix coeffs);

  std::size_t K() const { return coeffs_.rows(); }
  std::size_t J() const { return coeffs_.cols(); }
  double period() const { return period_; }

  /// k is the 1-based basis index.
  cplx& at(std::size_t k, std::size_t j) { return coeffs_(k - 1, j); }
  const cplx& at(std::size_t k, std::size_t j) const { return coeffs_(k - 1, j); }

  /// The K-vector of block j.
  CVector block(std::size_t j) const;
  double block_norm(std::size_t j) const;
  bool is_real() const;

  const CMatrix& matrix() const { return coeffs_; }

  /// Basis index k' with m(k') = -m(k), when it is within 1..K.
  std::optional<std::size_t> conjugate_partner(std::size_t k) const;

  FourierBlockCoefficients scaled(double factor) const;

 private:
  double period_ = 1.0;
  CMatrix coeffs_;
};

/// Closed forms where the weight kind admits them, composite trapezoid on
/// quad_nodes uniform points otherwise.
FourierBlockCoefficients fourier_coefficients(const BlockedFunction& bf, std::size_t K, std::size_t quad_nodes);

/// Always uses the composite trapezoid rule, whatever the weight kind.
FourierBlockCoefficients trapezoid_fourier_coefficients(const BlockedFunction& bf, std::size_t K,
                                                        std::size_t quad_nodes);

enum class TailKind { finite, geometric, power };

/// Decay hint for the blocks past the truncation: geometric ratio r < 1 of
/// successive block norms, or power law ||a_j|| ~ (j+1)^-rate.
struct TailModel {
  TailKind kind = TailKind::finite;
  double rate = 0.0;
};

struct AdmissibilityReport {
  double partial_l1 = 0.0;        // sum_j ||a_j||
  double partial_weighted = 0.0;  // sum_j (j+1) ||a_j||^2
  double tail_l1 = 0.0;
  double tail_weighted = 0.0;
  double total_l1 = 0.0;
  double total_weighted = 0.0;
  std::vector<double> last_block_norms;  // truncation residuals, oldest first
  bool pass = true;
  std::string diagnosis;
};

struct AdmissibilityBounds {
  double max_l1 = std::numeric_limits<double>::infinity();
  double max_weighted = std::numeric_limits<double>::infinity();
};

AdmissibilityReport check_summability(const FourierBlockCoefficients& c, const TailModel& tail,
                                      const AdmissibilityBounds& bounds = {});

}  // namespace pcm
