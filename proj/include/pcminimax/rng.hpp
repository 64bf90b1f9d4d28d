#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, counter), so values do not depend on the order or range in which
// they are requested.

#include <array>
#include <cstdint>

#include "pcminimax/types.hpp"

namespace pcm {

/// Philox4x32 with 10 rounds.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

 private:
  Key key_;
};

/// Maps 64 random bits to a double in (0, 1].
double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo);

/// Addressing of one standard Gaussian draw.
struct DrawIndex {
  std::int64_t s = 0;          // time index
  std::uint32_t channel = 0;   // innovation channel m
  std::uint32_t stream = 0;    // replicate / path id
};

/// Pair of independent N(0,1) variates from one Philox block (Box-Muller).
std::array<double, 2> gaussian_pair(std::uint64_t seed, const DrawIndex& at);

/// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
cplx complex_gaussian(std::uint64_t seed, const DrawIndex& at);

/// Real N(0,1) draw.
double real_gaussian(std::uint64_t seed, const DrawIndex& at);

}  // namespace pcm
