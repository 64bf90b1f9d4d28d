#include "pcminimax/rng.hpp"

#include <cmath>
#include <numbers>

namespace pcm {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const {
  Key key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

std::array<double, 2> gaussian_pair(std::uint64_t seed, const DrawIndex& at) {
  const auto s = static_cast<std::uint64_t>(at.s);
  const auto out = Philox4x32(seed)({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                                     at.channel, at.stream});
  const double u1 = to_unit_open_closed(out[0], out[1]);
  const double u2 = to_unit_open_closed(out[2], out[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

cplx complex_gaussian(std::uint64_t seed, const DrawIndex& at) {
  const auto [x, y] = gaussian_pair(seed, at);
  return cplx{x, y} * (1.0 / std::numbers::sqrt2);
}

double real_gaussian(std::uint64_t seed, const DrawIndex& at) { return gaussian_pair(seed, at)[0]; }

}  // namespace pcm
