#include <cmath>

#include "doctest.h"
#include "pcminimax/montecarlo.hpp"
#include "pcminimax/rng.hpp"

using namespace pcm;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(Philox4x32::Key{0, 0})(C{0, 0, 0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(Philox4x32::Key{0xffffffff, 0xffffffff})(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(Philox4x32::Key{0xa4093822, 0x299f31d0})(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("64-bit seed splits into the two key words") {
  using C = Philox4x32::Counter;
  const C ctr{1, 2, 3, 4};
  CHECK(Philox4x32(0x299f31d0a4093822ull)(ctr) == Philox4x32(Philox4x32::Key{0xa4093822, 0x299f31d0})(ctr));
}

TEST_CASE("unit interval mapping is open at 0 and closed at 1") {
  CHECK(to_unit_open_closed(0, 0) > 0.0);
  CHECK(to_unit_open_closed(0xffffffff, 0xffffffff) == 1.0);
  const double mid = to_unit_open_closed(0x80000000, 0);
  CHECK(std::abs(mid - 0.5) <= 1e-15);
}

TEST_CASE("draws are pure functions of their address") {
  const DrawIndex at{-5, 1, 9};
  CHECK(complex_gaussian(42, at) == complex_gaussian(42, at));
  CHECK(complex_gaussian(42, at) != complex_gaussian(43, at));
  CHECK(complex_gaussian(42, at) != complex_gaussian(42, {-5, 1, 10}));
  CHECK(complex_gaussian(42, at) != complex_gaussian(42, {-5, 0, 9}));
  CHECK(complex_gaussian(42, at) != complex_gaussian(42, {-4, 1, 9}));

  // requested range does not change the values
  const auto wide = simulate_innovations(3, -20, 20, 2, 4);
  const auto narrow = simulate_innovations(3, 5, 7, 2, 4);
  for (std::int64_t s = 5; s <= 7; ++s)
    for (std::size_t m = 0; m < 2; ++m) CHECK(wide.at(s)[m] == narrow.at(s)[m]);
  CHECK(wide.covers(-20, 20));
  CHECK_FALSE(narrow.covers(4, 7));
  CHECK_THROWS_AS(narrow.at(8), InvalidArgument);
}

TEST_CASE("Gaussian moments") {
  const std::size_t n = 100000;
  double sr = 0, si = 0, sr2 = 0, si2 = 0, sri = 0, sabs2 = 0, sabs4 = 0;
  double x1 = 0, x2 = 0, x4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const DrawIndex at{static_cast<std::int64_t>(i), 0, 0};
    const cplx z = complex_gaussian(11, at);
    sr += z.real();
    si += z.imag();
    sr2 += z.real() * z.real();
    si2 += z.imag() * z.imag();
    sri += z.real() * z.imag();
    sabs2 += std::norm(z);
    sabs4 += std::norm(z) * std::norm(z);
    const double x = real_gaussian(11, {static_cast<std::int64_t>(i), 1, 0});
    x1 += x;
    x2 += x * x;
    x4 += x * x * x * x;
  }
  const double N = static_cast<double>(n);
  // standard errors: mean of N(0, 1/2) is sqrt(0.5 / n), E|z|^2 has variance 1
  CHECK(std::abs(sr / N) <= 4.0 * std::sqrt(0.5 / N));
  CHECK(std::abs(si / N) <= 4.0 * std::sqrt(0.5 / N));
  CHECK(std::abs(sr2 / N - 0.5) <= 4.0 * std::sqrt(0.5 / N));
  CHECK(std::abs(si2 / N - 0.5) <= 4.0 * std::sqrt(0.5 / N));
  CHECK(std::abs(sri / N) <= 4.0 * std::sqrt(0.25 / N));
  CHECK(std::abs(sabs2 / N - 1.0) <= 4.0 * std::sqrt(1.0 / N));
  CHECK(std::abs(sabs4 / N - 2.0) <= 4.0 * std::sqrt(20.0 / N));
  CHECK(std::abs(x1 / N) <= 4.0 * std::sqrt(1.0 / N));
  CHECK(std::abs(x2 / N - 1.0) <= 4.0 * std::sqrt(2.0 / N));
  CHECK(std::abs(x4 / N - 3.0) <= 4.0 * std::sqrt(96.0 / N));
}

TEST_CASE("different seeds are uncorrelated") {
  const std::size_t n = 50000;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const DrawIndex at{static_cast<std::int64_t>(i), 0, 0};
    acc += (std::conj(complex_gaussian(1, at)) * complex_gaussian(2, at)).real();
  }
  CHECK(std::abs(acc / static_cast<double>(n)) < 0.02);
}

TEST_CASE("real-law innovations have zero imaginary part") {
  const auto s = simulate_innovations(5, 0, 99, 1, 0, NoiseLaw::real_gaussian);
  for (std::int64_t i = 0; i <= 99; ++i) CHECK(s.at(i)[0].imag() == 0.0);
  CHECK_THROWS_AS(simulate_innovations(5, 3, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(simulate_innovations(5, 0, 2, 0), InvalidArgument);
}
