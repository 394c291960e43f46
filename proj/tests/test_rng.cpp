#include "doctest.h"
#include "urllc/rng.hpp"

#include <cmath>
#include <vector>

using urllc::RngStream;

TEST_CASE("philox known-answer vectors") {
  auto zero = RngStream::philox({0, 0, 0, 0}, {0, 0});
  CHECK(zero == RngStream::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto ones = RngStream::philox({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
  CHECK(ones == RngStream::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto pi = RngStream::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  CHECK(pi == RngStream::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same address reproduces the sequence") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    same_c += x == c();
    same_d += x == d();
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
}

TEST_CASE("substreams differ from the parent") {
  RngStream a(1, 1);
  RngStream s = a.substream(1);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a() == s();
  CHECK(same < 3);
}

TEST_CASE("uniform moments and range") {
  RngStream r(5, 0);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.01));
}

TEST_CASE("poisson mean and dispersion") {
  RngStream r(9, 0);
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(r.poisson(12.5));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(12.5).epsilon(0.01));
  CHECK((sq / n - mean * mean) / mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("uniform_index stays in range and is balanced") {
  RngStream r(3, 3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts.at(r.uniform_index(7));
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
