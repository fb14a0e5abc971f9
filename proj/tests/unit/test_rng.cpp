#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qes/core/rng.hpp"

using namespace qes;

namespace {

void expect_block(const Philox4x64& got, const Philox4x64& want) {
  for (int i = 0; i < 4; ++i) EXPECT_EQ(got[i], want[i]) << "word " << i;
}

}  // namespace

// Published known-answer vectors for philox4x64 with 10 rounds.
TEST(Philox, KnownAnswerZero) {
  expect_block(philox4x64_10({0, 0, 0, 0}, {0, 0}),
               {0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
}

TEST(Philox, KnownAnswerOnes) {
  const auto m = ~std::uint64_t{0};
  expect_block(philox4x64_10({m, m, m, m}, {m, m}),
               {0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});
}

TEST(Philox, KnownAnswerPi) {
  expect_block(philox4x64_10({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                              0x082efa98ec4e6c89ULL},
                             {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}),
               {0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
}

TEST(Streams, SameKeySameSequenceDifferentKeyDifferent) {
  auto a = make_stream(7, StreamDomain::laser_noise, 3, 4);
  auto b = make_stream(7, StreamDomain::laser_noise, 3, 4);
  auto c = make_stream(7, StreamDomain::laser_noise, 3, 5);
  auto d = make_stream(7, StreamDomain::amplifier, 3, 4);
  auto e = make_stream(8, StreamDomain::laser_noise, 3, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
    EXPECT_NE(x, e());
  }
}

TEST(Streams, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Fastmath, LogAndSincosAccuracy) {
  for (double x = 1e-12; x <= 1.0; x *= 1.37) EXPECT_NEAR(fastmath::log_unit(x), std::log(x), 1e-13 * (1 + std::abs(std::log(x))));
  for (double x = 0.0; x <= std::numbers::pi / 4; x += 1e-3) {
    double s, c;
    fastmath::sincos_octant(x, s, c);
    EXPECT_NEAR(s, std::sin(x), 1e-15);
    EXPECT_NEAR(c, std::cos(x), 1e-15);
  }
}

TEST(NormalStream, MomentsAndIndependence) {
  NormalStream g(1, StreamDomain::user, 0, 0);
  const int n = 1'000'000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, lag = 0, prev = 0;
  for (int i = 0; i < n; ++i) {
    const double x = g();
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    lag += x * prev;
    prev = x;
  }
  const double se = 1.0 / std::sqrt(n);
  EXPECT_NEAR(s1 / n, 0.0, 5 * se);
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0) * se);
  EXPECT_NEAR(s3 / n, 0.0, 5 * std::sqrt(15.0) * se);
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0) * se);
  EXPECT_NEAR(lag / n, 0.0, 5 * se);
}

TEST(NormalStream, QuadrantsBalanced) {
  // each sign pattern of (x, y) pairs should be equally likely
  NormalStream g(3, StreamDomain::user, 1, 2);
  int q[4] = {0, 0, 0, 0};
  const int pairs = 400000;
  for (int i = 0; i < pairs; ++i) {
    const double x = g(), y = g();
    ++q[(x < 0) * 2 + (y < 0)];
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(q[k] / double(pairs), 0.25, 5 * std::sqrt(0.25 * 0.75 / pairs));
}

TEST(NormalStream, TakeMatchesScalarDraws) {
  NormalStream a(9, StreamDomain::laser_noise, 0, 1), b(9, StreamDomain::laser_noise, 0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double* p = a.take(4);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(p[j], b());
  }
}

TEST(NormalStream, ReseedRestartsSequence) {
  NormalStream a(5, StreamDomain::laser_noise, 2, 3);
  const double first = a();
  for (int i = 0; i < 1000; ++i) a();
  a.reseed(5, StreamDomain::laser_noise, 2, 3);
  EXPECT_EQ(a(), first);
}
