#include <gtest/gtest.h>

#include <cmath>

#include "pspin/rng.hpp"

using namespace pspin;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStream, AddressableAndDistinct) {
  const NormalStream a(42, 0), b(42, 1), c(43, 0);
  EXPECT_EQ(a.pair(7, 0), NormalStream(42, 0).pair(7, 0));
  EXPECT_NE(a.pair(7, 0), a.pair(8, 0));
  EXPECT_NE(a.pair(7, 0), a.pair(7, 1));
  EXPECT_NE(a.pair(7, 0), b.pair(7, 0));
  EXPECT_NE(a.pair(7, 0), c.pair(7, 0));
}

TEST(NormalStream, MomentsProperty) {
  const NormalStream s(1, 3);
  constexpr int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0, cross = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = s.pair(static_cast<std::uint64_t>(i), 0);
    for (double v : p) {
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
    cross += p[0] * p[1];
  }
  const double k = 2.0 * n;
  EXPECT_NEAR(m1 / k, 0.0, 4.0 / std::sqrt(k));
  EXPECT_NEAR(m2 / k, 1.0, 4.0 * std::sqrt(2.0 / k));
  EXPECT_NEAR(m4 / k, 3.0, 4.0 * std::sqrt(96.0 / k));
  EXPECT_NEAR(cross / n, 0.0, 4.0 / std::sqrt(n));
}
