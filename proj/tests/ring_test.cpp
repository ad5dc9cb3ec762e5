/*
 * Copyright 2026 The ab2h Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ab2h/ring.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ab2h/error.h"

namespace ab2h {
namespace {

const FixedPointConfig kF13(13);

TEST(FixedPoint, RejectsOutOfRangeFractionalBits) {
  EXPECT_NO_THROW(FixedPointConfig(1));
  EXPECT_NO_THROW(FixedPointConfig(60));
  for (int f : {0, -3, 61, 64}) {
    try {
      FixedPointConfig c(f);
      FAIL() << f;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
  }
}

TEST(FixedPoint, DefaultIsThirteenBits) {
  EXPECT_EQ(FixedPointConfig().fractional_bits(), 13);
  EXPECT_EQ(FixedPointConfig().one(), 8192u);
}

TEST(Encode, SmallValues) {
  EXPECT_EQ(encode(1.0, kF13), 8192u);
  EXPECT_EQ(encode(0.0, kF13), 0u);
  EXPECT_EQ(encode(-1.0, kF13), ~Ring{0} - 8191);
  EXPECT_EQ(encode(2.5, kF13), 20480u);
  EXPECT_EQ(to_signed(encode(-0.25, FixedPointConfig(6))), -16);
}

TEST(Encode, RoundsHalfAwayFromZero) {
  const double half_ulp = std::ldexp(1.0, -14);
  EXPECT_EQ(encode(half_ulp, kF13), 1u);
  EXPECT_EQ(to_signed(encode(-half_ulp, kF13)), -1);
  EXPECT_EQ(encode(3 * half_ulp, kF13), 2u);
  EXPECT_EQ(encode(0.9 * half_ulp, kF13), 0u);
}

TEST(Encode, RangeLimits) {
  const FixedPointConfig f60(60);
  EXPECT_NO_THROW(encode(-8.0, f60));
  try {
    encode(8.0, f60);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRange);
  }
  EXPECT_THROW(encode(NAN, kF13), Error);
  EXPECT_THROW(encode(INFINITY, kF13), Error);
}

TEST(Encode, MatchesIndependentRounding) {
  // llround rounds halves away from zero, independently of std::round.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1000.0, 1000.0);
  for (int f : {1, 6, 13, 24, 40}) {
    const FixedPointConfig fp(f);
    for (int k = 0; k < 2000; ++k) {
      const double x = d(rng);
      EXPECT_EQ(to_signed(encode(x, fp)), std::llround(x * std::pow(2.0, f)));
    }
  }
}

TEST(Decode, InvertsEncodeWithinHalfUlp) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int k = 0; k < 2000; ++k) {
    const double x = d(rng);
    EXPECT_LE(std::abs(decode(encode(x, kF13), kF13) - x),
              std::ldexp(1.0, -14) + 1e-12);
  }
  EXPECT_EQ(decode(encode(-3.75, kF13), kF13), -3.75);
}

TEST(Truncate, IsArithmeticShift) {
  EXPECT_EQ(to_signed(truncate(from_signed(-1), 13)), -1);
  EXPECT_EQ(to_signed(truncate(from_signed(-8192), 13)), -1);
  EXPECT_EQ(to_signed(truncate(from_signed(-8193), 13)), -2);
  EXPECT_EQ(truncate(encode(2.5, kF13) * encode(4.0, kF13), kF13),
            encode(10.0, kF13));
}

TEST(Truncate, ProductMatchesWideOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  for (int k = 0; k < 5000; ++k) {
    const Ring a = encode(d(rng), kF13), b = encode(d(rng), kF13);
    const __int128 wide =
        static_cast<__int128>(to_signed(a)) * static_cast<__int128>(to_signed(b));
    // floor division by 2^13 of the exact product
    const __int128 q = wide >= 0 ? wide / 8192 : -((-wide + 8191) / 8192);
    EXPECT_EQ(to_signed(truncate(a * b, kF13)), static_cast<std::int64_t>(q));
  }
}

TEST(Ring, ArithmeticWraps) {
  const Ring top = ~Ring{0};
  EXPECT_EQ(top + 1, 0u);
  EXPECT_EQ(Ring{0} - 1, top);
  EXPECT_EQ(to_signed(Ring{1} << 63), INT64_MIN);
}

}  // namespace
}  // namespace ab2h
