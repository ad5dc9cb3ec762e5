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

#pragma once

#include <cstdint>

namespace ab2h {

// Residue mod 2^64. Unsigned overflow is the ring arithmetic; values at or
// above 2^63 denote negatives under the two's complement reading.
using Ring = std::uint64_t;

constexpr int kRingBits = 64;
constexpr int kDefaultFractionalBits = 13;

class FixedPointConfig {
 public:
  // Throws ConfigError unless 1 <= fractional_bits <= 60.
  explicit FixedPointConfig(int fractional_bits = kDefaultFractionalBits);

  int fractional_bits() const noexcept { return fractional_bits_; }

  // Magnitude bound 2^(63-f): representable reals lie in [-bound, bound).
  double bound() const noexcept;

  // 2^f, the encoding of 1.0.
  Ring one() const noexcept { return Ring{1} << fractional_bits_; }

  friend bool operator==(const FixedPointConfig&,
                         const FixedPointConfig&) = default;

 private:
  int fractional_bits_;
};

inline std::int64_t to_signed(Ring r) noexcept {
  return static_cast<std::int64_t>(r);
}

inline Ring from_signed(std::int64_t v) noexcept {
  return static_cast<Ring>(v);
}

// Rounds x * 2^f half away from zero. Throws RangeError outside the
// representable range (NaN included).
Ring encode(double x, const FixedPointConfig& cfg);

double decode(Ring r, const FixedPointConfig& cfg) noexcept;

// Arithmetic (sign-extending) right shift by f.
inline Ring truncate(Ring r, int fractional_bits) noexcept {
  return from_signed(to_signed(r) >> fractional_bits);
}

inline Ring truncate(Ring r, const FixedPointConfig& cfg) noexcept {
  return truncate(r, cfg.fractional_bits());
}

}  // namespace ab2h
