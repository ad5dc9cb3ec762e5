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

#include <cmath>
#include <sstream>

#include "ab2h/error.h"

namespace ab2h {

FixedPointConfig::FixedPointConfig(int fractional_bits)
    : fractional_bits_(fractional_bits) {
  if (fractional_bits < 1 || fractional_bits > 60) {
    fail(ErrorCode::kConfig, "fractional bits must lie in [1, 60], got " +
                                 std::to_string(fractional_bits));
  }
}

double FixedPointConfig::bound() const noexcept {
  return std::ldexp(1.0, 63 - fractional_bits_);
}

Ring encode(double x, const FixedPointConfig& cfg) {
  const double bound = cfg.bound();
  if (!(x >= -bound && x < bound)) {
    std::ostringstream msg;
    msg << "value " << x << " outside fixed-point range [-" << bound << ", "
        << bound << ") for f=" << cfg.fractional_bits();
    fail(ErrorCode::kRange, msg.str());
  }
  // std::round is half away from zero.
  const double scaled = std::round(std::ldexp(x, cfg.fractional_bits()));
  if (scaled >= 0x1p63) {
    fail(ErrorCode::kRange, "value rounds past the top of the ring");
  }
  return from_signed(static_cast<std::int64_t>(scaled));
}

double decode(Ring r, const FixedPointConfig& cfg) noexcept {
  return std::ldexp(static_cast<double>(to_signed(r)), -cfg.fractional_bits());
}

}  // namespace ab2h
