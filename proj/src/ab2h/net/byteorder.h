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

#include <bit>
#include <concepts>
#include <cstdint>
#include <cstring>

namespace ab2h::net {

template <std::unsigned_integral T>
constexpr T byteswap(T v) noexcept {
  T out = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out = static_cast<T>((out << 8) | ((v >> (8 * i)) & 0xff));
  }
  return out;
}

// Memory image of `v` on a host with byte order `Host`. For the native byte
// order this is a plain memcpy; the other order is modelled byte by byte so
// the wire codec can be exercised as a foreign-endian host would run it.
template <std::endian Host, std::unsigned_integral T>
void host_store(std::uint8_t* dst, T v) noexcept {
  if constexpr (Host == std::endian::native) {
    std::memcpy(dst, &v, sizeof(T));
  } else {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      const std::size_t shift =
          Host == std::endian::little ? 8 * i : 8 * (sizeof(T) - 1 - i);
      dst[i] = static_cast<std::uint8_t>(v >> shift);
    }
  }
}

template <std::endian Host, std::unsigned_integral T>
T host_load(const std::uint8_t* src) noexcept {
  if constexpr (Host == std::endian::native) {
    T v;
    std::memcpy(&v, src, sizeof(T));
    return v;
  } else {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      const std::size_t shift =
          Host == std::endian::little ? 8 * i : 8 * (sizeof(T) - 1 - i);
      v |= static_cast<T>(T{src[i]} << shift);
    }
    return v;
  }
}

// Wire integers are little-endian regardless of host.
template <std::endian Host = std::endian::native, std::unsigned_integral T>
void store_le(std::uint8_t* dst, T v) noexcept {
  if constexpr (Host == std::endian::big) v = byteswap(v);
  host_store<Host>(dst, v);
}

template <std::unsigned_integral T, std::endian Host = std::endian::native>
T load_le(const std::uint8_t* src) noexcept {
  T v = host_load<Host, T>(src);
  if constexpr (Host == std::endian::big) v = byteswap(v);
  return v;
}

}  // namespace ab2h::net
