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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace ab2h {

// Source of uniform 64-bit words. Implementations throw RngError on failure.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual void fill(std::span<std::uint64_t> out) = 0;

  std::uint64_t next() {
    std::uint64_t v;
    fill({&v, 1});
    return v;
  }
};

// ChaCha20 keystream generator. Keys come either from the OS entropy pool or
// from a (seed, stream label) pair hashed with BLAKE2b; the latter is what
// test mode uses to make whole runs reproducible.
class ChaChaPrg final : public RandomSource {
 public:
  using Key = std::array<std::uint8_t, 32>;

  explicit ChaChaPrg(const Key& key);

  static ChaChaPrg from_entropy();
  static ChaChaPrg from_seed(std::uint64_t seed, std::string_view domain,
                             std::uint64_t stream = 0);
  static Key derive_key(std::uint64_t seed, std::string_view domain,
                        std::uint64_t stream);

  void fill(std::span<std::uint64_t> out) override;

 private:
  void refill();

  Key key_;
  std::uint32_t block_counter_ = 0;
  std::array<std::uint64_t, 64> buffer_{};
  std::size_t used_ = 64;
};

}  // namespace ab2h
