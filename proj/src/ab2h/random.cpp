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

#include "ab2h/random.h"

#include <sodium.h>

#include <algorithm>
#include <cstdint>

#include "ab2h/error.h"

namespace ab2h {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) {
    fail(ErrorCode::kRng, "libsodium initialisation failed");
  }
}

constexpr std::size_t kBufferBytes = 64 * sizeof(std::uint64_t);

}  // namespace

ChaChaPrg::ChaChaPrg(const Key& key) : key_(key) { ensure_sodium(); }

ChaChaPrg ChaChaPrg::from_entropy() {
  ensure_sodium();
  Key key;
  randombytes_buf(key.data(), key.size());
  return ChaChaPrg(key);
}

ChaChaPrg::Key ChaChaPrg::derive_key(std::uint64_t seed,
                                     std::string_view domain,
                                     std::uint64_t stream) {
  ensure_sodium();
  std::uint8_t material[16];
  for (int i = 0; i < 8; ++i) {
    material[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    material[8 + i] = static_cast<std::uint8_t>(stream >> (8 * i));
  }
  crypto_generichash_state st;
  Key key;
  if (crypto_generichash_init(&st, nullptr, 0, key.size()) != 0 ||
      crypto_generichash_update(
          &st, reinterpret_cast<const unsigned char*>(domain.data()),
          domain.size()) != 0 ||
      crypto_generichash_update(&st, material, sizeof(material)) != 0 ||
      crypto_generichash_final(&st, key.data(), key.size()) != 0) {
    fail(ErrorCode::kRng, "key derivation failed");
  }
  return key;
}

ChaChaPrg ChaChaPrg::from_seed(std::uint64_t seed, std::string_view domain,
                               std::uint64_t stream) {
  return ChaChaPrg(derive_key(seed, domain, stream));
}

void ChaChaPrg::refill() {
  static const std::uint8_t kNonce[crypto_stream_chacha20_ietf_NONCEBYTES] =
      {};
  static const std::uint8_t kZeros[kBufferBytes] = {};
  if (block_counter_ > UINT32_MAX - kBufferBytes / 64) {
    fail(ErrorCode::kRng, "keystream exhausted for this key");
  }
  std::uint8_t bytes[kBufferBytes];
  if (crypto_stream_chacha20_ietf_xor_ic(bytes, kZeros, kBufferBytes, kNonce,
                                         block_counter_, key_.data()) != 0) {
    fail(ErrorCode::kRng, "keystream generation failed");
  }
  block_counter_ += kBufferBytes / 64;
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    std::uint64_t w = 0;
    for (int b = 7; b >= 0; --b) {
      w = (w << 8) | bytes[8 * i + b];
    }
    buffer_[i] = w;
  }
  used_ = 0;
}

void ChaChaPrg::fill(std::span<std::uint64_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == buffer_.size()) {
      refill();
    }
    const std::size_t n = std::min(out.size() - pos, buffer_.size() - used_);
    std::copy_n(buffer_.begin() + used_, n, out.begin() + pos);
    used_ += n;
    pos += n;
  }
}

}  // namespace ab2h
