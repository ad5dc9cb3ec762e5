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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ab2h/error.h"

namespace ab2h {

// Fixed-length packed bit vector, LSB-first within 64-bit words. Tail bits
// past size() are kept zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false)
      : size_(n), words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    clear_tail();
  }

  static BitVector from_bytes(std::span<const std::uint8_t> bytes,
                              std::size_t n) {
    if (bytes.size() < (n + 7) / 8) {
      fail(ErrorCode::kLengthMismatch, "packed bit buffer too short");
    }
    BitVector v(n);
    for (std::size_t i = 0; i < (n + 7) / 8; ++i) {
      v.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
    }
    v.clear_tail();
    return v;
  }

  // Appends ceil(size/8) bytes.
  void append_bytes(std::vector<std::uint8_t>& out) const {
    for (std::size_t i = 0; i < (size_ + 7) / 8; ++i) {
      out.push_back(static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8))));
    }
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }

  bool get(std::size_t i) const noexcept {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  void set(std::size_t i, bool v) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }

  std::span<std::uint64_t> words() noexcept { return words_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  BitVector& operator^=(const BitVector& o) {
    check(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  BitVector& operator&=(const BitVector& o) {
    check(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }
  friend BitVector operator&(BitVector a, const BitVector& b) {
    a &= b;
    return a;
  }
  void flip() noexcept {
    for (auto& w : words_) w = ~w;
    clear_tail();
  }

  // Bits [begin, begin + n).
  BitVector slice(std::size_t begin, std::size_t n) const {
    BitVector out(n);
    for (std::size_t i = 0; i < n; ++i) out.set(i, get(begin + i));
    return out;
  }
  void append(const BitVector& o) {
    const std::size_t old = size_;
    resize(size_ + o.size_);
    for (std::size_t i = 0; i < o.size_; ++i) set(old + i, o.get(i));
  }
  void resize(std::size_t n) {
    size_ = n;
    words_.resize((n + 63) / 64, 0);
    clear_tail();
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void check(const BitVector& o) const {
    if (o.size_ != size_) {
      fail(ErrorCode::kLengthMismatch, "bit vector lengths differ");
    }
  }
  void clear_tail() noexcept {
    if (size_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace ab2h
