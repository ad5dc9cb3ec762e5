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

// Share representations and the local / single-round operations on them.
//
// An arithmetic share of x held by party i is the pair (Delta, [delta]_i):
// Delta is public (identical at both servers) and
//
//     x = Delta - [delta]_0 - [delta]_1   (mod 2^64).
//
// Additive shares satisfy x = Y_0 + Y_1 and boolean shares b = b_0 ^ b_1.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ab2h/meter.h"
#include "ab2h/party.h"
#include "ab2h/random.h"
#include "ab2h/ring.h"

namespace ab2h {

class ProtocolSession;

struct ArithShare {
  Ring delta_pub = 0;
  Ring delta_priv = 0;
  Party party = Party::k0;

  friend bool operator==(const ArithShare&, const ArithShare&) = default;
};

struct AdditiveShare {
  Ring y = 0;
  Party party = Party::k0;

  friend bool operator==(const AdditiveShare&, const AdditiveShare&) = default;
};

struct BoolShare {
  std::vector<std::uint8_t> bits;  // one 0/1 entry per position
  Party party = Party::k0;

  friend bool operator==(const BoolShare&, const BoolShare&) = default;
};

// Row-major matrix (or column vector) of arithmetic shares, stored as one
// Delta array and one delta array.
class ShareTensor {
 public:
  ShareTensor(Party party, const FixedPointConfig& fp, std::size_t rows,
              std::size_t cols = 1);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  Party party() const noexcept { return party_; }
  const FixedPointConfig& fixed_point() const noexcept { return fp_; }

  RingBuffer& pub() noexcept { return pub_; }
  const RingBuffer& pub() const noexcept { return pub_; }
  RingBuffer& priv() noexcept { return priv_; }
  const RingBuffer& priv() const noexcept { return priv_; }

  ArithShare at(std::size_t i) const {
    return {pub_[i], priv_[i], party_};
  }
  void set(std::size_t i, const ArithShare& s) {
    pub_[i] = s.delta_pub;
    priv_[i] = s.delta_priv;
  }

  // Rows [begin, end) as a new tensor.
  ShareTensor slice_rows(std::size_t begin, std::size_t end) const;

  void release() {
    pub_.release();
    priv_.release();
    rows_ = cols_ = 0;
  }

 private:
  Party party_;
  FixedPointConfig fp_;
  std::size_t rows_;
  std::size_t cols_;
  RingBuffer pub_;
  RingBuffer priv_;
};

// Dealer side: fresh uniform [delta]_0, [delta]_1 and
// Delta = x + [delta]_0 + [delta]_1.
std::pair<ArithShare, ArithShare> make_shares(Ring x, RandomSource& rng);
std::pair<ShareTensor, ShareTensor> make_shares(std::span<const Ring> values,
                                                std::size_t rows,
                                                std::size_t cols,
                                                const FixedPointConfig& fp,
                                                RandomSource& rng);

// Throws ShareMismatch if the public components differ.
Ring reconstruct_arith(const ArithShare& s0, const ArithShare& s1);
std::vector<Ring> reconstruct_arith(const ShareTensor& s0,
                                    const ShareTensor& s1);

ArithShare add_local(const ArithShare& a, const ArithShare& b);
ArithShare sub_local(const ArithShare& a, const ArithShare& b);
ShareTensor add_local(const ShareTensor& a, const ShareTensor& b);
ShareTensor sub_local(const ShareTensor& a, const ShareTensor& b);

// Adds a public constant: only Delta moves.
ArithShare constant_add(const ArithShare& a, Ring c);
// `c` has one entry per element, or a single entry broadcast to all.
ShareTensor constant_add(const ShareTensor& a, std::span<const Ring> c);

// Multiplies every component by a public constant without truncating. Exact;
// used for integer scalings such as lifting a bit to 2^f.
ArithShare scale_local(const ArithShare& a, Ring c);
ShareTensor scale_local(const ShareTensor& a, Ring c);

// Y_i = i * Delta - [delta]_i, local.
AdditiveShare arith_to_additive(const ArithShare& a);
RingBuffer arith_to_additive(const ShareTensor& a);

// Re-randomizes additive shares into Delta/delta form in one exchange.
ArithShare additive_to_arith(const AdditiveShare& y, ProtocolSession& session);
ShareTensor additive_to_arith(std::span<const Ring> y, std::size_t rows,
                              std::size_t cols, ProtocolSession& session);

// Multiplication by a public fixed-point constant followed by truncation on
// the additive form, then one exchange to re-randomize. Result is within one
// unit in the last place of truncate(value * c).
ArithShare constant_mul(const ArithShare& a, Ring c, ProtocolSession& session);
ShareTensor constant_mul(const ShareTensor& a, std::span<const Ring> c,
                         ProtocolSession& session);

// Throws LengthMismatch on differing lengths.
std::vector<std::uint8_t> reconstruct_bool(const BoolShare& b0,
                                           const BoolShare& b1);

// Sends our halves [Delta_y]_i and returns the peer's, checking the echoed
// block numbering (SplitMismatch) and element count (ShareMismatch).
RingBuffer exchange_public_halves(ProtocolSession& session,
                                  std::span<const Ring> halves,
                                  std::uint16_t block = 0,
                                  std::uint16_t blocks = 1);

}  // namespace ab2h
