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

// Interactive two-server protocols. Every function here must be called by
// both servers with the same public arguments, in the same order.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ab2h/bitvec.h"
#include "ab2h/helper.h"
#include "ab2h/session.h"
#include "ab2h/shares.h"

namespace ab2h {

inline constexpr std::size_t kCompareAndDepth = 63;

// Elementwise product. Setup: one cross-term round trip to the helper.
// Online: one exchange. With `truncate` the additive product shares are
// shifted by f before re-randomization (result within 1 ulp of
// truncate(a*b)); without it the product is exact.
ShareTensor helper_mult(const ShareTensor& a, const ShareTensor& b,
                        ProtocolSession& session, bool truncate = true);
ArithShare helper_mult(const ArithShare& a, const ArithShare& b,
                       ProtocolSession& session, bool truncate = true);

// s non-empty contiguous row blocks, none longer than ceil(m / s).
std::vector<std::pair<std::size_t, std::size_t>> split_rows(std::size_t m,
                                                            std::size_t s);

// Loads rows [begin, end) of the weight matrix.
using RowLoader = std::function<ShareTensor(std::size_t, std::size_t)>;

// truncate(W x) + bias, one block of rows at a time: per block one matrix
// cross-term round trip and one exchange, and the block's buffers are gone
// before the next block is loaded. `bias` may be null.
ShareTensor secure_matmul(std::size_t m, std::size_t n, const RowLoader& load,
                          const ShareTensor& x, const ShareTensor* bias,
                          std::size_t splits, ProtocolSession& session);
ShareTensor secure_matmul(const ShareTensor& w, const ShareTensor& x,
                          const ShareTensor* bias, std::size_t splits,
                          ProtocolSession& session);

// XOR-shared AND triples fetched from the helper in one round trip.
class TriplePool {
 public:
  TriplePool() = default;
  TriplePool(TripleShares shares);

  // One AND_TRIPLE_REQ for `count` triples.
  static TriplePool fetch(ProtocolSession& session, std::size_t count);

  std::size_t remaining() const noexcept { return size_ - used_; }
  // Throws TripleExhausted.
  TripleShares take(std::size_t n);

 private:
  TripleShares shares_;
  std::size_t size_ = 0;
  std::size_t used_ = 0;
};

// One layer of AND gates on XOR shares: one exchange of masked bits.
BitVector and_gates(const BitVector& x, const BitVector& y, TriplePool& pool,
                    ProtocolSession& session);

// Bit j is 1 iff x[j] >= 0. 63 AND layers, batched across the vector,
// consuming 63 * size triples from `pool`.
BoolShare drelu(const ShareTensor& x, TriplePool& pool,
                ProtocolSession& session);
// Fetches its own triples first.
BoolShare drelu(const ShareTensor& x, ProtocolSession& session);

// Arithmetic shares of XOR-shared bits: b = b0 + b1 - 2 b0 b1 with the
// product from one exact helper_mult. `scaled` lifts the result to 2^f
// (encode(0.0) / encode(1.0)); otherwise it is the integer 0 or 1.
ShareTensor bit_to_arith(const BoolShare& b, ProtocolSession& session,
                         bool scaled = true);

// max(0, x) within 1 ulp. Fetches 63 * size triples in one round trip.
ShareTensor secure_relu(const ShareTensor& x, ProtocolSession& session);
ArithShare secure_relu(const ArithShare& x, ProtocolSession& session);

// XOR-shared one-hot vector marking the maximum; ties go to the lowest
// index. Single-elimination tournament over adjacent pairs. Requires
// |v[j]| < 2^(62 - f) so differences cannot wrap.
BoolShare secure_argmax(const ShareTensor& v, ProtocolSession& session);

// The pairing schedule of the tournament: per round, the number of
// comparisons and the number of MUX gates they need.
struct ArgmaxRound {
  std::size_t compares = 0;
  std::size_t mux_gates = 0;
};
std::vector<ArgmaxRound> argmax_schedule(std::size_t k);

}  // namespace ab2h
