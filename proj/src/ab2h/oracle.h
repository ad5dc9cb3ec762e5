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

// Plaintext references: fixed-point inference with the same codec and
// truncation rule the protocols use, a floating-point twin, and closed-form
// message counts derived from the wire format alone.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ab2h/ring.h"

namespace ab2h::oracle {

struct ClearLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  bool relu = false;
  std::vector<double> weights;  // out_dim x in_dim, row-major
  std::vector<double> bias;     // out_dim
};

using ClearNetwork = std::vector<ClearLayer>;

// Throws DimsMismatch when layers do not chain or arrays are misshapen.
void check_network(const ClearNetwork& net);

// truncate(W x) + b, then max(0, .) if relu.
std::vector<Ring> fixed_layer(std::span<const Ring> w, std::size_t out_dim,
                              std::size_t in_dim, std::span<const Ring> x,
                              std::span<const Ring> b, bool relu,
                              const FixedPointConfig& fp);

// Lowest index among equal maxima (signed comparison).
std::size_t argmax(std::span<const Ring> v);
std::size_t argmax(std::span<const double> v);

struct FixedResult {
  std::vector<Ring> logits;
  std::size_t label = 0;
};
struct FloatResult {
  std::vector<double> logits;
  std::size_t label = 0;
};

FixedResult clear_infer(const ClearNetwork& net, std::span<const double> input,
                        const FixedPointConfig& fp);
FloatResult float_infer(const ClearNetwork& net,
                        std::span<const double> input);

// Difference between the two largest logits.
double top2_gap(std::span<const double> v);

struct FractionalBitsRow {
  int fractional_bits = 0;
  double mean_l2 = 0;      // mean over inputs of ||fixed - float||_2
  double agreement = 0;    // fraction of inputs with equal labels
};
std::vector<FractionalBitsRow> error_vs_fractional_bits(
    const ClearNetwork& net, const std::vector<std::vector<double>>& inputs,
    std::span<const int> f_list);

// Expected traffic of one compute server. Peer counts are per direction
// (both directions are equal); bytes include the 20-byte frame headers.
struct Counts {
  std::uint64_t peer_exchanges = 0;
  std::uint64_t peer_bytes = 0;
  std::uint64_t cross_term_round_trips = 0;
  std::uint64_t triple_round_trips = 0;
  std::uint64_t helper_bytes_out = 0;
  std::uint64_t helper_bytes_in = 0;
  std::uint64_t triples = 0;

  std::uint64_t helper_round_trips() const {
    return cross_term_round_trips + triple_round_trips;
  }
  Counts& operator+=(const Counts& o);
  friend Counts operator+(Counts a, const Counts& b) { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;
  std::string to_text() const;
};

Counts count_exchange_words(std::uint64_t words);
Counts count_and_layer(std::uint64_t gates);
Counts count_triple_fetch(std::uint64_t triples);
Counts count_helper_mult(std::uint64_t n);
Counts count_matmul(std::uint64_t m, std::uint64_t n, std::uint64_t splits);
Counts count_drelu(std::uint64_t n);  // triples not included
Counts count_bit_to_arith(std::uint64_t n);
Counts count_relu(std::uint64_t n);
Counts count_argmax(std::uint64_t k);
Counts count_layer(std::uint64_t m, std::uint64_t n, std::uint64_t splits,
                   bool relu);

struct LayerShape {
  std::uint64_t in_dim, out_dim, splits;
  bool relu;
};
Counts count_network(std::span<const LayerShape> layers);

}  // namespace ab2h::oracle
