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

#include "ab2h/oracle.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ab2h/error.h"

namespace ab2h::oracle {
namespace {

// Sizes straight from the frame and payload layouts.
constexpr std::uint64_t kHeader = 20;
constexpr std::uint64_t kExchangeHead = 12;
constexpr std::uint64_t kCrossReqHead = 16;
constexpr std::uint64_t kCrossRespHead = 8;
constexpr std::uint64_t kTripleReq = 8;
constexpr std::uint64_t kTripleRespHead = 8;
constexpr std::uint64_t kAdderDepth = 63;

std::uint64_t packed(std::uint64_t bits) { return (bits + 7) / 8; }

Counts cross_term(std::uint64_t out_words, std::uint64_t in_words) {
  Counts c;
  c.cross_term_round_trips = 1;
  c.helper_bytes_out = kHeader + kCrossReqHead + 8 * in_words;
  c.helper_bytes_in = kHeader + kCrossRespHead + 8 * out_words;
  return c;
}

}  // namespace

void check_network(const ClearNetwork& net) {
  if (net.empty()) fail(ErrorCode::kDimsMismatch, "network has no layers");
  for (std::size_t k = 0; k < net.size(); ++k) {
    const auto& l = net[k];
    if (l.weights.size() != l.in_dim * l.out_dim ||
        l.bias.size() != l.out_dim) {
      fail(ErrorCode::kDimsMismatch,
           "layer " + std::to_string(k + 1) + " arrays do not match dims");
    }
    if (k > 0 && net[k - 1].out_dim != l.in_dim) {
      fail(ErrorCode::kDimsMismatch,
           "layer " + std::to_string(k + 1) + " does not chain");
    }
  }
}

std::vector<Ring> fixed_layer(std::span<const Ring> w, std::size_t out_dim,
                              std::size_t in_dim, std::span<const Ring> x,
                              std::span<const Ring> b, bool relu,
                              const FixedPointConfig& fp) {
  if (w.size() != out_dim * in_dim || x.size() != in_dim ||
      b.size() != out_dim) {
    fail(ErrorCode::kDimsMismatch, "fixed_layer operand shapes");
  }
  std::vector<Ring> y(out_dim);
  for (std::size_t i = 0; i < out_dim; ++i) {
    Ring acc = 0;
    for (std::size_t j = 0; j < in_dim; ++j) acc += w[i * in_dim + j] * x[j];
    Ring v = truncate(acc, fp) + b[i];
    if (relu && to_signed(v) < 0) v = 0;
    y[i] = v;
  }
  return y;
}

std::size_t argmax(std::span<const Ring> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (to_signed(v[i]) > to_signed(v[best])) best = i;
  }
  return best;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) -
                                  v.begin());
}

FixedResult clear_infer(const ClearNetwork& net, std::span<const double> input,
                        const FixedPointConfig& fp) {
  check_network(net);
  if (input.size() != net.front().in_dim) {
    fail(ErrorCode::kDimsMismatch, "input length does not match layer 1");
  }
  std::vector<Ring> x(input.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = encode(input[j], fp);
  for (const auto& l : net) {
    std::vector<Ring> w(l.weights.size()), b(l.bias.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = encode(l.weights[j], fp);
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = encode(l.bias[j], fp);
    x = fixed_layer(w, l.out_dim, l.in_dim, x, b, l.relu, fp);
  }
  FixedResult r;
  r.label = argmax(std::span<const Ring>(x));
  r.logits = std::move(x);
  return r;
}

FloatResult float_infer(const ClearNetwork& net,
                        std::span<const double> input) {
  check_network(net);
  if (input.size() != net.front().in_dim) {
    fail(ErrorCode::kDimsMismatch, "input length does not match layer 1");
  }
  std::vector<double> x(input.begin(), input.end());
  for (const auto& l : net) {
    std::vector<double> y(l.out_dim);
    for (std::size_t i = 0; i < l.out_dim; ++i) {
      double acc = l.bias[i];
      for (std::size_t j = 0; j < l.in_dim; ++j) {
        acc += l.weights[i * l.in_dim + j] * x[j];
      }
      y[i] = l.relu ? std::max(acc, 0.0) : acc;
    }
    x = std::move(y);
  }
  FloatResult r;
  r.label = argmax(std::span<const double>(x));
  r.logits = std::move(x);
  return r;
}

double top2_gap(std::span<const double> v) {
  if (v.size() < 2) return INFINITY;
  std::vector<double> s(v.begin(), v.end());
  std::partial_sort(s.begin(), s.begin() + 2, s.end(), std::greater<>());
  return s[0] - s[1];
}

std::vector<FractionalBitsRow> error_vs_fractional_bits(
    const ClearNetwork& net, const std::vector<std::vector<double>>& inputs,
    std::span<const int> f_list) {
  std::vector<FractionalBitsRow> rows;
  for (int f : f_list) {
    const FixedPointConfig fp(f);
    FractionalBitsRow row;
    row.fractional_bits = f;
    std::size_t agree = 0;
    for (const auto& in : inputs) {
      const auto fixed = clear_infer(net, in, fp);
      const auto flt = float_infer(net, in);
      double sq = 0;
      for (std::size_t i = 0; i < flt.logits.size(); ++i) {
        const double d = decode(fixed.logits[i], fp) - flt.logits[i];
        sq += d * d;
      }
      row.mean_l2 += std::sqrt(sq);
      agree += fixed.label == flt.label;
    }
    if (!inputs.empty()) {
      row.mean_l2 /= static_cast<double>(inputs.size());
      row.agreement =
          static_cast<double>(agree) / static_cast<double>(inputs.size());
    }
    rows.push_back(row);
  }
  return rows;
}

Counts& Counts::operator+=(const Counts& o) {
  peer_exchanges += o.peer_exchanges;
  peer_bytes += o.peer_bytes;
  cross_term_round_trips += o.cross_term_round_trips;
  triple_round_trips += o.triple_round_trips;
  helper_bytes_out += o.helper_bytes_out;
  helper_bytes_in += o.helper_bytes_in;
  triples += o.triples;
  return *this;
}

std::string Counts::to_text() const {
  std::ostringstream out;
  out << "peer_exchanges=" << peer_exchanges << "\npeer_bytes=" << peer_bytes
      << "\ncross_term_round_trips=" << cross_term_round_trips
      << "\ntriple_round_trips=" << triple_round_trips
      << "\nhelper_bytes_out=" << helper_bytes_out
      << "\nhelper_bytes_in=" << helper_bytes_in << "\ntriples=" << triples
      << '\n';
  return out.str();
}

Counts count_exchange_words(std::uint64_t words) {
  Counts c;
  c.peer_exchanges = 1;
  c.peer_bytes = kHeader + kExchangeHead + 8 * words;
  return c;
}

Counts count_and_layer(std::uint64_t gates) {
  Counts c;
  c.peer_exchanges = 1;
  c.peer_bytes = kHeader + kExchangeHead + 2 * packed(gates);
  return c;
}

Counts count_triple_fetch(std::uint64_t triples) {
  Counts c;
  if (triples == 0) return c;
  c.triple_round_trips = 1;
  c.triples = triples;
  c.helper_bytes_out = kHeader + kTripleReq;
  c.helper_bytes_in = kHeader + kTripleRespHead + 3 * packed(triples);
  return c;
}

Counts count_helper_mult(std::uint64_t n) {
  return cross_term(n, 2 * n) + count_exchange_words(n);
}

Counts count_matmul(std::uint64_t m, std::uint64_t n, std::uint64_t splits) {
  // Block sizes only enter through their sum, so the total is closed form.
  Counts c;
  c.cross_term_round_trips = splits;
  c.helper_bytes_out = splits * (kHeader + kCrossReqHead) + 8 * (m * n) +
                       8 * splits * n;
  c.helper_bytes_in = splits * (kHeader + kCrossRespHead) + 8 * m;
  c.peer_exchanges = splits;
  c.peer_bytes = splits * (kHeader + kExchangeHead) + 8 * m;
  return c;
}

Counts count_drelu(std::uint64_t n) {
  Counts c;
  for (std::uint64_t k = 0; k < kAdderDepth; ++k) c += count_and_layer(n);
  return c;
}

Counts count_bit_to_arith(std::uint64_t n) {
  return count_exchange_words(n) + count_helper_mult(n);
}

Counts count_relu(std::uint64_t n) {
  return count_triple_fetch(kAdderDepth * n) + count_drelu(n) +
         count_bit_to_arith(n) + count_helper_mult(n);
}

Counts count_argmax(std::uint64_t k) {
  Counts rounds;
  std::uint64_t triples = 0;
  // Candidates are runs of consecutive indices; pair neighbours, carry the
  // odd one out.
  std::vector<std::uint64_t> runs(k, 1);
  while (runs.size() > 1) {
    std::vector<std::uint64_t> merged;
    std::uint64_t compares = runs.size() / 2, gates = 0;
    for (std::size_t j = 0; 2 * j + 1 < runs.size(); ++j) {
      merged.push_back(runs[2 * j] + runs[2 * j + 1]);
      gates += merged.back();
    }
    if (runs.size() & 1) merged.push_back(runs.back());
    rounds += count_drelu(compares) + count_bit_to_arith(compares) +
              count_helper_mult(compares) + count_and_layer(gates);
    triples += kAdderDepth * compares + gates;
    runs = std::move(merged);
  }
  return count_triple_fetch(triples) + rounds;
}

Counts count_layer(std::uint64_t m, std::uint64_t n, std::uint64_t splits,
                   bool relu) {
  Counts c = count_matmul(m, n, splits);
  if (relu) c += count_relu(m);
  return c;
}

Counts count_network(std::span<const LayerShape> layers) {
  Counts c;
  for (const auto& l : layers) {
    c += count_layer(l.out_dim, l.in_dim, l.splits, l.relu);
  }
  if (!layers.empty()) c += count_argmax(layers.back().out_dim);
  return c;
}

}  // namespace ab2h::oracle
