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

#include "ab2h/shares.h"

#include <string>

#include "ab2h/error.h"
#include "ab2h/net/messages.h"
#include "ab2h/session.h"

namespace ab2h {
namespace {

void check_same_party(Party a, Party b) {
  if (a != b) {
    fail(ErrorCode::kShareMismatch, "shares belong to different parties");
  }
}

void check_compatible(const ShareTensor& a, const ShareTensor& b) {
  check_same_party(a.party(), b.party());
  if (!(a.fixed_point() == b.fixed_point())) {
    fail(ErrorCode::kShareMismatch, "shares use different fractional bits");
  }
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kDimsMismatch,
         "tensor shapes differ: " + std::to_string(a.rows()) + "x" +
             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
             "x" + std::to_string(b.cols()));
  }
}

Ring broadcast_at(std::span<const Ring> c, std::size_t i, std::size_t n) {
  if (c.size() == 1) return c[0];
  if (c.size() != n) {
    fail(ErrorCode::kDimsMismatch, "constant vector length " +
                                       std::to_string(c.size()) +
                                       " does not match " + std::to_string(n));
  }
  return c[i];
}

}  // namespace

ShareTensor::ShareTensor(Party party, const FixedPointConfig& fp,
                         std::size_t rows, std::size_t cols)
    : party_(party), fp_(fp), rows_(rows), cols_(cols),
      pub_(rows * cols), priv_(rows * cols) {}

ShareTensor ShareTensor::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    fail(ErrorCode::kDimsMismatch, "row slice out of range");
  }
  ShareTensor out(party_, fp_, end - begin, cols_);
  std::copy(pub_.begin() + begin * cols_, pub_.begin() + end * cols_,
            out.pub_.begin());
  std::copy(priv_.begin() + begin * cols_, priv_.begin() + end * cols_,
            out.priv_.begin());
  return out;
}

std::pair<ArithShare, ArithShare> make_shares(Ring x, RandomSource& rng) {
  Ring d[2];
  rng.fill(d);
  const Ring pub = x + d[0] + d[1];
  return {ArithShare{pub, d[0], Party::k0}, ArithShare{pub, d[1], Party::k1}};
}

std::pair<ShareTensor, ShareTensor> make_shares(std::span<const Ring> values,
                                                std::size_t rows,
                                                std::size_t cols,
                                                const FixedPointConfig& fp,
                                                RandomSource& rng) {
  if (values.size() != rows * cols) {
    fail(ErrorCode::kDimsMismatch, "value count does not match dims");
  }
  ShareTensor s0(Party::k0, fp, rows, cols);
  ShareTensor s1(Party::k1, fp, rows, cols);
  rng.fill(s0.priv().span());
  rng.fill(s1.priv().span());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Ring pub = values[i] + s0.priv()[i] + s1.priv()[i];
    s0.pub()[i] = pub;
    s1.pub()[i] = pub;
  }
  return {std::move(s0), std::move(s1)};
}

Ring reconstruct_arith(const ArithShare& s0, const ArithShare& s1) {
  if (s0.party == s1.party) {
    fail(ErrorCode::kShareMismatch, "both shares belong to the same server");
  }
  if (s0.delta_pub != s1.delta_pub) {
    fail(ErrorCode::kShareMismatch, "public components differ");
  }
  return s0.delta_pub - s0.delta_priv - s1.delta_priv;
}

std::vector<Ring> reconstruct_arith(const ShareTensor& s0,
                                    const ShareTensor& s1) {
  if (s0.size() != s1.size()) {
    fail(ErrorCode::kDimsMismatch, "tensor sizes differ");
  }
  if (s0.party() == s1.party()) {
    fail(ErrorCode::kShareMismatch, "both shares belong to the same server");
  }
  std::vector<Ring> out(s0.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = reconstruct_arith(s0.at(i), s1.at(i));
  }
  return out;
}

ArithShare add_local(const ArithShare& a, const ArithShare& b) {
  check_same_party(a.party, b.party);
  return {a.delta_pub + b.delta_pub, a.delta_priv + b.delta_priv, a.party};
}

ArithShare sub_local(const ArithShare& a, const ArithShare& b) {
  check_same_party(a.party, b.party);
  return {a.delta_pub - b.delta_pub, a.delta_priv - b.delta_priv, a.party};
}

ShareTensor add_local(const ShareTensor& a, const ShareTensor& b) {
  check_compatible(a, b);
  ShareTensor out(a.party(), a.fixed_point(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.pub()[i] = a.pub()[i] + b.pub()[i];
    out.priv()[i] = a.priv()[i] + b.priv()[i];
  }
  return out;
}

ShareTensor sub_local(const ShareTensor& a, const ShareTensor& b) {
  check_compatible(a, b);
  ShareTensor out(a.party(), a.fixed_point(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.pub()[i] = a.pub()[i] - b.pub()[i];
    out.priv()[i] = a.priv()[i] - b.priv()[i];
  }
  return out;
}

ArithShare constant_add(const ArithShare& a, Ring c) {
  return {a.delta_pub + c, a.delta_priv, a.party};
}

ShareTensor constant_add(const ShareTensor& a, std::span<const Ring> c) {
  ShareTensor out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.pub()[i] += broadcast_at(c, i, a.size());
  }
  return out;
}

ArithShare scale_local(const ArithShare& a, Ring c) {
  return {a.delta_pub * c, a.delta_priv * c, a.party};
}

ShareTensor scale_local(const ShareTensor& a, Ring c) {
  ShareTensor out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.pub()[i] *= c;
    out.priv()[i] *= c;
  }
  return out;
}

AdditiveShare arith_to_additive(const ArithShare& a) {
  const Ring i = static_cast<Ring>(index_of(a.party));
  return {i * a.delta_pub - a.delta_priv, a.party};
}

RingBuffer arith_to_additive(const ShareTensor& a) {
  const Ring i = static_cast<Ring>(index_of(a.party()));
  RingBuffer y(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    y[k] = i * a.pub()[k] - a.priv()[k];
  }
  return y;
}

RingBuffer exchange_public_halves(ProtocolSession& session,
                                  std::span<const Ring> halves,
                                  std::uint16_t block, std::uint16_t blocks) {
  std::vector<std::uint8_t> reply;
  {
    const auto payload = net::encode_public_halves(block, blocks, halves);
    MeterCharge charge(slots_for_bytes(payload.size()));
    reply = session.exchange(payload);
  }
  MeterCharge charge(slots_for_bytes(reply.size()));
  const net::OnlineExchange in = net::decode_online_exchange(reply);
  if (in.kind != net::ExchangeKind::kPublicHalves) {
    fail(ErrorCode::kProtocol, "peer sent masked bits, expected ring halves");
  }
  if (in.block != block || in.blocks != blocks) {
    fail(ErrorCode::kSplitMismatch,
         "peer is at block " + std::to_string(in.block) + "/" +
             std::to_string(in.blocks) + ", we are at " +
             std::to_string(block) + "/" + std::to_string(blocks));
  }
  if (in.words.size() != halves.size()) {
    fail(ErrorCode::kShareMismatch,
         "peer sent " + std::to_string(in.words.size()) +
             " public halves, expected " + std::to_string(halves.size()));
  }
  RingBuffer out(in.words.size());
  std::copy(in.words.begin(), in.words.end(), out.begin());
  return out;
}

ShareTensor additive_to_arith(std::span<const Ring> y, std::size_t rows,
                              std::size_t cols, ProtocolSession& session) {
  if (y.size() != rows * cols) {
    fail(ErrorCode::kDimsMismatch, "additive share count does not match dims");
  }
  ShareTensor out(session.party(), session.fixed_point(), rows, cols);
  session.rng().fill(out.priv().span());
  RingBuffer mine(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    mine[i] = y[i] + out.priv()[i];
  }
  const RingBuffer theirs = exchange_public_halves(session, mine);
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.pub()[i] = mine[i] + theirs[i];
  }
  return out;
}

ArithShare additive_to_arith(const AdditiveShare& y, ProtocolSession& session) {
  if (y.party != session.party()) {
    fail(ErrorCode::kShareMismatch, "share does not belong to this party");
  }
  const Ring v = y.y;
  return additive_to_arith({&v, 1}, 1, 1, session).at(0);
}

ShareTensor constant_mul(const ShareTensor& a, std::span<const Ring> c,
                         ProtocolSession& session) {
  if (a.party() != session.party()) {
    fail(ErrorCode::kShareMismatch, "share does not belong to this party");
  }
  const int f = session.fixed_point().fractional_bits();
  const Ring i = static_cast<Ring>(session.party_index());
  RingBuffer y(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Ring ck = broadcast_at(c, k, a.size());
    const Ring scaled_pub = a.pub()[k] * ck;
    const Ring scaled_priv = a.priv()[k] * ck;
    y[k] = truncate(i * scaled_pub - scaled_priv, f);
  }
  return additive_to_arith(y, a.rows(), a.cols(), session);
}

ArithShare constant_mul(const ArithShare& a, Ring c, ProtocolSession& session) {
  ShareTensor t(a.party, session.fixed_point(), 1, 1);
  t.set(0, a);
  return constant_mul(t, {&c, 1}, session).at(0);
}

std::vector<std::uint8_t> reconstruct_bool(const BoolShare& b0,
                                           const BoolShare& b1) {
  if (b0.bits.size() != b1.bits.size()) {
    fail(ErrorCode::kLengthMismatch,
         "boolean shares have " + std::to_string(b0.bits.size()) + " and " +
             std::to_string(b1.bits.size()) + " bits");
  }
  std::vector<std::uint8_t> out(b0.bits.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((b0.bits[i] ^ b1.bits[i]) & 1u);
  }
  return out;
}

}  // namespace ab2h
