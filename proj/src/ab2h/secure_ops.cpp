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

#include "ab2h/secure_ops.h"

#include <limits>
#include <string>

#include "ab2h/error.h"
#include "ab2h/net/messages.h"

namespace ab2h {
namespace {

using net::MsgType;

void check_session_party(Party p, const ProtocolSession& s) {
  if (p != s.party()) {
    fail(ErrorCode::kShareMismatch, "share does not belong to this party");
  }
}

std::vector<Ring> ask_cross_term(ProtocolSession& s, net::CrossTermMode mode,
                                 std::size_t rows, std::size_t cols,
                                 std::span<const Ring> lhs,
                                 std::span<const Ring> rhs,
                                 std::uint16_t block = 0,
                                 std::uint16_t blocks = 1) {
  std::vector<std::uint8_t> reply;
  {
    const auto payload = net::encode_cross_term_req(
        mode, block, blocks, static_cast<std::uint32_t>(rows),
        static_cast<std::uint32_t>(cols), lhs, rhs);
    MeterCharge charge(slots_for_bytes(payload.size()));
    reply = s.call_helper(MsgType::kCrossTermReq, payload);
  }
  MeterCharge charge(slots_for_bytes(reply.size()));
  auto values = net::decode_cross_term_resp(reply).values;
  if (values.size() != rows) {
    fail(ErrorCode::kProtocol, "helper returned " +
                                   std::to_string(values.size()) +
                                   " cross terms, expected " +
                                   std::to_string(rows));
  }
  return values;
}

std::pair<BitVector, BitVector> exchange_masked(ProtocolSession& s,
                                                const BitVector& d,
                                                const BitVector& e) {
  net::OnlineExchange out;
  out.kind = net::ExchangeKind::kMaskedBits;
  out.d = d;
  out.e = e;
  const auto reply = s.exchange(net::encode_payload(out));
  net::OnlineExchange in = net::decode_online_exchange(reply);
  if (in.kind != net::ExchangeKind::kMaskedBits) {
    fail(ErrorCode::kProtocol, "peer sent ring halves, expected masked bits");
  }
  if (in.block != 0 || in.blocks != 1) {
    fail(ErrorCode::kSplitMismatch, "unexpected block numbering on AND layer");
  }
  if (in.d.size() != d.size()) {
    fail(ErrorCode::kShareMismatch,
         "peer masked " + std::to_string(in.d.size()) + " gates, expected " +
             std::to_string(d.size()));
  }
  return {std::move(in.d), std::move(in.e)};
}

BoolShare from_bits(const BitVector& v, Party p) {
  BoolShare b{std::vector<std::uint8_t>(v.size()), p};
  for (std::size_t i = 0; i < v.size(); ++i) b.bits[i] = v.get(i);
  return b;
}

BitVector bit_plane(const RingBuffer& y, int k) {
  BitVector v(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) v.set(j, (y[j] >> k) & 1u);
  return v;
}

}  // namespace

ShareTensor helper_mult(const ShareTensor& a, const ShareTensor& b,
                        ProtocolSession& session, bool truncate) {
  check_session_party(a.party(), session);
  check_session_party(b.party(), session);
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimsMismatch, "operands differ in length");
  }
  const std::size_t n = a.size();
  const std::vector<Ring> dab =
      ask_cross_term(session, net::CrossTermMode::kElementwise, n, 1,
                     a.priv().span(), b.priv().span());
  const Ring i = static_cast<Ring>(session.party_index());
  const int f = session.fixed_point().fractional_bits();
  RingBuffer z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Ring pa = a.pub()[k], pb = b.pub()[k];
    Ring v = i * pa * pb - pa * b.priv()[k] - pb * a.priv()[k] + dab[k];
    z[k] = truncate ? ab2h::truncate(v, f) : v;
  }
  return additive_to_arith(z, a.rows(), a.cols(), session);
}

ArithShare helper_mult(const ArithShare& a, const ArithShare& b,
                       ProtocolSession& session, bool truncate) {
  ShareTensor ta(a.party, session.fixed_point(), 1);
  ShareTensor tb(b.party, session.fixed_point(), 1);
  ta.set(0, a);
  tb.set(0, b);
  return helper_mult(ta, tb, session, truncate).at(0);
}

std::vector<std::pair<std::size_t, std::size_t>> split_rows(std::size_t m,
                                                            std::size_t s) {
  if (s < 1 || s > m) {
    fail(ErrorCode::kConfig, "split count " + std::to_string(s) +
                                 " outside [1, " + std::to_string(m) + "]");
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t q = m / s, extra = m % s;
  std::size_t at = 0;
  for (std::size_t b = 0; b < s; ++b) {
    const std::size_t len = q + (b < extra ? 1 : 0);
    out.emplace_back(at, at + len);
    at += len;
  }
  return out;
}

ShareTensor secure_matmul(std::size_t m, std::size_t n, const RowLoader& load,
                          const ShareTensor& x, const ShareTensor* bias,
                          std::size_t splits, ProtocolSession& session) {
  check_session_party(x.party(), session);
  if (x.size() != n) {
    fail(ErrorCode::kDimsMismatch, "input has " + std::to_string(x.size()) +
                                       " elements, weights expect " +
                                       std::to_string(n));
  }
  if (bias != nullptr && bias->size() != m) {
    fail(ErrorCode::kDimsMismatch, "bias has " + std::to_string(bias->size()) +
                                       " elements, expected " +
                                       std::to_string(m));
  }
  if (splits > std::numeric_limits<std::uint16_t>::max()) {
    fail(ErrorCode::kConfig, "at most 65535 splits");
  }
  const auto blocks = split_rows(m, splits);
  const int f = session.fixed_point().fractional_bits();

  ShareTensor out(session.party(), session.fixed_point(), m, 1);
  // i * Delta_x - delta_x, the additive share of x.
  const RingBuffer xa = arith_to_additive(x);

  for (std::size_t blk = 0; blk < blocks.size(); ++blk) {
    const auto [r0, r1] = blocks[blk];
    const std::size_t rows = r1 - r0;
    RingBuffer z(rows);
    {
      const ShareTensor w = load(r0, r1);
      check_session_party(w.party(), session);
      if (w.rows() != rows || w.cols() != n) {
        fail(ErrorCode::kDimsMismatch, "weight block has the wrong shape");
      }
      const std::vector<Ring> dwx =
          ask_cross_term(session, net::CrossTermMode::kMatVec, rows, n,
                         w.priv().span(), x.priv().span(),
                         static_cast<std::uint16_t>(blk),
                         static_cast<std::uint16_t>(blocks.size()));
      for (std::size_t r = 0; r < rows; ++r) {
        const Ring* wp = w.pub().data() + r * n;
        const Ring* wq = w.priv().data() + r * n;
        Ring acc = dwx[r];
        for (std::size_t j = 0; j < n; ++j) {
          acc += wp[j] * xa[j] - wq[j] * x.pub()[j];
        }
        z[r] = truncate(acc, f);
      }
    }
    RingBuffer mask(rows);
    session.rng().fill(mask.span());
    for (std::size_t r = 0; r < rows; ++r) z[r] += mask[r];
    const RingBuffer theirs = exchange_public_halves(
        session, z, static_cast<std::uint16_t>(blk),
        static_cast<std::uint16_t>(blocks.size()));
    for (std::size_t r = 0; r < rows; ++r) {
      Ring pub = z[r] + theirs[r];
      Ring priv = mask[r];
      if (bias != nullptr) {
        pub += bias->pub()[r0 + r];
        priv += bias->priv()[r0 + r];
      }
      out.pub()[r0 + r] = pub;
      out.priv()[r0 + r] = priv;
    }
  }
  return out;
}

ShareTensor secure_matmul(const ShareTensor& w, const ShareTensor& x,
                          const ShareTensor* bias, std::size_t splits,
                          ProtocolSession& session) {
  return secure_matmul(
      w.rows(), w.cols(),
      [&w](std::size_t b, std::size_t e) { return w.slice_rows(b, e); }, x,
      bias, splits, session);
}

TriplePool::TriplePool(TripleShares shares)
    : shares_(std::move(shares)), size_(shares_.a.size()) {}

TriplePool TriplePool::fetch(ProtocolSession& session, std::size_t count) {
  if (count == 0) return TriplePool();
  const auto reply = session.call_helper(
      MsgType::kAndTripleReq, net::encode_payload(net::AndTripleReq{count}));
  auto resp = net::decode_and_triple_resp(reply);
  if (resp.a.size() != count) {
    fail(ErrorCode::kProtocol, "helper dealt " +
                                   std::to_string(resp.a.size()) +
                                   " triples, expected " +
                                   std::to_string(count));
  }
  session.note_triples(count);
  return TriplePool(
      TripleShares{std::move(resp.a), std::move(resp.b), std::move(resp.c)});
}

TripleShares TriplePool::take(std::size_t n) {
  if (n > remaining()) {
    fail(ErrorCode::kTripleExhausted,
         "need " + std::to_string(n) + " triples, " +
             std::to_string(remaining()) + " left");
  }
  TripleShares out;
  if (used_ == 0 && n == size_) {
    out = std::move(shares_);
  } else {
    out = {shares_.a.slice(used_, n), shares_.b.slice(used_, n),
           shares_.c.slice(used_, n)};
  }
  used_ += n;
  return out;
}

BitVector and_gates(const BitVector& x, const BitVector& y, TriplePool& pool,
                    ProtocolSession& session) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kLengthMismatch, "AND operands differ in length");
  }
  const TripleShares t = pool.take(x.size());
  BitVector d = x ^ t.a;
  BitVector e = y ^ t.b;
  const auto [d1, e1] = exchange_masked(session, d, e);
  d ^= d1;
  e ^= e1;
  BitVector z = t.c ^ (d & t.b) ^ (e & t.a);
  if (session.party_index() == 0) z ^= d & e;
  return z;
}

BoolShare drelu(const ShareTensor& x, TriplePool& pool,
                ProtocolSession& session) {
  check_session_party(x.party(), session);
  const std::size_t n = x.size();
  // Sum the two additive shares with a ripple-carry adder. Operand A is
  // Y_0 (party 0's bits, party 1 holds zeros), operand B is Y_1.
  const RingBuffer y = arith_to_additive(x);
  const bool first = session.party_index() == 0;
  BitVector carry(n);
  for (int k = 0; k < static_cast<int>(kCompareAndDepth); ++k) {
    const BitVector own = bit_plane(y, k);
    BitVector a = first ? own : BitVector(n);
    BitVector b = first ? BitVector(n) : own;
    a ^= carry;
    b ^= carry;
    // carry' = carry ^ ((a ^ carry) & (b ^ carry)), the majority function.
    carry ^= and_gates(a, b, pool, session);
  }
  BitVector msb = bit_plane(y, 63) ^ carry;
  if (first) msb.flip();
  return from_bits(msb, session.party());
}

BoolShare drelu(const ShareTensor& x, ProtocolSession& session) {
  TriplePool pool = TriplePool::fetch(session, kCompareAndDepth * x.size());
  return drelu(x, pool, session);
}

ShareTensor bit_to_arith(const BoolShare& b, ProtocolSession& session,
                         bool scaled) {
  check_session_party(b.party, session);
  const std::size_t n = b.bits.size();
  const int me = session.party_index();
  // Each party deals arithmetic shares of its own XOR share bit: it keeps
  // the mask, the other side's mask is zero, and Delta is swapped.
  RingBuffer mask(n);
  session.rng().fill(mask.span());
  RingBuffer pub(n);
  for (std::size_t j = 0; j < n; ++j) pub[j] = (b.bits[j] & 1u) + mask[j];
  const RingBuffer theirs = exchange_public_halves(session, pub);

  ShareTensor s0(session.party(), session.fixed_point(), n);
  ShareTensor s1(session.party(), session.fixed_point(), n);
  for (std::size_t j = 0; j < n; ++j) {
    s0.pub()[j] = me == 0 ? pub[j] : theirs[j];
    s1.pub()[j] = me == 1 ? pub[j] : theirs[j];
    s0.priv()[j] = me == 0 ? mask[j] : 0;
    s1.priv()[j] = me == 1 ? mask[j] : 0;
  }
  const ShareTensor p = helper_mult(s0, s1, session, /*truncate=*/false);
  ShareTensor out = sub_local(add_local(s0, s1), scale_local(p, 2));
  if (scaled) out = scale_local(out, session.fixed_point().one());
  return out;
}

ShareTensor secure_relu(const ShareTensor& x, ProtocolSession& session) {
  const BoolShare nonneg = drelu(x, session);
  const ShareTensor select = bit_to_arith(nonneg, session, /*scaled=*/true);
  return helper_mult(x, select, session, /*truncate=*/true);
}

ArithShare secure_relu(const ArithShare& x, ProtocolSession& session) {
  ShareTensor t(x.party, session.fixed_point(), 1);
  t.set(0, x);
  return secure_relu(t, session).at(0);
}

std::vector<ArgmaxRound> argmax_schedule(std::size_t k) {
  // Candidate j covers original indices [lo_j, hi_j); only the widths
  // matter for counting.
  std::vector<std::size_t> width(k, 1);
  std::vector<ArgmaxRound> rounds;
  while (width.size() > 1) {
    ArgmaxRound r;
    std::vector<std::size_t> next;
    for (std::size_t j = 0; j + 1 < width.size(); j += 2) {
      r.compares += 1;
      r.mux_gates += width[j] + width[j + 1];
      next.push_back(width[j] + width[j + 1]);
    }
    if (width.size() % 2 == 1) next.push_back(width.back());
    rounds.push_back(r);
    width.swap(next);
  }
  return rounds;
}

BoolShare secure_argmax(const ShareTensor& v, ProtocolSession& session) {
  check_session_party(v.party(), session);
  const std::size_t k = v.size();
  if (k == 0) fail(ErrorCode::kEmptyInput, "argmax of an empty vector");
  const bool first = session.party_index() == 0;

  struct Candidate {
    std::size_t lo, hi;
    BitVector onehot;  // our XOR share over [lo, hi)
  };
  std::vector<Candidate> cand;
  for (std::size_t j = 0; j < k; ++j) {
    BitVector one(1);
    one.set(0, first);
    cand.push_back({j, j + 1, std::move(one)});
  }
  if (k == 1) return from_bits(cand[0].onehot, session.party());

  std::size_t triples = 0;
  for (const auto& r : argmax_schedule(k)) {
    triples += kCompareAndDepth * r.compares + r.mux_gates;
  }
  TriplePool pool = TriplePool::fetch(session, triples);

  ShareTensor values = v;
  while (cand.size() > 1) {
    const std::size_t pairs = cand.size() / 2;
    ShareTensor u(session.party(), session.fixed_point(), pairs);
    ShareTensor w(session.party(), session.fixed_point(), pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
      u.set(j, values.at(2 * j));
      w.set(j, values.at(2 * j + 1));
    }
    const ShareTensor diff = sub_local(u, w);
    // b = 1 iff u >= w; u always holds the lower indices.
    const BoolShare b = drelu(diff, pool, session);
    const ShareTensor braw = bit_to_arith(b, session, /*scaled=*/false);
    const ShareTensor best =
        add_local(helper_mult(braw, diff, session, /*truncate=*/false), w);

    // One-hot selection: i_w ^ (b & (i_u ^ i_w)) over [lo_u, hi_w).
    BitVector sel, mixed, base;
    for (std::size_t j = 0; j < pairs; ++j) {
      const Candidate& cu = cand[2 * j];
      const Candidate& cw = cand[2 * j + 1];
      BitVector iu = cu.onehot, iw(cu.hi - cu.lo);
      iu.resize(cw.hi - cu.lo);
      iw.append(cw.onehot);
      BitVector bits(cw.hi - cu.lo, b.bits[j] & 1u);
      sel.append(bits);
      mixed.append(iu ^ iw);
      base.append(iw);
    }
    const BitVector picked = base ^ and_gates(sel, mixed, pool, session);

    std::vector<Candidate> next;
    ShareTensor next_values(session.party(), session.fixed_point(),
                            pairs + cand.size() % 2);
    std::size_t at = 0;
    for (std::size_t j = 0; j < pairs; ++j) {
      const std::size_t lo = cand[2 * j].lo, hi = cand[2 * j + 1].hi;
      next.push_back({lo, hi, picked.slice(at, hi - lo)});
      next_values.set(j, best.at(j));
      at += hi - lo;
    }
    if (cand.size() % 2 == 1) {
      next.push_back(std::move(cand.back()));
      next_values.set(pairs, values.at(values.size() - 1));
    }
    cand.swap(next);
    values = std::move(next_values);
  }
  return from_bits(cand[0].onehot, session.party());
}

}  // namespace ab2h
