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

// Payload schemas for every message type. The schemas are the structural
// privacy guarantee: requests to the helper have room for private (delta)
// components only, and server-to-server exchanges carry re-randomized public
// halves or Beaver-masked bits, never a raw private component.

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ab2h/bitvec.h"
#include "ab2h/error.h"
#include "ab2h/net/byteorder.h"
#include "ab2h/net/frame.h"

namespace ab2h::net {

enum class Role : std::uint8_t {
  kServer0 = 0,
  kServer1 = 1,
  kHelper = 2,
  kModelProvider = 3,
  kImageProvider = 4,
};

const char* role_name(Role role) noexcept;

enum class ByeReason : std::uint8_t {
  kNormal = 0x00,
  kVersionMismatch = 0x01,
  kFractionalBitsMismatch = 0x02,
  kUnexpectedRole = 0x03,
  kProtocolViolation = 0x04,
  kTopologyMismatch = 0x05,
  kSessionMismatch = 0x06,
  kSplitMismatch = 0x07,
  kDimsMismatch = 0x08,
};

enum class UploadKind : std::uint8_t {
  kInput = 0,
  kWeights = 1,
  kBias = 2,
};

enum class CrossTermMode : std::uint8_t {
  kElementwise = 1,  // lhs and rhs are both `rows` long
  kMatVec = 2,       // lhs is rows x cols, rhs is cols long
};

enum class ExchangeKind : std::uint8_t {
  kPublicHalves = 1,  // ring words: [Delta_y]_i halves or input Deltas
  kMaskedBits = 2,    // Beaver-masked (d, e) bit planes
};

struct Hello {
  Role role = Role::kServer0;
  std::uint8_t version = kProtocolVersion;
  std::uint8_t fractional_bits = 0;
  std::uint64_t topology = 0;  // digest of the network shape; 0 if unused
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct Bye {
  ByeReason reason = ByeReason::kNormal;
  friend bool operator==(const Bye&, const Bye&) = default;
};

struct ShareUpload {
  UploadKind kind = UploadKind::kInput;
  std::uint16_t layer = 0;
  std::uint32_t chunk = 0;
  std::uint32_t chunk_count = 1;
  std::vector<std::uint8_t> body;  // slice of a share file
  friend bool operator==(const ShareUpload&, const ShareUpload&) = default;
};

struct ShareAck {
  UploadKind kind = UploadKind::kInput;
  std::uint16_t layer = 0;
  friend bool operator==(const ShareAck&, const ShareAck&) = default;
};

struct CrossTermReq {
  CrossTermMode mode = CrossTermMode::kElementwise;
  std::uint16_t block = 0;  // split block, echoed like ONLINE_EXCHANGE
  std::uint16_t blocks = 1;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint64_t> lhs_delta;  // sender's private components
  std::vector<std::uint64_t> rhs_delta;
  friend bool operator==(const CrossTermReq&, const CrossTermReq&) = default;
};

struct CrossTermResp {
  std::vector<std::uint64_t> values;
  friend bool operator==(const CrossTermResp&, const CrossTermResp&) = default;
};

struct AndTripleReq {
  std::uint64_t count = 0;
  friend bool operator==(const AndTripleReq&, const AndTripleReq&) = default;
};

struct AndTripleResp {
  BitVector a, b, c;
  friend bool operator==(const AndTripleResp&, const AndTripleResp&) = default;
};

struct OnlineExchange {
  ExchangeKind kind = ExchangeKind::kPublicHalves;
  std::uint16_t block = 0;
  std::uint16_t blocks = 1;
  std::vector<std::uint64_t> words;  // kPublicHalves
  BitVector d, e;                    // kMaskedBits
  friend bool operator==(const OnlineExchange&,
                         const OnlineExchange&) = default;
};

struct OutputShare {
  std::vector<std::uint8_t> body;  // boolean share file
  friend bool operator==(const OutputShare&, const OutputShare&) = default;
};

// Fixed payload header sizes, used by the trace-count formulas.
inline constexpr std::size_t kHelloSize = 12;
inline constexpr std::size_t kByeSize = 1;
inline constexpr std::size_t kShareUploadHeaderSize = 12;
inline constexpr std::size_t kShareAckSize = 4;
inline constexpr std::size_t kCrossTermReqHeaderSize = 16;
inline constexpr std::size_t kCrossTermRespHeaderSize = 8;
inline constexpr std::size_t kAndTripleReqSize = 8;
inline constexpr std::size_t kAndTripleRespHeaderSize = 8;
inline constexpr std::size_t kOnlineExchangeHeaderSize = 12;

template <std::endian Host = std::endian::native>
class PayloadWriter {
 public:
  explicit PayloadWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void words(std::span<const std::uint64_t> ws) {
    const std::size_t at = out_.size();
    out_.resize(at + 8 * ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) {
      store_le<Host>(out_.data() + at + 8 * i, ws[i]);
    }
  }
  void bytes(std::span<const std::uint8_t> bs) {
    out_.insert(out_.end(), bs.begin(), bs.end());
  }
  void bits(const BitVector& v) { v.append_bytes(out_); }

 private:
  template <typename T>
  void put(T v) {
    const std::size_t at = out_.size();
    out_.resize(at + sizeof(T));
    store_le<Host>(out_.data() + at, v);
  }
  std::vector<std::uint8_t>& out_;
};

// Reads a payload; error offsets are reported relative to the frame start.
template <std::endian Host = std::endian::native>
class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return need(1), in_[pos_++]; }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::vector<std::uint64_t> words(std::size_t n) {
    if (n > remaining() / 8) {
      throw MalformedFrame(kFrameHeaderSize + in_.size(), "payload too short");
    }
    std::vector<std::uint64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = load_le<std::uint64_t, Host>(in_.data() + pos_ + 8 * i);
    }
    pos_ += 8 * n;
    return out;
  }
  std::vector<std::uint8_t> rest() {
    std::vector<std::uint8_t> out(in_.begin() + pos_, in_.end());
    pos_ = in_.size();
    return out;
  }
  BitVector bits(std::size_t n) {
    const std::size_t nbytes = (n + 7) / 8;
    need(nbytes);
    BitVector v = BitVector::from_bytes(in_.subspan(pos_, nbytes), n);
    pos_ += nbytes;
    return v;
  }
  void finish() const {
    if (pos_ != in_.size()) {
      throw MalformedFrame(kFrameHeaderSize + pos_, "trailing payload bytes");
    }
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw MalformedFrame(kFrameHeaderSize + in_.size(), "payload too short");
    }
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v = load_le<T, Host>(in_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Encoders

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const Hello& m) {
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(m.role));
  w.u8(m.version);
  w.u8(m.fractional_bits);
  w.u8(0);
  w.u64(m.topology);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const Bye& m) {
  return {static_cast<std::uint8_t>(m.reason)};
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const ShareUpload& m) {
  std::vector<std::uint8_t> out;
  out.reserve(kShareUploadHeaderSize + m.body.size());
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u8(0);
  w.u16(m.layer);
  w.u32(m.chunk);
  w.u32(m.chunk_count);
  w.bytes(m.body);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const ShareAck& m) {
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u8(0);
  w.u16(m.layer);
  return out;
}

// Span form so large operands are serialized without an intermediate copy.
template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_cross_term_req(
    CrossTermMode mode, std::uint16_t block, std::uint16_t blocks,
    std::uint32_t rows, std::uint32_t cols,
    std::span<const std::uint64_t> lhs_delta,
    std::span<const std::uint64_t> rhs_delta) {
  std::vector<std::uint8_t> out;
  out.reserve(kCrossTermReqHeaderSize +
              8 * (lhs_delta.size() + rhs_delta.size()));
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(mode));
  w.u8(0);
  w.u16(block);
  w.u16(blocks);
  w.u16(0);
  w.u32(rows);
  w.u32(cols);
  w.words(lhs_delta);
  w.words(rhs_delta);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const CrossTermReq& m) {
  return encode_cross_term_req<Host>(m.mode, m.block, m.blocks, m.rows,
                                     m.cols, m.lhs_delta,
                                     m.rhs_delta);
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const CrossTermResp& m) {
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u32(static_cast<std::uint32_t>(m.values.size()));
  w.u32(0);
  w.words(m.values);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const AndTripleReq& m) {
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u64(m.count);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const AndTripleResp& m) {
  if (m.b.size() != m.a.size() || m.c.size() != m.a.size()) {
    fail(ErrorCode::kLengthMismatch, "triple planes differ in length");
  }
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u64(m.a.size());
  w.bits(m.a);
  w.bits(m.b);
  w.bits(m.c);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const OnlineExchange& m) {
  std::vector<std::uint8_t> out;
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u8(0);
  w.u16(m.block);
  w.u16(m.blocks);
  w.u16(0);
  if (m.kind == ExchangeKind::kPublicHalves) {
    w.u32(static_cast<std::uint32_t>(m.words.size()));
    w.words(m.words);
  } else {
    if (m.e.size() != m.d.size()) {
      fail(ErrorCode::kLengthMismatch, "masked bit planes differ in length");
    }
    w.u32(static_cast<std::uint32_t>(m.d.size()));
    w.bits(m.d);
    w.bits(m.e);
  }
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_public_halves(
    std::uint16_t block, std::uint16_t blocks,
    std::span<const std::uint64_t> words) {
  std::vector<std::uint8_t> out;
  out.reserve(kOnlineExchangeHeaderSize + 8 * words.size());
  PayloadWriter<Host> w(out);
  w.u8(static_cast<std::uint8_t>(ExchangeKind::kPublicHalves));
  w.u8(0);
  w.u16(block);
  w.u16(blocks);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(words.size()));
  w.words(words);
  return out;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_payload(const OutputShare& m) {
  return m.body;
}

// ---------------------------------------------------------------------------
// Decoders

template <std::endian Host = std::endian::native>
Hello decode_hello(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  Hello m;
  const std::uint8_t role = r.u8();
  if (role > static_cast<std::uint8_t>(Role::kImageProvider)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown role");
  }
  m.role = static_cast<Role>(role);
  m.version = r.u8();
  m.fractional_bits = r.u8();
  r.u8();
  m.topology = r.u64();
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
Bye decode_bye(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  const std::uint8_t reason = r.u8();
  if (reason > static_cast<std::uint8_t>(ByeReason::kDimsMismatch)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown BYE reason");
  }
  r.finish();
  return {static_cast<ByeReason>(reason)};
}

template <std::endian Host = std::endian::native>
ShareUpload decode_share_upload(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  ShareUpload m;
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(UploadKind::kBias)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown upload kind");
  }
  m.kind = static_cast<UploadKind>(kind);
  r.u8();
  m.layer = r.u16();
  m.chunk = r.u32();
  m.chunk_count = r.u32();
  if (m.chunk_count == 0 || m.chunk >= m.chunk_count) {
    throw MalformedFrame(kFrameHeaderSize + 4, "bad chunk numbering");
  }
  m.body = r.rest();
  return m;
}

template <std::endian Host = std::endian::native>
ShareAck decode_share_ack(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  ShareAck m;
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(UploadKind::kBias)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown upload kind");
  }
  m.kind = static_cast<UploadKind>(kind);
  r.u8();
  m.layer = r.u16();
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
CrossTermReq decode_cross_term_req(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  CrossTermReq m;
  const std::uint8_t mode = r.u8();
  if (mode != static_cast<std::uint8_t>(CrossTermMode::kElementwise) &&
      mode != static_cast<std::uint8_t>(CrossTermMode::kMatVec)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown cross-term mode");
  }
  m.mode = static_cast<CrossTermMode>(mode);
  r.u8();
  m.block = r.u16();
  m.blocks = r.u16();
  r.u16();
  m.rows = r.u32();
  m.cols = r.u32();
  if (m.mode == CrossTermMode::kElementwise) {
    if (m.cols != 1) {
      throw MalformedFrame(kFrameHeaderSize + 12,
                           "elementwise request must have cols == 1");
    }
    m.lhs_delta = r.words(m.rows);
    m.rhs_delta = r.words(m.rows);
  } else {
    m.lhs_delta = r.words(std::size_t{m.rows} * m.cols);
    m.rhs_delta = r.words(m.cols);
  }
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
CrossTermResp decode_cross_term_resp(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  const std::uint32_t n = r.u32();
  r.u32();
  CrossTermResp m{r.words(n)};
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
AndTripleReq decode_and_triple_req(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  AndTripleReq m{r.u64()};
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
AndTripleResp decode_and_triple_resp(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  const std::uint64_t n = r.u64();
  if (n > 8 * p.size()) throw MalformedFrame(kFrameHeaderSize, "bad count");
  AndTripleResp m;
  m.a = r.bits(n);
  m.b = r.bits(n);
  m.c = r.bits(n);
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
OnlineExchange decode_online_exchange(std::span<const std::uint8_t> p) {
  PayloadReader<Host> r(p);
  OnlineExchange m;
  const std::uint8_t kind = r.u8();
  if (kind != static_cast<std::uint8_t>(ExchangeKind::kPublicHalves) &&
      kind != static_cast<std::uint8_t>(ExchangeKind::kMaskedBits)) {
    throw MalformedFrame(kFrameHeaderSize, "unknown exchange kind");
  }
  m.kind = static_cast<ExchangeKind>(kind);
  r.u8();
  m.block = r.u16();
  m.blocks = r.u16();
  r.u16();
  const std::uint32_t count = r.u32();
  if (m.kind == ExchangeKind::kPublicHalves) {
    m.words = r.words(count);
  } else {
    m.d = r.bits(count);
    m.e = r.bits(count);
  }
  r.finish();
  return m;
}

template <std::endian Host = std::endian::native>
OutputShare decode_output_share(std::span<const std::uint8_t> p) {
  return {std::vector<std::uint8_t>(p.begin(), p.end())};
}

}  // namespace ab2h::net
