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

// Frame layout (all integers little-endian):
//
//   offset  size  field
//        0     4  magic "AB20"
//        4     1  version (0x01)
//        5     1  msg_type
//        6     1  party_id of the sender
//        7     1  fractional bits f
//        8     4  session id
//       12     4  operation counter
//       16     4  payload length (<= 2^26)
//       20     n  payload

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "ab2h/error.h"
#include "ab2h/net/byteorder.h"

namespace ab2h::net {

inline constexpr std::array<std::uint8_t, 4> kFrameMagic = {'A', 'B', '2',
                                                            '0'};
inline constexpr std::uint8_t kProtocolVersion = 0x01;
inline constexpr std::size_t kFrameHeaderSize = 20;
inline constexpr std::size_t kMaxPayload = std::size_t{1} << 26;

enum class MsgType : std::uint8_t {
  kHello = 0x01,
  kBye = 0x02,
  kShareUpload = 0x10,
  kShareAck = 0x11,
  kCrossTermReq = 0x20,
  kCrossTermResp = 0x21,
  kAndTripleReq = 0x22,
  kAndTripleResp = 0x23,
  kOnlineExchange = 0x30,
  kOutputShare = 0x40,
};

inline constexpr std::array<MsgType, 10> kAllMsgTypes = {
    MsgType::kHello,         MsgType::kBye,
    MsgType::kShareUpload,   MsgType::kShareAck,
    MsgType::kCrossTermReq,  MsgType::kCrossTermResp,
    MsgType::kAndTripleReq,  MsgType::kAndTripleResp,
    MsgType::kOnlineExchange, MsgType::kOutputShare,
};

bool is_known_msg_type(std::uint8_t raw) noexcept;
const char* msg_type_name(MsgType type) noexcept;

struct FrameHeader {
  MsgType type = MsgType::kHello;
  std::uint8_t party = 0;
  std::uint8_t fractional_bits = 0;
  std::uint32_t session = 0;
  std::uint32_t counter = 0;
  std::uint32_t length = 0;

  friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

struct Frame {
  MsgType type = MsgType::kHello;
  std::uint8_t party = 0;
  std::uint8_t fractional_bits = 0;
  std::uint32_t session = 0;
  std::uint32_t counter = 0;
  std::vector<std::uint8_t> payload;

  FrameHeader header() const {
    return {type, party, fractional_bits, session, counter,
            static_cast<std::uint32_t>(payload.size())};
  }
  std::size_t wire_size() const { return kFrameHeaderSize + payload.size(); }

  friend bool operator==(const Frame&, const Frame&) = default;
};

template <std::endian Host = std::endian::native>
std::array<std::uint8_t, kFrameHeaderSize> encode_header(
    const FrameHeader& h) {
  if (h.length > kMaxPayload) {
    fail(ErrorCode::kLengthMismatch,
         "payload of " + std::to_string(h.length) + " bytes exceeds the cap");
  }
  std::array<std::uint8_t, kFrameHeaderSize> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = kFrameMagic[i];
  out[4] = kProtocolVersion;
  out[5] = static_cast<std::uint8_t>(h.type);
  out[6] = h.party;
  out[7] = h.fractional_bits;
  store_le<Host>(out.data() + 8, h.session);
  store_le<Host>(out.data() + 12, h.counter);
  store_le<Host>(out.data() + 16, h.length);
  return out;
}

// Validates and parses the first kFrameHeaderSize bytes.
template <std::endian Host = std::endian::native>
FrameHeader decode_header(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) throw MalformedFrame(i, "truncated frame header");
    if (bytes[i] != kFrameMagic[i]) throw MalformedFrame(i, "bad frame magic");
  }
  if (bytes.size() < kFrameHeaderSize) {
    throw MalformedFrame(bytes.size(), "truncated frame header");
  }
  if (bytes[4] != kProtocolVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "frame version " + std::to_string(bytes[4]) +
                    " is not supported (at byte offset 4)");
  }
  if (!is_known_msg_type(bytes[5])) {
    throw MalformedFrame(5, "unknown msg_type " + std::to_string(bytes[5]));
  }
  FrameHeader h;
  h.type = static_cast<MsgType>(bytes[5]);
  h.party = bytes[6];
  h.fractional_bits = bytes[7];
  h.session = load_le<std::uint32_t, Host>(bytes.data() + 8);
  h.counter = load_le<std::uint32_t, Host>(bytes.data() + 12);
  h.length = load_le<std::uint32_t, Host>(bytes.data() + 16);
  if (h.length > kMaxPayload) {
    throw MalformedFrame(16, "payload length " + std::to_string(h.length) +
                                 " exceeds the 64 MiB cap");
  }
  return h;
}

template <std::endian Host = std::endian::native>
std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  const auto header = encode_header<Host>(frame.header());
  std::vector<std::uint8_t> out;
  out.reserve(frame.wire_size());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

// Decodes exactly one frame spanning all of `bytes`.
template <std::endian Host = std::endian::native>
Frame decode_frame(std::span<const std::uint8_t> bytes) {
  const FrameHeader h = decode_header<Host>(bytes);
  const std::size_t total = kFrameHeaderSize + h.length;
  if (bytes.size() < total) {
    throw MalformedFrame(bytes.size(), "truncated frame payload");
  }
  if (bytes.size() > total) {
    throw MalformedFrame(total, "trailing bytes after frame");
  }
  Frame f;
  f.type = h.type;
  f.party = h.party;
  f.fractional_bits = h.fractional_bits;
  f.session = h.session;
  f.counter = h.counter;
  f.payload.assign(bytes.begin() + kFrameHeaderSize, bytes.end());
  return f;
}

// Incremental decoder for a byte stream. Frames are surfaced only once they
// are complete; finish() reports a dangling partial frame.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Frame> next();
  // Throws MalformedFrame if the stream ended inside a frame.
  void finish() const;

  std::size_t consumed() const noexcept { return consumed_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t consumed_ = 0;
};

}  // namespace ab2h::net
