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

#include "ab2h/net/frame.h"

#include <algorithm>

namespace ab2h::net {

bool is_known_msg_type(std::uint8_t raw) noexcept {
  return std::any_of(kAllMsgTypes.begin(), kAllMsgTypes.end(),
                     [raw](MsgType t) {
                       return static_cast<std::uint8_t>(t) == raw;
                     });
}

const char* msg_type_name(MsgType type) noexcept {
  switch (type) {
    case MsgType::kHello: return "HELLO";
    case MsgType::kBye: return "BYE";
    case MsgType::kShareUpload: return "SHARE_UPLOAD";
    case MsgType::kShareAck: return "SHARE_ACK";
    case MsgType::kCrossTermReq: return "CROSS_TERM_REQ";
    case MsgType::kCrossTermResp: return "CROSS_TERM_RESP";
    case MsgType::kAndTripleReq: return "AND_TRIPLE_REQ";
    case MsgType::kAndTripleResp: return "AND_TRIPLE_RESP";
    case MsgType::kOnlineExchange: return "ONLINE_EXCHANGE";
    case MsgType::kOutputShare: return "OUTPUT_SHARE";
  }
  return "UNKNOWN";
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
  if (buffer_.empty()) return std::nullopt;
  try {
    const std::size_t probe = std::min(buffer_.size(), kFrameHeaderSize);
    if (probe < kFrameHeaderSize) {
      // Validate what we have of the magic so garbage fails fast.
      for (std::size_t i = 0; i < std::min<std::size_t>(probe, 4); ++i) {
        if (buffer_[i] != kFrameMagic[i]) {
          throw MalformedFrame(i, "bad frame magic");
        }
      }
      return std::nullopt;
    }
    const FrameHeader h = decode_header(buffer_);
    const std::size_t total = kFrameHeaderSize + h.length;
    if (buffer_.size() < total) return std::nullopt;
    Frame f = decode_frame({buffer_.data(), total});
    buffer_.erase(buffer_.begin(), buffer_.begin() + total);
    consumed_ += total;
    return f;
  } catch (const MalformedFrame& e) {
    throw MalformedFrame(consumed_ + e.offset(), "malformed frame in stream");
  }
}

void FrameDecoder::finish() const {
  if (!buffer_.empty()) {
    throw MalformedFrame(consumed_ + buffer_.size(),
                         "stream ended inside a frame");
  }
}

}  // namespace ab2h::net
