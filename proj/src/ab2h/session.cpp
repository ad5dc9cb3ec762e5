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

#include "ab2h/session.h"

#include <sstream>

#include "ab2h/net/messages.h"

namespace ab2h {
ErrorCode bye_error(net::ByeReason reason) {
  switch (reason) {
    case net::ByeReason::kVersionMismatch:
    case net::ByeReason::kFractionalBitsMismatch:
    case net::ByeReason::kTopologyMismatch:
      return ErrorCode::kIncompatiblePeer;
    case net::ByeReason::kSessionMismatch:
      return ErrorCode::kSessionMismatch;
    case net::ByeReason::kSplitMismatch:
      return ErrorCode::kSplitMismatch;
    case net::ByeReason::kDimsMismatch:
      return ErrorCode::kDimsMismatch;
    default:
      return ErrorCode::kConnectionClosed;
  }
}

using net::MsgType;

const char* counterpart_name(Counterpart c) noexcept {
  switch (c) {
    case Counterpart::kPeer: return "peer";
    case Counterpart::kHelper: return "helper";
    case Counterpart::kProvider: return "provider";
  }
  return "unknown";
}

void Trace::record(Direction dir, Counterpart who,
                   const net::FrameHeader& header,
                   std::span<const std::uint8_t> payload) {
  TraceEntry e{dir, who, header.type,
               static_cast<std::uint32_t>(net::kFrameHeaderSize +
                                          payload.size()),
               header.counter,
               {}};
  if (capture_payloads_) e.payload.assign(payload.begin(), payload.end());
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(e));
}

std::vector<TraceEntry> Trace::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t Trace::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t Trace::count(Direction dir, Counterpart who,
                         net::MsgType type) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& e : entries_) {
    n += (e.direction == dir && e.counterpart == who && e.type == type);
  }
  return n;
}

std::string Trace::to_text() const {
  std::lock_guard lock(mu_);
  std::ostringstream out;
  for (const auto& e : entries_) {
    out << (e.direction == Direction::kOut ? "out " : "in ")
        << counterpart_name(e.counterpart) << ' ' << net::msg_type_name(e.type)
        << " bytes=" << e.bytes << " counter=" << e.counter;
    if (capture_payloads_) {
      static const char* kHex = "0123456789abcdef";
      out << " payload=";
      for (auto b : e.payload) out << kHex[b >> 4] << kHex[b & 15];
    }
    out << '\n';
  }
  return out.str();
}

ChannelStats& ChannelStats::operator+=(const ChannelStats& o) {
  frames_out += o.frames_out;
  frames_in += o.frames_in;
  bytes_out += o.bytes_out;
  bytes_in += o.bytes_in;
  return *this;
}

ChannelStats operator-(ChannelStats a, const ChannelStats& b) {
  a.frames_out -= b.frames_out;
  a.frames_in -= b.frames_in;
  a.bytes_out -= b.bytes_out;
  a.bytes_in -= b.bytes_in;
  return a;
}

SessionStats operator-(SessionStats a, const SessionStats& b) {
  a.peer = a.peer - b.peer;
  a.helper = a.helper - b.helper;
  a.cross_term_round_trips -= b.cross_term_round_trips;
  a.triple_round_trips -= b.triple_round_trips;
  a.triples -= b.triples;
  return a;
}

ProtocolSession::ProtocolSession(const SessionOptions& options,
                                 net::Link& peer, net::Link& helper,
                                 RandomSource& rng, Trace* trace)
    : options_(options), peer_(peer), helper_(helper), rng_(rng),
      trace_(trace) {}

net::FrameHeader ProtocolSession::header(MsgType type,
                                         std::uint32_t counter) const {
  net::FrameHeader h;
  h.type = type;
  h.party = static_cast<std::uint8_t>(options_.party);
  h.fractional_bits =
      static_cast<std::uint8_t>(options_.fixed_point.fractional_bits());
  h.session = options_.session_id;
  h.counter = counter;
  return h;
}

net::Frame ProtocolSession::expect(net::Link& link, Counterpart who,
                                   MsgType type, std::uint32_t counter,
                                   net::Millis timeout,
                                   ErrorCode timeout_code) {
  net::Frame f;
  try {
    f = link.receive(options_.session_id, timeout);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kTimeout) {
      fail(timeout_code, std::string("no answer from ") +
                             counterpart_name(who) + " for operation " +
                             std::to_string(counter));
    }
    throw;
  }
  if (f.type == MsgType::kBye) {
    const auto bye = net::decode_bye(f.payload);
    link.close();
    fail(bye_error(bye.reason),
         std::string(counterpart_name(who)) + " ended the session (reason " +
             std::to_string(static_cast<int>(bye.reason)) + ")");
  }
  if (f.type != type) {
    // A second HELLO or any other out-of-place frame ends the connection.
    const net::Bye bye{net::ByeReason::kProtocolViolation};
    try {
      link.send(header(MsgType::kBye, counter), net::encode_payload(bye));
    } catch (const Error&) {
    }
    link.close();
    fail(ErrorCode::kProtocol, std::string("expected ") +
                                   net::msg_type_name(type) + " from " +
                                   counterpart_name(who) + ", got " +
                                   net::msg_type_name(f.type));
  }
  if (f.fractional_bits != options_.fixed_point.fractional_bits()) {
    fail(ErrorCode::kIncompatiblePeer,
         "frame carries f=" + std::to_string(f.fractional_bits) +
             " but the session uses f=" +
             std::to_string(options_.fixed_point.fractional_bits()));
  }
  if (f.counter != counter) {
    fail(ErrorCode::kCounterSkew,
         std::string(counterpart_name(who)) + " is at operation " +
             std::to_string(f.counter) + ", expected " +
             std::to_string(counter));
  }
  if (who == Counterpart::kPeer && f.party == static_cast<std::uint8_t>(
                                                  options_.party)) {
    fail(ErrorCode::kProtocol, "peer claims our own party id");
  }
  if (trace_ != nullptr) trace_->record(Direction::kIn, who, f.header(), f.payload);
  return f;
}

std::vector<std::uint8_t> ProtocolSession::exchange(
    std::span<const std::uint8_t> payload) {
  const std::uint32_t c = ++counter_;
  const auto h = header(MsgType::kOnlineExchange, c);
  peer_.send(h, payload);
  if (trace_ != nullptr) {
    trace_->record(Direction::kOut, Counterpart::kPeer, h, payload);
  }
  stats_.peer.frames_out += 1;
  stats_.peer.bytes_out += net::kFrameHeaderSize + payload.size();
  net::Frame in = expect(peer_, Counterpart::kPeer, MsgType::kOnlineExchange,
                         c, options_.peer_timeout, ErrorCode::kPeerTimeout);
  stats_.peer.frames_in += 1;
  stats_.peer.bytes_in += in.wire_size();
  return std::move(in.payload);
}

std::vector<std::uint8_t> ProtocolSession::call_helper(
    MsgType request, std::span<const std::uint8_t> payload) {
  MsgType response;
  if (request == MsgType::kCrossTermReq) {
    response = MsgType::kCrossTermResp;
    stats_.cross_term_round_trips += 1;
  } else if (request == MsgType::kAndTripleReq) {
    response = MsgType::kAndTripleResp;
    stats_.triple_round_trips += 1;
  } else {
    fail(ErrorCode::kInternal, std::string("refusing to send ") +
                                   net::msg_type_name(request) +
                                   " to the helper");
  }
  const std::uint32_t c = ++counter_;
  const auto h = header(request, c);
  helper_.send(h, payload);
  if (trace_ != nullptr) {
    trace_->record(Direction::kOut, Counterpart::kHelper, h, payload);
  }
  stats_.helper.frames_out += 1;
  stats_.helper.bytes_out += net::kFrameHeaderSize + payload.size();
  net::Frame in = expect(helper_, Counterpart::kHelper, response, c,
                         options_.helper_timeout, ErrorCode::kHelperTimeout);
  stats_.helper.frames_in += 1;
  stats_.helper.bytes_in += in.wire_size();
  return std::move(in.payload);
}

}  // namespace ab2h
