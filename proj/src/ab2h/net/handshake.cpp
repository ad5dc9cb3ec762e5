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

#include "ab2h/net/handshake.h"

#include <string>

namespace ab2h::net {
namespace {

FrameHeader header_for(const HandshakeOptions& o, MsgType type) {
  FrameHeader h;
  h.type = type;
  h.party = static_cast<std::uint8_t>(o.mine.role);
  h.fractional_bits = o.mine.fractional_bits;
  h.session = o.session;
  return h;
}

ErrorCode code_for(ByeReason r) {
  return r == ByeReason::kSessionMismatch ? ErrorCode::kSessionMismatch
                                          : ErrorCode::kIncompatiblePeer;
}

[[noreturn]] void abort_with(Link& link, const HandshakeOptions& o,
                             ByeReason reason, const std::string& what) {
  try {
    link.send(header_for(o, MsgType::kBye), encode_payload(Bye{reason}));
  } catch (const Error&) {
  }
  link.close();
  fail(code_for(reason), what);
}

}  // namespace

Hello session_handshake(Link& link, const HandshakeOptions& o) {
  link.send(header_for(o, MsgType::kHello), encode_payload(o.mine));

  Frame f;
  try {
    f = link.receive_any(o.timeout);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kTimeout) {
      link.close();
      fail(ErrorCode::kHandshakeTimeout, "no HELLO within " +
                                             std::to_string(o.timeout.count()) +
                                             " ms");
    }
    if (e.code() == ErrorCode::kVersionMismatch) {
      abort_with(link, o, ByeReason::kVersionMismatch, e.what());
    }
    throw;
  }

  if (f.type == MsgType::kBye) {
    const Bye bye = decode_bye(f.payload);
    link.close();
    fail(code_for(bye.reason),
         "peer refused the session (reason " +
             std::to_string(static_cast<int>(bye.reason)) + ")");
  }
  if (f.type != MsgType::kHello) {
    abort_with(link, o, ByeReason::kProtocolViolation,
               std::string("expected HELLO, got ") + msg_type_name(f.type));
  }
  const Hello peer = decode_hello(f.payload);
  if (peer.version != o.mine.version) {
    abort_with(link, o, ByeReason::kVersionMismatch,
               "peer speaks protocol version " + std::to_string(peer.version));
  }
  if (peer.fractional_bits != o.mine.fractional_bits) {
    abort_with(link, o, ByeReason::kFractionalBitsMismatch,
               "peer uses f=" + std::to_string(peer.fractional_bits) +
                   ", we use f=" + std::to_string(o.mine.fractional_bits));
  }
  if (f.session != o.session) {
    abort_with(link, o, ByeReason::kSessionMismatch,
               "peer is in session " + std::to_string(f.session));
  }
  if (o.expect_role && peer.role != *o.expect_role) {
    abort_with(link, o, ByeReason::kUnexpectedRole,
               std::string("expected ") + role_name(*o.expect_role) +
                   ", got " + role_name(peer.role));
  }
  if (o.check_topology && peer.topology != 0 && o.mine.topology != 0 &&
      peer.topology != o.mine.topology) {
    abort_with(link, o, ByeReason::kTopologyMismatch,
               "peer runs a different network");
  }
  return peer;
}

}  // namespace ab2h::net
