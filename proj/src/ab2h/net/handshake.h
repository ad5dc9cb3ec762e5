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

#include <cstdint>
#include <optional>

#include "ab2h/net/link.h"
#include "ab2h/net/messages.h"

namespace ab2h::net {

inline constexpr Millis kHandshakeTimeout{10000};

struct HandshakeOptions {
  Hello mine;
  std::uint32_t session = 0;
  std::optional<Role> expect_role;  // unset accepts any role
  bool check_topology = false;      // compare Hello::topology when both set
  Millis timeout = kHandshakeTimeout;
};

// Sends our HELLO, reads the peer's and checks it. On a mismatch sends BYE
// with the reason, closes the link and throws IncompatiblePeer (or
// SessionMismatch). A BYE from the peer is reported the same way. Throws
// HandshakeTimeout when nothing arrives in time.
Hello session_handshake(Link& link, const HandshakeOptions& options);

}  // namespace ab2h::net
