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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "ab2h/error.h"
#include "ab2h/net/frame.h"

namespace ab2h::net {

using Millis = std::chrono::milliseconds;

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port"; throws ConfigError.
  static Endpoint parse(std::string_view text);
  std::string str() const;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { reset(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void reset() noexcept;

 private:
  int fd_ = -1;
};

class TcpListener {
 public:
  // Port 0 binds an ephemeral port. Throws BindError.
  explicit TcpListener(const Endpoint& at);

  std::uint16_t port() const noexcept { return port_; }
  // Empty on timeout.
  std::optional<Socket> accept(Millis timeout);

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

// Retries until `timeout` elapses, then throws `unreachable_code`.
Socket connect_tcp(const Endpoint& to, Millis timeout,
                   ErrorCode unreachable_code);

// A framed, full-duplex connection. A background reader drains the socket
// into a queue so that both ends may send large payloads at the same time;
// receivers pick frames out by session id, which lets independent sessions
// share one connection.
class Link {
 public:
  explicit Link(Socket socket);
  ~Link();

  Link(const Link&) = delete;
  Link& operator=(const Link&) = delete;

  // Two connected in-process links (a socketpair).
  static std::pair<std::unique_ptr<Link>, std::unique_ptr<Link>> pair();

  // Thread-safe. Throws ConnectionClosed if the peer has gone away.
  void send(const FrameHeader& header, std::span<const std::uint8_t> payload);
  void send(const Frame& frame) { send(frame.header(), frame.payload); }

  // Next frame for `session`. Throws Timeout, ConnectionClosed, or the
  // decode error that broke the stream.
  Frame receive(std::uint32_t session, Millis timeout);
  Frame receive_any(Millis timeout);

  // Shuts the socket down; pending receivers wake with ConnectionClosed.
  void close();
  bool closed() const;

 private:
  void reader_loop();
  template <typename Pred>
  Frame wait_for(Pred match, Millis timeout);

  Socket socket_;
  std::mutex send_mu_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> inbox_;
  bool eof_ = false;
  std::exception_ptr error_;
  std::thread reader_;
};

}  // namespace ab2h::net
