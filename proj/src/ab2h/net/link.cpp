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

#include "ab2h/net/link.h"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/uio.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace ab2h::net {
namespace {

void set_nodelay(int fd) {
  int one = 1;
  // Fails harmlessly on AF_UNIX sockets.
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

addrinfo* resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(),
                               port.c_str(), &hints, &res);
  if (rc != 0) {
    fail(ErrorCode::kConfig, "cannot resolve " + ep.str() + ": " +
                                 ::gai_strerror(rc));
  }
  return res;
}

// Reads exactly n bytes. Returns false on a clean EOF before the first byte
// when `allow_eof` is set; `at` is the stream offset used in error reports.
bool read_exact(int fd, std::uint8_t* dst, std::size_t n, std::size_t at,
                bool allow_eof = false) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, dst + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && allow_eof) return false;
      throw MalformedFrame(at + got, "connection closed inside a frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      if (got == 0 && allow_eof) return false;
      throw Error(ErrorCode::kConnectionClosed,
                  std::string("recv failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    fail(ErrorCode::kConfig,
         "endpoint '" + std::string(text) + "' is not host:port");
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  unsigned port = 0;
  const auto digits = text.substr(colon + 1);
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() ||
      port > 65535) {
    fail(ErrorCode::kConfig, "bad port in endpoint '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::string Endpoint::str() const {
  return host + ":" + std::to_string(port);
}

void Socket::reset() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(const Endpoint& at) {
  addrinfo* res = resolve(at, true);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    fail(ErrorCode::kBind, std::string("socket: ") + std::strerror(errno));
  }
  socket_ = Socket(fd);
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const int rc = ::bind(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 || ::listen(fd, 16) != 0) {
    fail(ErrorCode::kBind, "cannot listen on " + at.str() + ": " +
                               std::strerror(errno));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

std::optional<Socket> TcpListener::accept(Millis timeout) {
  pollfd p{socket_.fd(), POLLIN, 0};
  const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return std::nullopt;
  const int fd = ::accept(socket_.fd(), nullptr, nullptr);
  if (fd < 0) return std::nullopt;
  set_nodelay(fd);
  return Socket(fd);
}

Socket connect_tcp(const Endpoint& to, Millis timeout,
                   ErrorCode unreachable_code) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string last_error = "timed out";
  for (;;) {
    addrinfo* res = resolve(to, false);
    const int fd =
        ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0) {
      if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        set_nodelay(fd);
        return Socket(fd);
      }
      last_error = std::strerror(errno);
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(Millis(50));
  }
  fail(unreachable_code, "cannot connect to " + to.str() + ": " + last_error);
}

Link::Link(Socket socket) : socket_(std::move(socket)) {
  reader_ = std::thread([this] { reader_loop(); });
}

Link::~Link() {
  close();
  if (reader_.joinable()) reader_.join();
}

std::pair<std::unique_ptr<Link>, std::unique_ptr<Link>> Link::pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    fail(ErrorCode::kInternal,
         std::string("socketpair: ") + std::strerror(errno));
  }
  return {std::make_unique<Link>(Socket(fds[0])),
          std::make_unique<Link>(Socket(fds[1]))};
}

void Link::send(const FrameHeader& header,
                std::span<const std::uint8_t> payload) {
  FrameHeader h = header;
  h.length = static_cast<std::uint32_t>(payload.size());
  if (payload.size() > kMaxPayload) {
    fail(ErrorCode::kLengthMismatch, "payload exceeds the 64 MiB frame cap");
  }
  const auto head = encode_header(h);
  std::lock_guard lock(send_mu_);
  iovec iov[2] = {
      {const_cast<std::uint8_t*>(head.data()), head.size()},
      {const_cast<std::uint8_t*>(payload.data()), payload.size()}};
  std::size_t total = head.size() + payload.size();
  int idx = 0;
  while (total > 0) {
    msghdr msg{};
    msg.msg_iov = iov + idx;
    msg.msg_iovlen = static_cast<std::size_t>(2 - idx);
    const ssize_t w = ::sendmsg(socket_.fd(), &msg, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kConnectionClosed,
           std::string("send failed: ") + std::strerror(errno));
    }
    std::size_t left = static_cast<std::size_t>(w);
    total -= left;
    while (idx < 2 && left >= iov[idx].iov_len) {
      left -= iov[idx].iov_len;
      ++idx;
    }
    if (idx < 2) {
      iov[idx].iov_base = static_cast<std::uint8_t*>(iov[idx].iov_base) + left;
      iov[idx].iov_len -= left;
    }
  }
}

void Link::reader_loop() {
  std::size_t offset = 0;
  try {
    for (;;) {
      std::uint8_t head[kFrameHeaderSize];
      if (!read_exact(socket_.fd(), head, 4, offset, true)) break;
      for (std::size_t i = 0; i < 4; ++i) {
        if (head[i] != kFrameMagic[i]) {
          throw MalformedFrame(offset + i, "bad frame magic");
        }
      }
      read_exact(socket_.fd(), head + 4, kFrameHeaderSize - 4, offset + 4);
      FrameHeader h;
      try {
        h = decode_header({head, kFrameHeaderSize});
      } catch (const MalformedFrame& e) {
        throw MalformedFrame(offset + e.offset(), "malformed frame header");
      }
      Frame f;
      f.type = h.type;
      f.party = h.party;
      f.fractional_bits = h.fractional_bits;
      f.session = h.session;
      f.counter = h.counter;
      f.payload.resize(h.length);
      if (h.length > 0) {
        read_exact(socket_.fd(), f.payload.data(), h.length,
                   offset + kFrameHeaderSize);
      }
      offset += kFrameHeaderSize + h.length;
      {
        std::lock_guard lock(mu_);
        inbox_.push_back(std::move(f));
      }
      cv_.notify_all();
    }
  } catch (...) {
    std::lock_guard lock(mu_);
    error_ = std::current_exception();
  }
  {
    std::lock_guard lock(mu_);
    eof_ = true;
  }
  cv_.notify_all();
}

template <typename Pred>
Frame Link::wait_for(Pred match, Millis timeout) {
  std::unique_lock lock(mu_);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
      if (match(*it)) {
        Frame f = std::move(*it);
        inbox_.erase(it);
        return f;
      }
    }
    if (eof_) {
      if (error_) std::rethrow_exception(error_);
      fail(ErrorCode::kConnectionClosed, "connection closed by peer");
    }
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      // One last look before giving up.
      for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
        if (match(*it)) {
          Frame f = std::move(*it);
          inbox_.erase(it);
          return f;
        }
      }
      fail(ErrorCode::kTimeout, "timed out waiting for a frame");
    }
  }
}

Frame Link::receive(std::uint32_t session, Millis timeout) {
  return wait_for([session](const Frame& f) { return f.session == session; },
                  timeout);
}

Frame Link::receive_any(Millis timeout) {
  return wait_for([](const Frame&) { return true; }, timeout);
}

void Link::close() {
  if (socket_.valid()) ::shutdown(socket_.fd(), SHUT_RDWR);
}

bool Link::closed() const {
  std::lock_guard lock(mu_);
  return eof_ && inbox_.empty();
}

}  // namespace ab2h::net
