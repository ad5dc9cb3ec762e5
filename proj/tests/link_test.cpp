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

#include <gtest/gtest.h>

#include <unistd.h>

#include <future>
#include <thread>

#include "ab2h/net/handshake.h"
#include "ab2h/random.h"
#include "ab2h/session.h"

namespace ab2h::net {
namespace {

using namespace std::chrono_literals;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

FrameHeader header(MsgType type, std::uint32_t session, std::uint32_t counter,
                   std::size_t len) {
  FrameHeader h;
  h.type = type;
  h.fractional_bits = 13;
  h.session = session;
  h.counter = counter;
  h.length = static_cast<std::uint32_t>(len);
  return h;
}

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("10.0.0.2:7000");
  EXPECT_EQ(e.host, "10.0.0.2");
  EXPECT_EQ(e.port, 7000);
  EXPECT_EQ(e.str(), "10.0.0.2:7000");
  EXPECT_EQ(code_of([] { Endpoint::parse("nohost"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { Endpoint::parse("h:99999"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { Endpoint::parse("h:x1"); }), ErrorCode::kConfig);
}

TEST(Link, DeliversBySession) {
  auto [a, b] = Link::pair();
  const std::vector<std::uint8_t> p1 = {1}, p2 = {2, 2};
  a->send(header(MsgType::kOnlineExchange, 5, 0, p1.size()), p1);
  a->send(header(MsgType::kOnlineExchange, 6, 0, p2.size()), p2);
  EXPECT_EQ(b->receive(6, 1s).payload, p2);
  EXPECT_EQ(b->receive(5, 1s).payload, p1);
  EXPECT_EQ(code_of([&] { b->receive(5, 50ms); }), ErrorCode::kTimeout);
}

TEST(Link, BothSidesSendLargePayloadsAtOnce) {
  auto [a, b] = Link::pair();
  const std::vector<std::uint8_t> big(8 << 20, 0x5a);
  auto fa = std::async(std::launch::async, [&] {
    a->send(header(MsgType::kOnlineExchange, 1, 0, big.size()), big);
    return a->receive(1, 10s).payload.size();
  });
  b->send(header(MsgType::kOnlineExchange, 1, 0, big.size()), big);
  EXPECT_EQ(b->receive(1, 10s).payload, big);
  EXPECT_EQ(fa.get(), big.size());
}

TEST(Link, CloseWakesReceivers) {
  auto [a, b] = Link::pair();
  auto f = std::async(std::launch::async,
                      [&] { return code_of([&] { b->receive(1, 5s); }); });
  std::this_thread::sleep_for(50ms);
  a->close();
  EXPECT_EQ(f.get(), ErrorCode::kConnectionClosed);
  EXPECT_EQ(code_of([&] {
              const std::vector<std::uint8_t> p = {1};
              for (int k = 0; k < 100; ++k) {
                a->send(header(MsgType::kBye, 1, 0, 1), p);
              }
            }),
            ErrorCode::kConnectionClosed);
}

TEST(Link, GarbageOnTheWireSurfacesAsMalformed) {
  TcpListener l(Endpoint{"127.0.0.1", 0});
  auto client = connect_tcp({"127.0.0.1", l.port()}, 2s,
                            ErrorCode::kServerUnreachable);
  auto server = l.accept(2s);
  ASSERT_TRUE(server.has_value());
  Link link(std::move(*server));
  const char junk[] = "GET / HTTP/1.1\r\n\r\n";
  ASSERT_GT(::write(client.fd(), junk, sizeof junk), 0);
  EXPECT_EQ(code_of([&] { link.receive_any(2s); }), ErrorCode::kMalformedFrame);
}

TEST(Tcp, ConnectRetriesThenReportsTheGivenCode) {
  TcpListener l(Endpoint{"127.0.0.1", 0});
  const std::uint16_t port = l.port();
  { TcpListener gone = std::move(l); }
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] {
              connect_tcp({"127.0.0.1", port}, 300ms,
                          ErrorCode::kHelperUnreachable);
            }),
            ErrorCode::kHelperUnreachable);
  EXPECT_GE(std::chrono::steady_clock::now() - t0, 250ms);
}

TEST(Tcp, AcceptTimesOut) {
  TcpListener l(Endpoint{"127.0.0.1", 0});
  EXPECT_FALSE(l.accept(50ms).has_value());
}

TEST(Tcp, BindConflict) {
  TcpListener l(Endpoint{"127.0.0.1", 0});
  EXPECT_EQ(code_of([&] { TcpListener again(Endpoint{"127.0.0.1", l.port()}); }),
            ErrorCode::kBind);
}

HandshakeOptions opts(Role role, int f, std::uint32_t session = 9) {
  HandshakeOptions o;
  o.mine.role = role;
  o.mine.fractional_bits = static_cast<std::uint8_t>(f);
  o.session = session;
  o.timeout = 2s;
  return o;
}

std::pair<ErrorCode, ErrorCode> shake(HandshakeOptions a, HandshakeOptions b) {
  auto [la, lb] = Link::pair();
  auto fb = std::async(std::launch::async, [&, b] {
    return code_of([&] { session_handshake(*lb, b); });
  });
  const ErrorCode ca = code_of([&] { session_handshake(*la, a); });
  const ErrorCode cb = fb.get();
  return {ca, cb};
}

TEST(Handshake, MatchingPeersAgree) {
  auto a = opts(Role::kServer0, 13), b = opts(Role::kServer1, 13);
  a.expect_role = Role::kServer1;
  const auto [ca, cb] = shake(a, b);
  EXPECT_EQ(ca, ErrorCode::kOk);
  EXPECT_EQ(cb, ErrorCode::kOk);
}

TEST(Handshake, FractionalBitsMismatchSendsReasonTwo) {
  auto [la, lb] = Link::pair();
  // Raw peer: send HELLO with f=12, then read what comes back.
  const auto hello = encode_payload(Hello{Role::kServer1, 1, 12, 0});
  FrameHeader h = header(MsgType::kHello, 9, 0, hello.size());
  h.fractional_bits = 12;
  lb->send(h, hello);
  EXPECT_EQ(code_of([&] { session_handshake(*la, opts(Role::kServer0, 13)); }),
            ErrorCode::kIncompatiblePeer);
  EXPECT_EQ(lb->receive_any(1s).type, MsgType::kHello);
  const Frame bye = lb->receive_any(1s);
  ASSERT_EQ(bye.type, MsgType::kBye);
  EXPECT_EQ(decode_bye(bye.payload).reason, ByeReason::kFractionalBitsMismatch);
  EXPECT_TRUE(la->closed());
}

TEST(Handshake, MismatchesMapToErrors) {
  EXPECT_EQ(shake(opts(Role::kServer0, 13), opts(Role::kServer1, 6)),
            std::pair(ErrorCode::kIncompatiblePeer, ErrorCode::kIncompatiblePeer));
  EXPECT_EQ(shake(opts(Role::kServer0, 13, 1), opts(Role::kServer1, 13, 2)),
            std::pair(ErrorCode::kSessionMismatch, ErrorCode::kSessionMismatch));
  auto a = opts(Role::kServer0, 13);
  a.expect_role = Role::kServer1;
  EXPECT_EQ(shake(a, opts(Role::kHelper, 13)).first,
            ErrorCode::kIncompatiblePeer);
  auto t1 = opts(Role::kServer0, 13), t2 = opts(Role::kServer1, 13);
  t1.check_topology = t2.check_topology = true;
  t1.mine.topology = 1;
  t2.mine.topology = 2;
  EXPECT_EQ(shake(t1, t2).first, ErrorCode::kIncompatiblePeer);
  t2.mine.topology = 0;  // unknown on one side is accepted
  EXPECT_EQ(shake(t1, t2).first, ErrorCode::kOk);
}

TEST(Handshake, SilentPeerTimesOut) {
  auto [la, lb] = Link::pair();
  auto o = opts(Role::kServer0, 13);
  o.timeout = 100ms;
  EXPECT_EQ(code_of([&] { session_handshake(*la, o); }),
            ErrorCode::kHandshakeTimeout);
}

TEST(Handshake, DuplicateHelloIsAProtocolError) {
  auto [la, lb] = Link::pair();
  auto [ha, hb] = Link::pair();
  auto fb = std::async(std::launch::async, [&] {
    session_handshake(*lb, opts(Role::kServer1, 13));
  });
  session_handshake(*la, opts(Role::kServer0, 13));
  fb.get();
  // The peer repeats its HELLO where an exchange belongs.
  const auto hello = encode_payload(Hello{Role::kServer1, 1, 13, 0});
  lb->send(header(MsgType::kHello, 9, 0, hello.size()), hello);
  auto rng = ChaChaPrg::from_seed(1, "dup");
  SessionOptions so;
  so.session_id = 9;
  ProtocolSession s(so, *la, *ha, rng);
  const std::vector<std::uint8_t> p = {0};
  EXPECT_EQ(code_of([&] { s.exchange(p); }), ErrorCode::kProtocol);
  // The offender gets our exchange, then a BYE with reason 0x04.
  EXPECT_EQ(lb->receive_any(1s).type, MsgType::kOnlineExchange);
  const Frame bye = lb->receive_any(1s);
  ASSERT_EQ(bye.type, MsgType::kBye);
  EXPECT_EQ(decode_bye(bye.payload).reason, ByeReason::kProtocolViolation);
}

TEST(ByeReasons, MapToErrorCodes) {
  EXPECT_EQ(bye_error(ByeReason::kFractionalBitsMismatch),
            ErrorCode::kIncompatiblePeer);
  EXPECT_EQ(bye_error(ByeReason::kSessionMismatch), ErrorCode::kSessionMismatch);
  EXPECT_EQ(bye_error(ByeReason::kSplitMismatch), ErrorCode::kSplitMismatch);
  EXPECT_EQ(bye_error(ByeReason::kDimsMismatch), ErrorCode::kDimsMismatch);
  EXPECT_EQ(bye_error(ByeReason::kNormal), ErrorCode::kConnectionClosed);
}

}  // namespace
}  // namespace ab2h::net
