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
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ab2h/net/frame.h"
#include "ab2h/net/link.h"
#include "ab2h/net/messages.h"
#include "ab2h/party.h"
#include "ab2h/random.h"
#include "ab2h/ring.h"

namespace ab2h {

enum class Direction : std::uint8_t { kOut, kIn };
enum class Counterpart : std::uint8_t { kPeer, kHelper, kProvider };

const char* counterpart_name(Counterpart c) noexcept;

// The error a BYE with this reason is reported as.
ErrorCode bye_error(net::ByeReason reason);

struct TraceEntry {
  Direction direction;
  Counterpart counterpart;
  net::MsgType type;
  std::uint32_t bytes;  // whole frame, header included
  std::uint32_t counter;
  std::vector<std::uint8_t> payload;  // only when payload capture is on
};

// Append-only message log of one role.
class Trace {
 public:
  explicit Trace(bool capture_payloads = false)
      : capture_payloads_(capture_payloads) {}

  void record(Direction dir, Counterpart who, const net::FrameHeader& header,
              std::span<const std::uint8_t> payload);

  std::vector<TraceEntry> entries() const;
  std::size_t size() const;
  std::size_t count(Direction dir, Counterpart who, net::MsgType type) const;
  bool capture_payloads() const noexcept { return capture_payloads_; }

  // One line per message: "out peer ONLINE_EXCHANGE bytes=.. counter=..".
  std::string to_text() const;

 private:
  bool capture_payloads_;
  mutable std::mutex mu_;
  std::vector<TraceEntry> entries_;
};

struct ChannelStats {
  std::uint64_t frames_out = 0;
  std::uint64_t frames_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t bytes_in = 0;

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
  ChannelStats& operator+=(const ChannelStats& o);
  friend ChannelStats operator-(ChannelStats a, const ChannelStats& b);
};

struct SessionStats {
  ChannelStats peer;
  ChannelStats helper;
  std::uint64_t cross_term_round_trips = 0;
  std::uint64_t triple_round_trips = 0;
  std::uint64_t triples = 0;

  friend bool operator==(const SessionStats&, const SessionStats&) = default;
  friend SessionStats operator-(SessionStats a, const SessionStats& b);
};

struct SessionOptions {
  std::uint32_t session_id = 1;
  Party party = Party::k0;
  FixedPointConfig fixed_point{};
  net::Millis peer_timeout{30000};
  net::Millis helper_timeout{30000};
};

// The state one compute server keeps for one protocol session: its two
// channels, a monotone operation counter that both servers advance in
// lockstep (every frame echoes it), and the randomness for fresh masks.
class ProtocolSession {
 public:
  ProtocolSession(const SessionOptions& options, net::Link& peer,
                  net::Link& helper, RandomSource& rng,
                  Trace* trace = nullptr);

  Party party() const noexcept { return options_.party; }
  int party_index() const noexcept { return index_of(options_.party); }
  std::uint32_t session_id() const noexcept { return options_.session_id; }
  const FixedPointConfig& fixed_point() const noexcept {
    return options_.fixed_point;
  }
  RandomSource& rng() noexcept { return rng_; }
  std::uint32_t counter() const noexcept { return counter_; }
  const SessionStats& stats() const noexcept { return stats_; }
  Trace* trace() noexcept { return trace_; }

  // One ONLINE_EXCHANGE round: sends `payload` to the peer and returns the
  // peer's payload for the same counter value.
  std::vector<std::uint8_t> exchange(std::span<const std::uint8_t> payload);

  // One helper round trip. `request` must be CROSS_TERM_REQ or
  // AND_TRIPLE_REQ; those are the only types the helper accepts.
  std::vector<std::uint8_t> call_helper(net::MsgType request,
                                        std::span<const std::uint8_t> payload);

  void note_triples(std::uint64_t n) noexcept { stats_.triples += n; }

 private:
  net::FrameHeader header(net::MsgType type, std::uint32_t counter) const;
  net::Frame expect(net::Link& link, Counterpart who, net::MsgType type,
                    std::uint32_t counter, net::Millis timeout,
                    ErrorCode timeout_code);

  SessionOptions options_;
  net::Link& peer_;
  net::Link& helper_;
  RandomSource& rng_;
  Trace* trace_;
  std::uint32_t counter_ = 0;
  SessionStats stats_;
};

}  // namespace ab2h
