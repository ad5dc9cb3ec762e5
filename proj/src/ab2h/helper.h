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

// The helper node. It receives only the servers' private mask components,
// multiplies their sums, and deals the product back additively; it also
// deals XOR-shared AND triples. Nothing it receives carries a public Delta.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "ab2h/bitvec.h"
#include "ab2h/net/frame.h"
#include "ab2h/net/link.h"
#include "ab2h/random.h"
#include "ab2h/ring.h"

namespace ab2h {

// Sender id the helper puts in its frame headers.
inline constexpr std::uint8_t kHelperPartyId = 2;

// delta_ab = (a0 + a1) * (b0 + b1) elementwise, dealt as r and delta_ab - r.
std::pair<std::vector<Ring>, std::vector<Ring>> cross_term(
    std::span<const Ring> a0, std::span<const Ring> b0,
    std::span<const Ring> a1, std::span<const Ring> b1, RandomSource& rng);

// (A0 + A1) * (x0 + x1) for row-major rows x cols matrices and cols-long
// vectors, dealt additively per output element.
std::pair<std::vector<Ring>, std::vector<Ring>> matrix_cross_term(
    std::size_t rows, std::size_t cols, std::span<const Ring> a0,
    std::span<const Ring> x0, std::span<const Ring> a1,
    std::span<const Ring> x1, RandomSource& rng);

struct TripleShares {
  BitVector a, b, c;
};

// `count` triples c = a AND b, each component XOR-shared.
std::pair<TripleShares, TripleShares> deal_and_triples(std::size_t count,
                                                       RandomSource& rng);

// Answers one paired request. `first` and `second` must be the same request
// type from the two different servers with equal session and counter.
// Throws SessionMismatch, DimsMismatch, IncompatiblePeer or Protocol.
std::pair<net::Frame, net::Frame> answer_pair(const net::Frame& first,
                                              const net::Frame& second,
                                              RandomSource& rng);

struct HelperOptions {
  net::Endpoint listen{"127.0.0.1", 0};
  // When set, the randomness for each request pair is derived from
  // (seed, session, counter), making runs reproducible.
  std::optional<std::uint64_t> seed;
  net::Millis pending_timeout{30000};
  // Return from run() once this many connections were served and closed.
  // Zero serves until stop().
  std::size_t exit_after_connections = 0;
};

struct HelperLogEntry {
  std::uint32_t session;
  std::uint32_t counter;
  std::uint8_t party;
  net::MsgType type;
  std::uint32_t bytes;
};

struct HelperSessionCounts {
  std::uint64_t cross_term_pairs = 0;
  std::uint64_t triple_pairs = 0;
  std::uint64_t triples = 0;
  std::uint64_t rejected = 0;
};

class HelperService {
 public:
  // Binds immediately; throws BindError.
  explicit HelperService(const HelperOptions& options);
  ~HelperService();

  std::uint16_t port() const noexcept { return listener_.port(); }

  // Serves connections until stop() or the connection budget is used up.
  void run();
  // run() on a background thread.
  void start();
  void stop();
  void join();

  std::vector<HelperLogEntry> inbound_log() const;
  std::map<std::uint32_t, HelperSessionCounts> session_counts() const;
  std::size_t pending() const;

 private:
  struct Pending {
    net::Frame frame;
    std::shared_ptr<net::Link> link;
    std::chrono::steady_clock::time_point since;
  };

  void serve(std::shared_ptr<net::Link> link);
  void handle(const std::shared_ptr<net::Link>& link, net::Frame frame);
  void expire();
  std::unique_ptr<RandomSource> rng_for(std::uint32_t session,
                                        std::uint32_t counter);

  HelperOptions options_;
  net::TcpListener listener_;
  std::atomic<bool> stopping_{false};
  std::thread runner_;

  mutable std::mutex mu_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Pending> pending_;
  std::vector<HelperLogEntry> log_;
  std::map<std::uint32_t, HelperSessionCounts> counts_;
  std::vector<std::shared_ptr<net::Link>> links_;
  std::vector<std::thread> workers_;
};

}  // namespace ab2h
