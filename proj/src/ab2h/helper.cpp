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

#include "ab2h/helper.h"

#include <string>

#include "ab2h/error.h"
#include "ab2h/net/messages.h"

namespace ab2h {

using net::Frame;
using net::MsgType;

namespace {

void send_bye(net::Link& link, const Frame& about, net::ByeReason reason) {
  const auto payload = net::encode_payload(net::Bye{reason});
  const net::FrameHeader h{MsgType::kBye, kHelperPartyId,
                           about.fractional_bits, about.session,
                           about.counter,
                           static_cast<std::uint32_t>(payload.size())};
  try {
    link.send(h, payload);
  } catch (const Error&) {
  }
}

}  // namespace

std::pair<std::vector<Ring>, std::vector<Ring>> cross_term(
    std::span<const Ring> a0, std::span<const Ring> b0,
    std::span<const Ring> a1, std::span<const Ring> b1, RandomSource& rng) {
  const std::size_t n = a0.size();
  if (b0.size() != n || a1.size() != n || b1.size() != n) {
    fail(ErrorCode::kDimsMismatch, "cross-term operands differ in length");
  }
  std::vector<Ring> r0(n), r1(n);
  rng.fill(r0);
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = (a0[i] + a1[i]) * (b0[i] + b1[i]) - r0[i];
  }
  return {std::move(r0), std::move(r1)};
}

std::pair<std::vector<Ring>, std::vector<Ring>> matrix_cross_term(
    std::size_t rows, std::size_t cols, std::span<const Ring> a0,
    std::span<const Ring> x0, std::span<const Ring> a1,
    std::span<const Ring> x1, RandomSource& rng) {
  if (a0.size() != rows * cols || a1.size() != rows * cols ||
      x0.size() != cols || x1.size() != cols) {
    fail(ErrorCode::kDimsMismatch,
         "matrix cross term expects " + std::to_string(rows) + "x" +
             std::to_string(cols) + " and " + std::to_string(cols) + "x1");
  }
  std::vector<Ring> x(cols);
  for (std::size_t j = 0; j < cols; ++j) x[j] = x0[j] + x1[j];
  std::vector<Ring> r0(rows), r1(rows);
  rng.fill(r0);
  for (std::size_t i = 0; i < rows; ++i) {
    const Ring* row0 = a0.data() + i * cols;
    const Ring* row1 = a1.data() + i * cols;
    Ring acc = 0;
    for (std::size_t j = 0; j < cols; ++j) acc += (row0[j] + row1[j]) * x[j];
    r1[i] = acc - r0[i];
  }
  return {std::move(r0), std::move(r1)};
}

std::pair<TripleShares, TripleShares> deal_and_triples(std::size_t count,
                                                       RandomSource& rng) {
  if (count == 0) fail(ErrorCode::kEmptyInput, "zero triples requested");
  // Draw order: a, b, then the three masks for party 1.
  TripleShares s0{BitVector(count), BitVector(count), BitVector(count)};
  TripleShares s1{BitVector(count), BitVector(count), BitVector(count)};
  BitVector a(count), b(count);
  rng.fill(a.words());
  rng.fill(b.words());
  rng.fill(s1.a.words());
  rng.fill(s1.b.words());
  rng.fill(s1.c.words());
  for (BitVector* v : {&a, &b, &s1.a, &s1.b, &s1.c}) v->resize(count);
  const BitVector c = a & b;
  s0.a = a ^ s1.a;
  s0.b = b ^ s1.b;
  s0.c = c ^ s1.c;
  return {std::move(s0), std::move(s1)};
}

std::pair<Frame, Frame> answer_pair(const Frame& first, const Frame& second,
                                    RandomSource& rng) {
  if (first.session != second.session) {
    fail(ErrorCode::kSessionMismatch,
         "requests from sessions " + std::to_string(first.session) + " and " +
             std::to_string(second.session));
  }
  if (first.type != second.type || first.counter != second.counter) {
    fail(ErrorCode::kProtocol, "paired requests differ in type or counter");
  }
  if (first.party > 1 || second.party > 1 || first.party == second.party) {
    fail(ErrorCode::kProtocol, "requests must come from server 0 and 1");
  }
  if (first.fractional_bits != second.fractional_bits) {
    fail(ErrorCode::kIncompatiblePeer, "servers disagree on f");
  }
  const Frame& f0 = first.party == 0 ? first : second;
  const Frame& f1 = first.party == 0 ? second : first;

  Frame out0, out1;
  for (Frame* o : {&out0, &out1}) {
    o->party = kHelperPartyId;
    o->fractional_bits = f0.fractional_bits;
    o->session = f0.session;
    o->counter = f0.counter;
  }
  out0.type = out1.type = f0.type == MsgType::kCrossTermReq
                              ? MsgType::kCrossTermResp
                              : MsgType::kAndTripleResp;

  if (f0.type == MsgType::kCrossTermReq) {
    const auto q0 = net::decode_cross_term_req(f0.payload);
    const auto q1 = net::decode_cross_term_req(f1.payload);
    if (q0.block != q1.block || q0.blocks != q1.blocks) {
      fail(ErrorCode::kSplitMismatch,
           "servers are at blocks " + std::to_string(q0.block) + "/" +
               std::to_string(q0.blocks) + " and " + std::to_string(q1.block) +
               "/" + std::to_string(q1.blocks));
    }
    if (q0.mode != q1.mode || q0.rows != q1.rows || q0.cols != q1.cols) {
      fail(ErrorCode::kDimsMismatch,
           "servers sent " + std::to_string(q0.rows) + "x" +
               std::to_string(q0.cols) + " and " + std::to_string(q1.rows) +
               "x" + std::to_string(q1.cols));
    }
    auto [r0, r1] =
        q0.mode == net::CrossTermMode::kElementwise
            ? cross_term(q0.lhs_delta, q0.rhs_delta, q1.lhs_delta,
                         q1.rhs_delta, rng)
            : matrix_cross_term(q0.rows, q0.cols, q0.lhs_delta, q0.rhs_delta,
                                q1.lhs_delta, q1.rhs_delta, rng);
    out0.payload = net::encode_payload(net::CrossTermResp{std::move(r0)});
    out1.payload = net::encode_payload(net::CrossTermResp{std::move(r1)});
  } else if (f0.type == MsgType::kAndTripleReq) {
    const auto q0 = net::decode_and_triple_req(f0.payload);
    const auto q1 = net::decode_and_triple_req(f1.payload);
    if (q0.count != q1.count) {
      fail(ErrorCode::kDimsMismatch,
           "servers asked for " + std::to_string(q0.count) + " and " +
               std::to_string(q1.count) + " triples");
    }
    auto [t0, t1] = deal_and_triples(q0.count, rng);
    out0.payload = net::encode_payload(
        net::AndTripleResp{std::move(t0.a), std::move(t0.b), std::move(t0.c)});
    out1.payload = net::encode_payload(
        net::AndTripleResp{std::move(t1.a), std::move(t1.b), std::move(t1.c)});
  } else {
    fail(ErrorCode::kProtocol, std::string("helper does not serve ") +
                                   net::msg_type_name(f0.type));
  }
  if (first.party == 0) return {std::move(out0), std::move(out1)};
  return {std::move(out1), std::move(out0)};
}

HelperService::HelperService(const HelperOptions& options)
    : options_(options), listener_(options.listen) {}

HelperService::~HelperService() {
  stop();
  join();
}

void HelperService::start() {
  runner_ = std::thread([this] {
    try {
      run();
    } catch (const std::exception&) {
    }
  });
}

void HelperService::stop() {
  stopping_ = true;
  std::lock_guard lock(mu_);
  for (auto& l : links_) l->close();
}

void HelperService::join() {
  if (runner_.joinable()) runner_.join();
}

void HelperService::run() {
  std::size_t accepted = 0;
  while (!stopping_) {
    if (options_.exit_after_connections != 0 &&
        accepted >= options_.exit_after_connections) {
      break;
    }
    auto sock = listener_.accept(net::Millis(100));
    expire();
    if (!sock) continue;
    auto link = std::make_shared<net::Link>(std::move(*sock));
    std::lock_guard lock(mu_);
    links_.push_back(link);
    workers_.emplace_back([this, link] { serve(link); });
    ++accepted;
  }
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
  std::lock_guard lock(mu_);
  links_.clear();
  pending_.clear();
}

void HelperService::serve(std::shared_ptr<net::Link> link) {
  while (!stopping_) {
    Frame f;
    try {
      f = link->receive_any(net::Millis(200));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kTimeout) {
        expire();
        continue;
      }
      break;  // closed, or the stream broke
    }
    handle(link, std::move(f));
  }
  link->close();
}

void HelperService::handle(const std::shared_ptr<net::Link>& link, Frame f) {
  {
    std::lock_guard lock(mu_);
    log_.push_back({f.session, f.counter, f.party, f.type,
                    static_cast<std::uint32_t>(f.wire_size())});
  }
  if (f.type != MsgType::kCrossTermReq && f.type != MsgType::kAndTripleReq) {
    {
      std::lock_guard lock(mu_);
      counts_[f.session].rejected += 1;
    }
    send_bye(*link, f, net::ByeReason::kProtocolViolation);
    link->close();
    return;
  }

  const auto key = std::make_pair(f.session, f.counter);
  Pending other;
  {
    std::lock_guard lock(mu_);
    auto it = pending_.find(key);
    if (it == pending_.end()) {
      pending_.emplace(key, Pending{std::move(f), link,
                                    std::chrono::steady_clock::now()});
      return;
    }
    other = std::move(it->second);
    pending_.erase(it);
  }

  std::pair<Frame, Frame> answers;
  try {
    auto rng = rng_for(f.session, f.counter);
    answers = answer_pair(other.frame, f, *rng);
  } catch (const Error& e) {
    net::ByeReason reason = net::ByeReason::kProtocolViolation;
    switch (e.code()) {
      case ErrorCode::kIncompatiblePeer:
        reason = net::ByeReason::kFractionalBitsMismatch;
        break;
      case ErrorCode::kSessionMismatch:
        reason = net::ByeReason::kSessionMismatch;
        break;
      case ErrorCode::kSplitMismatch:
        reason = net::ByeReason::kSplitMismatch;
        break;
      case ErrorCode::kDimsMismatch:
        reason = net::ByeReason::kDimsMismatch;
        break;
      default:
        break;
    }
    {
      std::lock_guard lock(mu_);
      counts_[f.session].rejected += 1;
    }
    send_bye(*link, f, reason);
    if (other.link != link) send_bye(*other.link, other.frame, reason);
    return;
  }
  {
    std::lock_guard lock(mu_);
    auto& c = counts_[f.session];
    if (f.type == MsgType::kCrossTermReq) {
      c.cross_term_pairs += 1;
    } else {
      c.triple_pairs += 1;
      c.triples += net::decode_and_triple_req(f.payload).count;
    }
  }
  try {
    other.link->send(answers.first);
  } catch (const Error&) {
  }
  try {
    link->send(answers.second);
  } catch (const Error&) {
  }
}

void HelperService::expire() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mu_);
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (now - it->second.since > options_.pending_timeout) {
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
}

std::unique_ptr<RandomSource> HelperService::rng_for(std::uint32_t session,
                                                     std::uint32_t counter) {
  if (!options_.seed) {
    return std::make_unique<ChaChaPrg>(ChaChaPrg::from_entropy());
  }
  return std::make_unique<ChaChaPrg>(ChaChaPrg::from_seed(
      *options_.seed, "helper",
      (std::uint64_t{session} << 32) | std::uint64_t{counter}));
}

std::vector<HelperLogEntry> HelperService::inbound_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::map<std::uint32_t, HelperSessionCounts> HelperService::session_counts()
    const {
  std::lock_guard lock(mu_);
  return counts_;
}

std::size_t HelperService::pending() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

}  // namespace ab2h
