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

#include "ab2h/loopback.h"

#include <atomic>

namespace ab2h {
namespace {

std::unique_ptr<RandomSource> make_rng(const std::optional<std::uint64_t>& seed,
                                       const char* domain,
                                       std::uint64_t stream) {
  if (seed) {
    return std::make_unique<ChaChaPrg>(
        ChaChaPrg::from_seed(*seed, domain, stream));
  }
  return std::make_unique<ChaChaPrg>(ChaChaPrg::from_entropy());
}

}  // namespace

Loopback::Loopback(const LoopbackOptions& options) : options_(options) {
  HelperOptions ho;
  ho.seed = options.seed;
  helper_ = std::make_unique<HelperService>(ho);
  helper_->start();

  auto [a, b] = net::Link::pair();
  peer_[0] = std::move(a);
  peer_[1] = std::move(b);
  const net::Endpoint at{"127.0.0.1", helper_->port()};
  for (int p = 0; p < 2; ++p) {
    helper_link_[p] = std::make_unique<net::Link>(net::connect_tcp(
        at, net::Millis(5000), ErrorCode::kHelperUnreachable));
    rng_[p] = make_rng(options.seed, "server", static_cast<std::uint64_t>(p));
    traces_[p] = std::make_unique<Trace>(options.capture_payloads);
    SessionOptions so;
    so.session_id = options.session_id;
    so.party = party_from_index(p);
    so.fixed_point = options.fixed_point;
    so.peer_timeout = options.timeout;
    so.helper_timeout = options.timeout;
    sessions_[p] = std::make_unique<ProtocolSession>(
        so, *peer_[p], *helper_link_[p], *rng_[p], traces_[p].get());
  }
  dealer_ = make_rng(options.seed, "dealer", 0);
}

Loopback::~Loopback() {
  for (int p = 0; p < 2; ++p) {
    if (helper_link_[p]) helper_link_[p]->close();
    if (peer_[p]) peer_[p]->close();
  }
  helper_->stop();
  helper_->join();
}

void Loopback::run_both(const std::function<void(int)>& body) {
  std::exception_ptr err[2];
  std::atomic<int> first{-1};
  auto guarded = [&](int p) {
    try {
      body(p);
    } catch (...) {
      err[p] = std::current_exception();
      int none = -1;
      first.compare_exchange_strong(none, p);
      // Unblock the other side, which may be waiting on the helper for a
      // request this side will never send.
      peer_[p]->close();
      helper_link_[0]->close();
      helper_link_[1]->close();
    }
  };
  std::thread other(guarded, 1);
  guarded(0);
  other.join();
  if (first >= 0) std::rethrow_exception(err[first]);
}

}  // namespace ab2h
