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

// Both compute servers and a helper in one process. The servers talk over
// a socketpair, the helper over loopback TCP. Used by tests and by the
// split-scaling measurement.

#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>

#include "ab2h/helper.h"
#include "ab2h/random.h"
#include "ab2h/session.h"

namespace ab2h {

struct LoopbackOptions {
  std::uint32_t session_id = 1;
  FixedPointConfig fixed_point{};
  std::optional<std::uint64_t> seed;
  bool capture_payloads = false;
  net::Millis timeout{20000};
};

class Loopback {
 public:
  explicit Loopback(const LoopbackOptions& options = {});
  ~Loopback();

  Loopback(const Loopback&) = delete;
  Loopback& operator=(const Loopback&) = delete;

  ProtocolSession& session(int party) { return *sessions_[party]; }
  Trace& trace(int party) { return *traces_[party]; }
  HelperService& helper() { return *helper_; }
  RandomSource& dealer_rng() { return *dealer_; }

  // Runs f(session 0) and f(session 1) concurrently and returns both
  // results. If either side throws, the peer links are torn down so the
  // other side fails fast, and the first error is rethrown.
  template <typename F>
  auto run(F&& f) {
    using R = std::invoke_result_t<F&, ProtocolSession&>;
    if constexpr (std::is_void_v<R>) {
      run_both([&](int p) { f(*sessions_[p]); });
    } else {
      std::optional<R> r0, r1;
      run_both([&](int p) {
        if (p == 0) {
          r0.emplace(f(*sessions_[0]));
        } else {
          r1.emplace(f(*sessions_[1]));
        }
      });
      return std::pair<R, R>(std::move(*r0), std::move(*r1));
    }
  }

 private:
  void run_both(const std::function<void(int)>& body);

  LoopbackOptions options_;
  std::unique_ptr<HelperService> helper_;
  std::unique_ptr<net::Link> peer_[2];
  std::unique_ptr<net::Link> helper_link_[2];
  std::unique_ptr<RandomSource> rng_[2];
  std::unique_ptr<RandomSource> dealer_;
  std::unique_ptr<Trace> traces_[2];
  std::unique_ptr<ProtocolSession> sessions_[2];
};

}  // namespace ab2h
