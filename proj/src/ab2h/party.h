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

namespace ab2h {

// One of the two compute servers.
enum class Party : std::uint8_t { k0 = 0, k1 = 1 };

constexpr int index_of(Party p) noexcept { return static_cast<int>(p); }
constexpr Party other(Party p) noexcept {
  return p == Party::k0 ? Party::k1 : Party::k0;
}
constexpr Party party_from_index(int i) noexcept {
  return i == 0 ? Party::k0 : Party::k1;
}

}  // namespace ab2h
