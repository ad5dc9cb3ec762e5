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

#include "ab2h/net/messages.h"

namespace ab2h::net {

const char* role_name(Role role) noexcept {
  switch (role) {
    case Role::kServer0: return "server0";
    case Role::kServer1: return "server1";
    case Role::kHelper: return "helper";
    case Role::kModelProvider: return "model-provider";
    case Role::kImageProvider: return "image-provider";
  }
  return "unknown";
}

}  // namespace ab2h::net
