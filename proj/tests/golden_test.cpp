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

#include <gtest/gtest.h>

#include <set>

#include "golden_cases.h"

namespace ab2h {
namespace {

using testing::check_golden;
using testing::golden_cases;
using testing::read_hex;

const std::filesystem::path kDir =
    std::filesystem::path(AB2H_SOURCE_DIR) / "fixtures" / "golden";

TEST(Golden, OneFixturePerMessageType) {
  std::set<net::MsgType> seen;
  for (const auto& [name, c] : golden_cases()) {
    EXPECT_TRUE(std::filesystem::exists(kDir / (name + ".hex"))) << name;
    seen.insert(c.type);
  }
  EXPECT_EQ(seen.size(), net::kAllMsgTypes.size());
}

TEST(Golden, LittleEndianHost) {
  for (const auto& [name, c] : golden_cases()) {
    EXPECT_EQ(check_golden<std::endian::little>(c, read_hex(kDir / (name + ".hex"))),
              "")
        << name;
  }
}

TEST(Golden, BigEndianHost) {
  for (const auto& [name, c] : golden_cases()) {
    EXPECT_EQ(check_golden<std::endian::big>(c, read_hex(kDir / (name + ".hex"))),
              "")
        << name;
  }
}

TEST(Golden, FrameSizesMatchFixtures) {
  // 20-byte header plus payload: e.g. CROSS_TERM_REQ with a 2x2 matrix and
  // a 2-vector is 20 + 16 + 6 * 8.
  EXPECT_EQ(read_hex(kDir / "cross_term_req.hex").size(), 84u);
  EXPECT_EQ(read_hex(kDir / "hello.hex").size(), 32u);
  EXPECT_EQ(read_hex(kDir / "bye.hex").size(), 21u);
  EXPECT_EQ(read_hex(kDir / "and_triple_resp.hex").size(), 20u + 8 + 3 * 2);
}

TEST(Golden, CorruptedMagicIsRejectedAtOffsetZero) {
  auto bytes = read_hex(kDir / "bye.hex");
  bytes[0] = 'X';
  try {
    net::decode_frame(bytes);
    FAIL();
  } catch (const MalformedFrame& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

}  // namespace
}  // namespace ab2h
