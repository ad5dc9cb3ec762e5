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

// On-disk share files.
//
//   offset  size  field
//   0       4     magic "AB2S"
//   4       1     version 0x01
//   5       1     kind: 0x01 arithmetic, 0x02 boolean
//   6       1     party id
//   7       1     fractional bits f
//   8       4     rows (u32 LE)
//   12      4     cols (u32 LE)
//   16      ...   payload
//
// Arithmetic payload: rows*cols pairs (Delta u64 LE, delta_i u64 LE),
// row-major. Boolean payload: the Delta plane then the delta_i plane, each
// bit-packed LSB first and padded to a whole byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "ab2h/party.h"
#include "ab2h/ring.h"
#include "ab2h/shares.h"

namespace ab2h {

inline constexpr char kShareFileMagic[4] = {'A', 'B', '2', 'S'};
inline constexpr std::uint8_t kShareFileVersion = 0x01;
inline constexpr std::size_t kShareFileHeaderSize = 16;

enum class ShareKind : std::uint8_t { kArith = 0x01, kBool = 0x02 };

struct ShareFileHeader {
  ShareKind kind = ShareKind::kArith;
  Party party = Party::k0;
  std::uint8_t fractional_bits = kDefaultFractionalBits;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  std::size_t elements() const noexcept {
    return std::size_t{rows} * std::size_t{cols};
  }
  std::size_t payload_size() const noexcept;

  friend bool operator==(const ShareFileHeader&,
                         const ShareFileHeader&) = default;
};

// A boolean share as stored on disk. Booleans are plain XOR shares in
// memory; the file keeps the two-plane layout, and the writer emits an
// all-zero Delta plane.
struct BoolShareFile {
  ShareFileHeader header;
  std::vector<std::uint8_t> delta_pub;   // 0/1 per position
  std::vector<std::uint8_t> delta_priv;  // 0/1 per position
};

std::vector<std::uint8_t> encode_share_header(const ShareFileHeader& h);
// Throws FileFormatError.
ShareFileHeader decode_share_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_arith_file(const ShareTensor& t);
ShareTensor decode_arith_file(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_bool_file(const BoolShare& b,
                                           std::uint32_t rows,
                                           std::uint32_t cols,
                                           const FixedPointConfig& fp);
BoolShareFile decode_bool_file(std::span<const std::uint8_t> bytes);
// Folds the Delta plane into party 0's bits.
BoolShare to_bool_share(const BoolShareFile& f);

void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

void write_arith_file(const std::filesystem::path& path, const ShareTensor& t);
ShareTensor read_arith_file(const std::filesystem::path& path);
void write_bool_file(const std::filesystem::path& path, const BoolShare& b,
                     const FixedPointConfig& fp);
BoolShareFile read_bool_file(const std::filesystem::path& path);

// Reads row ranges of an arithmetic share file without loading the rest,
// so a weight matrix can be streamed one split block at a time.
class ArithFileReader {
 public:
  explicit ArithFileReader(const std::filesystem::path& path);

  const ShareFileHeader& header() const noexcept { return header_; }
  FixedPointConfig fixed_point() const {
    return FixedPointConfig(header_.fractional_bits);
  }

  ShareTensor read_rows(std::uint32_t begin, std::uint32_t end);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  ShareFileHeader header_;
};

}  // namespace ab2h
