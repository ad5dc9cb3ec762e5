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

#include "ab2h/share_file.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "ab2h/error.h"
#include "ab2h/net/byteorder.h"

namespace ab2h {
namespace {

std::size_t packed_bytes(std::size_t bits) { return (bits + 7) / 8; }

void pack_plane(std::span<const std::uint8_t> bits,
                std::vector<std::uint8_t>& out) {
  const std::size_t base = out.size();
  out.resize(base + packed_bytes(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1u) out[base + i / 8] |= std::uint8_t(1u << (i % 8));
  }
}

std::vector<std::uint8_t> unpack_plane(std::span<const std::uint8_t> bytes,
                                       std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return bits;
}

void check_payload(const ShareFileHeader& h, std::size_t total) {
  const std::size_t want = kShareFileHeaderSize + h.payload_size();
  if (total != want) {
    fail(ErrorCode::kFileFormat,
         "share file is " + std::to_string(total) + " bytes, header implies " +
             std::to_string(want));
  }
}

}  // namespace

std::size_t ShareFileHeader::payload_size() const noexcept {
  if (kind == ShareKind::kArith) return elements() * 16;
  return 2 * packed_bytes(elements());
}

std::vector<std::uint8_t> encode_share_header(const ShareFileHeader& h) {
  std::vector<std::uint8_t> out(kShareFileHeaderSize);
  std::memcpy(out.data(), kShareFileMagic, 4);
  out[4] = kShareFileVersion;
  out[5] = static_cast<std::uint8_t>(h.kind);
  out[6] = static_cast<std::uint8_t>(h.party);
  out[7] = h.fractional_bits;
  net::store_le(out.data() + 8, h.rows);
  net::store_le(out.data() + 12, h.cols);
  return out;
}

ShareFileHeader decode_share_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kShareFileHeaderSize) {
    fail(ErrorCode::kFileFormat, "share file shorter than its 16-byte header");
  }
  if (std::memcmp(bytes.data(), kShareFileMagic, 4) != 0) {
    fail(ErrorCode::kFileFormat, "bad share file magic");
  }
  if (bytes[4] != kShareFileVersion) {
    fail(ErrorCode::kFileFormat,
         "unsupported share file version " + std::to_string(bytes[4]));
  }
  ShareFileHeader h;
  if (bytes[5] != 0x01 && bytes[5] != 0x02) {
    fail(ErrorCode::kFileFormat,
         "unknown share kind " + std::to_string(bytes[5]));
  }
  h.kind = static_cast<ShareKind>(bytes[5]);
  if (bytes[6] > 1) {
    fail(ErrorCode::kFileFormat, "party id " + std::to_string(bytes[6]));
  }
  h.party = party_from_index(bytes[6]);
  h.fractional_bits = bytes[7];
  if (h.fractional_bits < 1 || h.fractional_bits > 60) {
    fail(ErrorCode::kFileFormat,
         "fractional bits " + std::to_string(h.fractional_bits));
  }
  h.rows = net::load_le<std::uint32_t>(bytes.data() + 8);
  h.cols = net::load_le<std::uint32_t>(bytes.data() + 12);
  return h;
}

std::vector<std::uint8_t> encode_arith_file(const ShareTensor& t) {
  ShareFileHeader h;
  h.kind = ShareKind::kArith;
  h.party = t.party();
  h.fractional_bits =
      static_cast<std::uint8_t>(t.fixed_point().fractional_bits());
  h.rows = static_cast<std::uint32_t>(t.rows());
  h.cols = static_cast<std::uint32_t>(t.cols());
  auto out = encode_share_header(h);
  out.resize(kShareFileHeaderSize + h.payload_size());
  std::uint8_t* p = out.data() + kShareFileHeaderSize;
  for (std::size_t i = 0; i < t.size(); ++i, p += 16) {
    net::store_le(p, t.pub()[i]);
    net::store_le(p + 8, t.priv()[i]);
  }
  return out;
}

ShareTensor decode_arith_file(std::span<const std::uint8_t> bytes) {
  const ShareFileHeader h = decode_share_header(bytes);
  if (h.kind != ShareKind::kArith) {
    fail(ErrorCode::kFileFormat, "expected an arithmetic share file");
  }
  check_payload(h, bytes.size());
  ShareTensor t(h.party, FixedPointConfig(h.fractional_bits), h.rows, h.cols);
  const std::uint8_t* p = bytes.data() + kShareFileHeaderSize;
  for (std::size_t i = 0; i < t.size(); ++i, p += 16) {
    t.pub()[i] = net::load_le<std::uint64_t>(p);
    t.priv()[i] = net::load_le<std::uint64_t>(p + 8);
  }
  return t;
}

std::vector<std::uint8_t> encode_bool_file(const BoolShare& b,
                                           std::uint32_t rows,
                                           std::uint32_t cols,
                                           const FixedPointConfig& fp) {
  ShareFileHeader h;
  h.kind = ShareKind::kBool;
  h.party = b.party;
  h.fractional_bits = static_cast<std::uint8_t>(fp.fractional_bits());
  h.rows = rows;
  h.cols = cols;
  if (h.elements() != b.bits.size()) {
    fail(ErrorCode::kDimsMismatch, "boolean share length does not match dims");
  }
  auto out = encode_share_header(h);
  const std::vector<std::uint8_t> zeros(b.bits.size(), 0);
  pack_plane(zeros, out);
  pack_plane(b.bits, out);
  return out;
}

BoolShareFile decode_bool_file(std::span<const std::uint8_t> bytes) {
  BoolShareFile f;
  f.header = decode_share_header(bytes);
  if (f.header.kind != ShareKind::kBool) {
    fail(ErrorCode::kFileFormat, "expected a boolean share file");
  }
  check_payload(f.header, bytes.size());
  const std::size_t n = f.header.elements();
  const std::size_t plane = packed_bytes(n);
  const auto body = bytes.subspan(kShareFileHeaderSize);
  f.delta_pub = unpack_plane(body.first(plane), n);
  f.delta_priv = unpack_plane(body.subspan(plane, plane), n);
  return f;
}

BoolShare to_bool_share(const BoolShareFile& f) {
  BoolShare b{f.delta_priv, f.header.party};
  if (f.header.party == Party::k0) {
    for (std::size_t i = 0; i < b.bits.size(); ++i) b.bits[i] ^= f.delta_pub[i];
  }
  return b;
}

void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> out(size);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(size));
  if (!in) fail(ErrorCode::kIo, "short read from " + path.string());
  return out;
}

void write_arith_file(const std::filesystem::path& path, const ShareTensor& t) {
  write_bytes(path, encode_arith_file(t));
}

ShareTensor read_arith_file(const std::filesystem::path& path) {
  return decode_arith_file(read_bytes(path));
}

void write_bool_file(const std::filesystem::path& path, const BoolShare& b,
                     const FixedPointConfig& fp) {
  write_bytes(path, encode_bool_file(
                        b, static_cast<std::uint32_t>(b.bits.size()), 1, fp));
}

BoolShareFile read_bool_file(const std::filesystem::path& path) {
  return decode_bool_file(read_bytes(path));
}

ArithFileReader::ArithFileReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::uint8_t raw[kShareFileHeaderSize];
  in_.read(reinterpret_cast<char*>(raw), sizeof raw);
  if (!in_) {
    fail(ErrorCode::kFileFormat, path.string() + ": truncated header");
  }
  header_ = decode_share_header(raw);
  if (header_.kind != ShareKind::kArith) {
    fail(ErrorCode::kFileFormat,
         path.string() + ": expected an arithmetic share file");
  }
  in_.seekg(0, std::ios::end);
  check_payload(header_, static_cast<std::size_t>(in_.tellg()));
}

ShareTensor ArithFileReader::read_rows(std::uint32_t begin, std::uint32_t end) {
  if (begin > end || end > header_.rows) {
    fail(ErrorCode::kDimsMismatch, "row range outside " + path_.string());
  }
  ShareTensor t(header_.party, fixed_point(), end - begin, header_.cols);
  // One row of raw bytes at a time keeps the staging buffer at O(cols).
  const std::size_t cols = header_.cols;
  std::vector<std::uint8_t> raw(16 * cols);
  MeterCharge charge(slots_for_bytes(raw.size()));
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(kShareFileHeaderSize +
                                        std::size_t{begin} * cols * 16));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    in_.read(reinterpret_cast<char*>(raw.data()),
             static_cast<std::streamsize>(raw.size()));
    if (!in_) fail(ErrorCode::kIo, "short read from " + path_.string());
    for (std::size_t j = 0; j < cols; ++j) {
      t.pub()[r * cols + j] = net::load_le<std::uint64_t>(raw.data() + 16 * j);
      t.priv()[r * cols + j] =
          net::load_le<std::uint64_t>(raw.data() + 16 * j + 8);
    }
  }
  return t;
}

}  // namespace ab2h
