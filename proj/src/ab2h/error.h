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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ab2h {

// Every failure the library can report. The numeric values are stable: they
// double as the C API status codes and as the CLI process exit codes.
enum class ErrorCode : int {
  kOk = 0,

  kUsage = 2,
  kInternal = 3,

  kRange = 10,
  kConfig = 11,
  kRng = 12,

  kShareMismatch = 20,
  kLengthMismatch = 21,
  kDimsMismatch = 22,
  kSessionMismatch = 23,
  kSplitMismatch = 24,
  kCounterSkew = 25,
  kTripleExhausted = 26,
  kEmptyInput = 27,

  kTimeout = 30,
  kPeerTimeout = 31,
  kHelperTimeout = 32,
  kHandshakeTimeout = 33,
  kIncompatiblePeer = 34,
  kProtocol = 35,
  kConnectionClosed = 36,
  kServerUnreachable = 37,
  kHelperUnreachable = 38,
  kPeerUnreachable = 39,
  kBind = 40,

  kMalformedFrame = 45,
  kVersionMismatch = 46,

  kFileFormat = 50,
  kCsvFormat = 51,
  kChain = 52,
  kNotOneHot = 53,
  kIo = 54,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the frame decoder; `offset` is the byte position in the stream
// where decoding gave up.
class MalformedFrame : public Error {
 public:
  MalformedFrame(std::size_t offset, const std::string& what)
      : Error(ErrorCode::kMalformedFrame,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ab2h
