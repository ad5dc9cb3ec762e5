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

#include "ab2h/error.h"

namespace ab2h {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kUsage: return "UsageError";
    case ErrorCode::kInternal: return "InternalError";
    case ErrorCode::kRange: return "RangeError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kRng: return "RngError";
    case ErrorCode::kShareMismatch: return "ShareMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDimsMismatch: return "DimsMismatch";
    case ErrorCode::kSessionMismatch: return "SessionMismatch";
    case ErrorCode::kSplitMismatch: return "SplitMismatch";
    case ErrorCode::kCounterSkew: return "CounterSkew";
    case ErrorCode::kTripleExhausted: return "TripleExhausted";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kPeerTimeout: return "PeerTimeout";
    case ErrorCode::kHelperTimeout: return "HelperTimeout";
    case ErrorCode::kHandshakeTimeout: return "HandshakeTimeout";
    case ErrorCode::kIncompatiblePeer: return "IncompatiblePeer";
    case ErrorCode::kProtocol: return "ProtocolError";
    case ErrorCode::kConnectionClosed: return "ConnectionClosed";
    case ErrorCode::kServerUnreachable: return "ServerUnreachable";
    case ErrorCode::kHelperUnreachable: return "HelperUnreachable";
    case ErrorCode::kPeerUnreachable: return "PeerUnreachable";
    case ErrorCode::kBind: return "BindError";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kFileFormat: return "FileFormatError";
    case ErrorCode::kCsvFormat: return "CsvFormatError";
    case ErrorCode::kChain: return "ChainError";
    case ErrorCode::kNotOneHot: return "NotOneHot";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace ab2h
