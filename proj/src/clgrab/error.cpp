// Copyright 2026 The clgrab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clgrab/error.hpp"

namespace clgrab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kNoAlignment: return "NoAlignment";
    case ErrorCode::kTruncatedWord: return "TruncatedWord";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDepthOverflow: return "DepthOverflow";
    case ErrorCode::kGeometryMismatch: return "GeometryMismatch";
    case ErrorCode::kRaggedLines: return "RaggedLines";
    case ErrorCode::kEmptyFrame: return "EmptyFrame";
    case ErrorCode::kUnderflow: return "Underflow";
    case ErrorCode::kCorruptInfo: return "CorruptInfo";
    case ErrorCode::kBadGeometry: return "BadGeometry";
    case ErrorCode::kMismatch: return "Mismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kLineTooLong: return "LineTooLong";
    case ErrorCode::kUnknownParam: return "UnknownParam";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kRemoteError: return "RemoteError";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kPipeline: return "Pipeline";
  }
  return "Unknown";
}

}  // namespace clgrab
