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

#pragma once

#include <stdexcept>
#include <string>

namespace clgrab {

enum class ErrorCode {
  kInvalidArgument,
  kBadConfig,
  kNoAlignment,
  kTruncatedWord,
  kLengthMismatch,
  kDepthOverflow,
  kGeometryMismatch,
  kRaggedLines,
  kEmptyFrame,
  kUnderflow,
  kCorruptInfo,
  kBadGeometry,
  kMismatch,
  kTimeout,
  kLineTooLong,
  kUnknownParam,
  kOutOfRange,
  kRemoteError,
  kIo,
  kPipeline,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the core library carries one of the codes above;
/// the C API maps them one-to-one onto clgrab_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Camera-side ERR response surfaced by the control library.
class RemoteError : public Error {
 public:
  RemoteError(int remote_code, std::string message)
      : Error(ErrorCode::kRemoteError,
              "camera error " + std::to_string(remote_code) + ": " + message),
        remote_code_(remote_code),
        message_(std::move(message)) {}

  int remote_code() const noexcept { return remote_code_; }
  const std::string& remote_message() const noexcept { return message_; }

 private:
  int remote_code_;
  std::string message_;
};

}  // namespace clgrab
