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

// Camera control stack. The bottom layer moves characters over the camera's
// serial line; camera libraries sit on top and speak one vendor protocol
// each, reaching the wire only through a CommandChannel.

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clgrab/camera_sim.hpp"

namespace clgrab::control {

inline constexpr std::size_t kMaxLineChars = 256;

struct TransportOptions {
  std::uint32_t baud = 9600;  // characters per second
  std::chrono::milliseconds timeout{500};
  bool pace = true;  // sleep to honour the character rate
};

/// Bidirectional character channel.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void put(char c) = 0;
  /// Next received character, or nothing if none arrives within `timeout`.
  virtual std::optional<char> get(std::chrono::milliseconds timeout) = 0;
};

/// Serial line wired to a simulated camera. The camera answers as soon as it
/// receives CR, so a get() with nothing queued can only time out and returns
/// immediately.
class SimulatedUart final : public Transport {
 public:
  explicit SimulatedUart(Camera& camera) : camera_(camera) {}

  void put(char c) override;
  std::optional<char> get(std::chrono::milliseconds timeout) override;

 private:
  Camera& camera_;
  std::string rx_line_;
  std::deque<char> tx_;
};

/// A serial line with nothing attached; every read times out.
class DisconnectedUart final : public Transport {
 public:
  explicit DisconnectedUart(bool wait_out_timeouts = false) : wait_(wait_out_timeouts) {}
  void put(char) override {}
  std::optional<char> get(std::chrono::milliseconds timeout) override;

 private:
  bool wait_;
};

/// Writes `line` (CR-terminated, at most 256 characters) and reads one
/// response line. Throws LineTooLong, InvalidArgument or Timeout.
std::string send_command(Transport& transport, std::string_view line,
                         const TransportOptions& options = {});

/// The only path from a camera library to the wire.
class CommandChannel {
 public:
  virtual ~CommandChannel() = default;
  virtual std::string transact(std::string_view line) = 0;
};

class UartChannel final : public CommandChannel {
 public:
  UartChannel(Transport& transport, TransportOptions options = {})
      : transport_(transport), options_(options) {}
  std::string transact(std::string_view line) override {
    return send_command(transport_, line, options_);
  }

 private:
  Transport& transport_;
  TransportOptions options_;
};

enum class ParamType { kInteger, kEnumeration };

struct ParamDescriptor {
  std::string name;
  ParamType type = ParamType::kInteger;
  std::int64_t min = 0;
  std::int64_t max = 0;
  /// Allowed values. For integers, restricts the range further when set.
  /// An enumeration entry ending in ":*" admits that prefix plus digits.
  std::vector<std::string> choices;
  bool read_only = false;
};

using ParamValue = std::variant<std::int64_t, std::string>;

std::string to_string(const ParamValue& value);

/// A parsed response line.
struct Response {
  bool ok = false;
  std::string value;  // text after "OK " when present
  int error_code = 0;
  std::string error_message;
};

/// Throws Io for lines that are neither OK nor ERR responses.
Response parse_response(std::string_view line);

/// Typed access to one camera model's protocol.
class CameraLibrary {
 public:
  virtual ~CameraLibrary() = default;
  virtual std::string_view id() const = 0;
  virtual std::span<const ParamDescriptor> params() const = 0;

  /// Throws UnknownParam or RemoteError.
  virtual ParamValue get_param(std::string_view name) = 0;
  /// Validates client-side before any traffic. Throws UnknownParam,
  /// OutOfRange or RemoteError.
  virtual void set_param(std::string_view name, const ParamValue& value) = 0;
  virtual void start() = 0;
  virtual void stop() = 0;
  /// The camera's identification string.
  virtual std::string identify() = 0;

  const ParamDescriptor* find_param(std::string_view name) const;
};

/// Library for the reference protocol spoken by the simulated camera.
class ReferenceCamera final : public CameraLibrary {
 public:
  explicit ReferenceCamera(CommandChannel& channel) : channel_(channel) {}

  std::string_view id() const override { return kCameraId; }
  std::span<const ParamDescriptor> params() const override;
  ParamValue get_param(std::string_view name) override;
  void set_param(std::string_view name, const ParamValue& value) override;
  void start() override;
  void stop() override;
  std::string identify() override;

 private:
  Response call(const std::string& line);

  CommandChannel& channel_;
};

/// Throws OutOfRange when `value` violates the descriptor.
void check_value(const ParamDescriptor& param, const ParamValue& value);

/// Converts protocol text into the descriptor's value type.
ParamValue parse_value(const ParamDescriptor& param, std::string_view text);

/// Camera libraries keyed by the string a camera returns for ID.
class CameraRegistry {
 public:
  using Factory = std::function<std::unique_ptr<CameraLibrary>(CommandChannel&)>;

  /// Registry pre-populated with the reference camera library.
  static CameraRegistry with_builtin();

  void add(std::string id, Factory factory);
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  /// Throws InvalidArgument if no library is registered for `id`.
  std::unique_ptr<CameraLibrary> create(std::string_view id, CommandChannel& channel) const;
  /// Asks the camera for its ID and builds the matching library.
  std::unique_ptr<CameraLibrary> detect(CommandChannel& channel) const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
};

}  // namespace clgrab::control
