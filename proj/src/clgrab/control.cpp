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

#include "clgrab/control.hpp"

#include <charconv>
#include <thread>

#include "clgrab/error.hpp"

namespace clgrab::control {
namespace {

std::vector<ParamDescriptor> make_reference_params() {
  const auto dim = static_cast<std::int64_t>(kMaxDimension);
  const auto gap = static_cast<std::int64_t>(kMaxGap);
  return {
      {"WIDTH", ParamType::kInteger, 1, dim, {}, false},
      {"HEIGHT", ParamType::kInteger, 1, dim, {}, false},
      {"DEPTH", ParamType::kInteger, 8, 16, {"8", "10", "12", "16"}, false},
      {"TAPS", ParamType::kInteger, 1, static_cast<std::int64_t>(kMaxTaps), {}, false},
      {"MODE", ParamType::kEnumeration, 0, 0, {"BASE", "MEDIUM", "FULL", "DECA"}, false},
      {"CLOCK_HZ", ParamType::kInteger, 1, static_cast<std::int64_t>(kMaxPixelClockHz), {}, false},
      {"PATTERN", ParamType::kEnumeration, 0, 0,
       {"GRADIENT", "CHECKER", "COUNTER", "RANDOM", "RANDOM:*"}, false},
      {"LINE_GAP", ParamType::kInteger, 1, gap, {}, false},
      {"FRAME_GAP", ParamType::kInteger, 1, gap, {}, false},
  };
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool choice_matches(std::string_view choice, std::string_view value) {
  if (choice.ends_with(":*")) {
    const auto prefix = choice.substr(0, choice.size() - 1);
    return value.starts_with(prefix) && all_digits(value.substr(prefix.size()));
  }
  return choice == value;
}

}  // namespace

// ------------------------------------------------------------ transports

void SimulatedUart::put(char c) {
  rx_line_.push_back(c);
  if (c == '\r') {
    const std::string reply = camera_.command(rx_line_);
    rx_line_.clear();
    tx_.insert(tx_.end(), reply.begin(), reply.end());
  }
}

std::optional<char> SimulatedUart::get(std::chrono::milliseconds) {
  if (tx_.empty()) return std::nullopt;
  const char c = tx_.front();
  tx_.pop_front();
  return c;
}

std::optional<char> DisconnectedUart::get(std::chrono::milliseconds timeout) {
  if (wait_) std::this_thread::sleep_for(timeout);
  return std::nullopt;
}

std::string send_command(Transport& transport, std::string_view line,
                         const TransportOptions& options) {
  if (line.size() > kMaxLineChars) {
    throw Error(ErrorCode::kLineTooLong, "command of " + std::to_string(line.size()) +
                                             " characters exceeds " +
                                             std::to_string(kMaxLineChars));
  }
  if (line.empty() || line.back() != '\r' || line.find('\r') != line.size() - 1) {
    throw Error(ErrorCode::kInvalidArgument, "command must be a single CR-terminated line");
  }
  using Clock = std::chrono::steady_clock;
  const auto char_period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(1.0 / std::max<std::uint32_t>(options.baud, 1)));
  const auto start = Clock::now();
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (options.pace) std::this_thread::sleep_until(start + char_period * static_cast<long>(i));
    transport.put(line[i]);
  }
  std::string reply;
  while (true) {
    auto c = transport.get(options.timeout);
    if (!c) {
      throw Error(ErrorCode::kTimeout, "no response within " +
                                           std::to_string(options.timeout.count()) + " ms");
    }
    reply.push_back(*c);
    if (*c == '\r') return reply;
    if (reply.size() > kMaxLineChars) {
      throw Error(ErrorCode::kLineTooLong, "response exceeds " + std::to_string(kMaxLineChars) +
                                               " characters");
    }
  }
}

// ------------------------------------------------------------ responses

std::string to_string(const ParamValue& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  return std::get<std::string>(value);
}

Response parse_response(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Response r;
  if (line == "OK") {
    r.ok = true;
    return r;
  }
  if (line.starts_with("OK ")) {
    r.ok = true;
    r.value = std::string(line.substr(3));
    return r;
  }
  if (line.starts_with("ERR ")) {
    std::string_view rest = line.substr(4);
    const auto space = rest.find(' ');
    const std::string_view code = rest.substr(0, space);
    int value = 0;
    auto [ptr, ec] = std::from_chars(code.data(), code.data() + code.size(), value);
    if (ec == std::errc() && ptr == code.data() + code.size() && !code.empty()) {
      r.error_code = value;
      r.error_message = space == std::string_view::npos ? "" : std::string(rest.substr(space + 1));
      return r;
    }
  }
  throw Error(ErrorCode::kIo, "malformed response: " + std::string(line));
}

// -------------------------------------------------------------- library

const ParamDescriptor* CameraLibrary::find_param(std::string_view name) const {
  for (const auto& p : params()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void check_value(const ParamDescriptor& param, const ParamValue& value) {
  if (param.read_only) {
    throw Error(ErrorCode::kOutOfRange, param.name + " is read-only");
  }
  if (param.type == ParamType::kInteger) {
    const auto* v = std::get_if<std::int64_t>(&value);
    if (!v) throw Error(ErrorCode::kOutOfRange, param.name + " takes an integer");
    bool ok = *v >= param.min && *v <= param.max;
    if (ok && !param.choices.empty()) {
      ok = false;
      for (const auto& c : param.choices) ok = ok || c == std::to_string(*v);
    }
    if (!ok) {
      throw Error(ErrorCode::kOutOfRange,
                  std::to_string(*v) + " is out of range for " + param.name);
    }
    return;
  }
  const auto* s = std::get_if<std::string>(&value);
  if (!s) throw Error(ErrorCode::kOutOfRange, param.name + " takes one of its named values");
  for (const auto& c : param.choices) {
    if (choice_matches(c, *s)) return;
  }
  throw Error(ErrorCode::kOutOfRange, *s + " is not a valid " + param.name);
}

ParamValue parse_value(const ParamDescriptor& param, std::string_view text) {
  if (param.type == ParamType::kEnumeration) return std::string(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kIo, param.name + " value is not an integer: " + std::string(text));
  }
  return v;
}

std::span<const ParamDescriptor> ReferenceCamera::params() const {
  static const std::vector<ParamDescriptor> kParams = make_reference_params();
  return kParams;
}

Response ReferenceCamera::call(const std::string& line) {
  Response r = parse_response(channel_.transact(line));
  if (!r.ok) throw RemoteError(r.error_code, r.error_message);
  return r;
}

ParamValue ReferenceCamera::get_param(std::string_view name) {
  const ParamDescriptor* p = find_param(name);
  if (!p) throw Error(ErrorCode::kUnknownParam, "unknown parameter " + std::string(name));
  return parse_value(*p, call("GET " + p->name + "\r").value);
}

void ReferenceCamera::set_param(std::string_view name, const ParamValue& value) {
  const ParamDescriptor* p = find_param(name);
  if (!p) throw Error(ErrorCode::kUnknownParam, "unknown parameter " + std::string(name));
  check_value(*p, value);
  call("SET " + p->name + " " + to_string(value) + "\r");
}

void ReferenceCamera::start() { call("START\r"); }
void ReferenceCamera::stop() { call("STOP\r"); }
std::string ReferenceCamera::identify() { return call("ID\r").value; }

// ------------------------------------------------------------- registry

CameraRegistry CameraRegistry::with_builtin() {
  CameraRegistry r;
  r.add(std::string(kCameraId),
        [](CommandChannel& ch) { return std::make_unique<ReferenceCamera>(ch); });
  return r;
}

void CameraRegistry::add(std::string id, Factory factory) {
  factories_[std::move(id)] = std::move(factory);
}

bool CameraRegistry::contains(std::string_view id) const {
  return factories_.find(id) != factories_.end();
}

std::vector<std::string> CameraRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, f] : factories_) out.push_back(id);
  return out;
}

std::unique_ptr<CameraLibrary> CameraRegistry::create(std::string_view id,
                                                      CommandChannel& channel) const {
  auto it = factories_.find(id);
  if (it == factories_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "no camera library for " + std::string(id));
  }
  return it->second(channel);
}

std::unique_ptr<CameraLibrary> CameraRegistry::detect(CommandChannel& channel) const {
  Response r = parse_response(channel.transact("ID\r"));
  if (!r.ok) throw RemoteError(r.error_code, r.error_message);
  return create(r.value, channel);
}

}  // namespace clgrab::control
