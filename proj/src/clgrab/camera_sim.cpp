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

#include "clgrab/camera_sim.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <random>
#include <sstream>

#include "clgrab/error.hpp"

namespace clgrab {
namespace {

constexpr std::array<std::string_view, 9> kParamNames = {
    "WIDTH", "HEIGHT", "DEPTH", "TAPS", "MODE", "CLOCK_HZ", "PATTERN", "LINE_GAP", "FRAME_GAP"};

// Parameters that change the link geometry cannot be set while streaming.
bool locked_while_running(std::string_view name) {
  return name == "WIDTH" || name == "HEIGHT" || name == "DEPTH" || name == "TAPS" ||
         name == "MODE" || name == "CLOCK_HZ";
}

bool is_param(std::string_view name) {
  for (auto p : kParamNames) {
    if (p == name) return true;
  }
  return false;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view text) {
  std::uint64_t v = 0;
  if (text.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

std::string get_value(const CameraState& s, std::string_view name) {
  if (name == "WIDTH") return std::to_string(s.width);
  if (name == "HEIGHT") return std::to_string(s.height);
  if (name == "DEPTH") return std::to_string(s.bits_per_pixel);
  if (name == "TAPS") return std::to_string(s.taps);
  if (name == "MODE") return std::string(mode_name(s.mode));
  if (name == "CLOCK_HZ") return std::to_string(s.pixel_clock_hz);
  if (name == "PATTERN") return to_string(s.pattern);
  if (name == "LINE_GAP") return std::to_string(s.line_gap);
  return std::to_string(s.frame_gap);
}

// Parses one parameter value into its field; false when malformed or out of
// its individual range. Cross-parameter consistency is checked separately.
bool assign_param(CameraState& s, std::string_view name, std::string_view value) {
  auto in_range = [&](std::uint64_t lo, std::uint64_t hi) -> std::optional<std::uint64_t> {
    auto v = parse_unsigned(value);
    if (!v || *v < lo || *v > hi) return std::nullopt;
    return v;
  };
  if (name == "MODE") {
    auto m = parse_mode(value);
    if (!m) return false;
    s.mode = *m;
    return true;
  }
  if (name == "PATTERN") {
    auto p = parse_pattern(value);
    if (!p) return false;
    s.pattern = *p;
    return true;
  }
  if (name == "CLOCK_HZ") {
    auto v = in_range(1, kMaxPixelClockHz);
    if (!v) return false;
    s.pixel_clock_hz = *v;
    return true;
  }
  std::optional<std::uint64_t> v;
  if (name == "WIDTH" || name == "HEIGHT") v = in_range(1, kMaxDimension);
  else if (name == "DEPTH") v = in_range(8, 16);
  else if (name == "TAPS") v = in_range(1, kMaxTaps);
  else if (name == "LINE_GAP" || name == "FRAME_GAP") v = in_range(1, kMaxGap);
  if (!v) return false;
  const auto n = static_cast<std::uint32_t>(*v);
  if (name == "WIDTH") s.width = n;
  else if (name == "HEIGHT") s.height = n;
  else if (name == "DEPTH") s.bits_per_pixel = n;
  else if (name == "TAPS") s.taps = n;
  else if (name == "LINE_GAP") s.line_gap = n;
  else s.frame_gap = n;
  return true;
}

// Applies a SET to a copy of the state; empty result means bad value.
std::optional<CameraState> apply_set(CameraState s, std::string_view name,
                                     std::string_view value) {
  if (!assign_param(s, name, value)) return std::nullopt;
  if (name == "MODE") {
    // Each wide mode has a single tap geometry; switching modes adopts it.
    switch (s.mode) {
      case Mode::kBase:
        if (config_problem(s.link_config())) s.taps = 1;
        break;
      case Mode::kMedium: s.taps = 4; s.bits_per_pixel = 8; break;
      case Mode::kFull: s.taps = 8; s.bits_per_pixel = 8; break;
      case Mode::kDeca: s.taps = 10; s.bits_per_pixel = 8; break;
    }
  }
  if (state_problem(s)) return std::nullopt;
  return s;
}

const std::string kOk = "OK\r";
const std::string kErrUnknownParam = "ERR 1 unknown parameter\r";
const std::string kErrBadValue = "ERR 2 bad value\r";
const std::string kErrBadCommand = "ERR 3 bad command\r";
const std::string kErrRunning = "ERR 4 not allowed while running\r";

}  // namespace

std::string to_string(const Pattern& pattern) {
  switch (pattern.kind) {
    case PatternKind::kGradient: return "GRADIENT";
    case PatternKind::kChecker: return "CHECKER";
    case PatternKind::kCounter: return "COUNTER";
    case PatternKind::kRandom: return "RANDOM:" + std::to_string(pattern.seed);
  }
  return "?";
}

std::optional<Pattern> parse_pattern(std::string_view text) {
  if (text == "GRADIENT") return Pattern{PatternKind::kGradient, 0};
  if (text == "CHECKER") return Pattern{PatternKind::kChecker, 0};
  if (text == "COUNTER") return Pattern{PatternKind::kCounter, 0};
  if (text == "RANDOM") return Pattern{PatternKind::kRandom, 0};
  constexpr std::string_view kRandomPrefix = "RANDOM:";
  if (text.starts_with(kRandomPrefix)) {
    auto seed = parse_unsigned(text.substr(kRandomPrefix.size()));
    if (seed) return Pattern{PatternKind::kRandom, *seed};
  }
  return std::nullopt;
}

std::optional<std::string> state_problem(const CameraState& s) {
  if (auto p = config_problem(s.link_config())) return p;
  if (s.width == 0 || s.height == 0 || s.width > kMaxDimension || s.height > kMaxDimension) {
    return "width and height must be in 1.." + std::to_string(kMaxDimension);
  }
  if (s.width % s.taps != 0) return "width must be divisible by the tap count";
  if (s.line_gap == 0 || s.frame_gap == 0 || s.line_gap > kMaxGap || s.frame_gap > kMaxGap) {
    return "gaps must be in 1.." + std::to_string(kMaxGap);
  }
  return std::nullopt;
}

Frame generate_frame(const CameraState& state, std::uint64_t frame_number) {
  Frame f;
  f.width = state.width;
  f.height = state.height;
  f.bits_per_pixel = state.bits_per_pixel;
  f.pixels.resize(std::size_t{f.width} * f.height);
  const std::uint64_t mask = (std::uint64_t{1} << state.bits_per_pixel) - 1;
  auto* px = f.pixels.data();
  switch (state.pattern.kind) {
    case PatternKind::kGradient:
      for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) {
          *px++ = static_cast<std::uint16_t>((std::uint64_t{x} + y) & mask);
        }
      }
      break;
    case PatternKind::kChecker:
      for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) {
          *px++ = static_cast<std::uint16_t>(((x + y) & 1u) == 0 ? mask : 0);
        }
      }
      break;
    case PatternKind::kCounter: {
      std::uint64_t v = frame_number;
      for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        *px++ = static_cast<std::uint16_t>(v++ & mask);
      }
      break;
    }
    case PatternKind::kRandom: {
      const std::uint64_t seed = state.pattern.seed;
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(frame_number),
                        static_cast<std::uint32_t>(frame_number >> 32)};
      std::mt19937_64 rng(seq);
      for (auto& p : f.pixels) p = static_cast<std::uint16_t>(rng() & mask);
      break;
    }
  }
  return f;
}

void append_idle(const CameraState& state, std::size_t count, std::vector<ClockSample>& out) {
  ClockSample idle;
  idle.taps = static_cast<std::uint8_t>(state.taps);
  out.insert(out.end(), count, idle);
}

void append_line(const CameraState& state, const Frame& frame, std::uint32_t y,
                 std::vector<ClockSample>& out) {
  const unsigned taps = state.taps;
  const std::uint32_t clocks = frame.width / taps;
  const std::uint16_t* row = frame.pixels.data() + std::size_t{y} * frame.width;
  ClockSample active;
  active.taps = static_cast<std::uint8_t>(taps);
  active.lval = active.fval = active.dval = true;
  const std::size_t base = out.size();
  out.resize(base + clocks, active);
  ClockSample* s = out.data() + base;
  for (std::uint32_t c = 0; c < clocks; ++c, ++s, row += taps) {
    std::memcpy(s->pixels.data(), row, taps * sizeof(std::uint16_t));
  }
  if (y + 1 < frame.height) {
    ClockSample gap;
    gap.taps = static_cast<std::uint8_t>(taps);
    gap.fval = true;
    out.insert(out.end(), state.line_gap, gap);
  } else {
    append_idle(state, state.frame_gap, out);
  }
}

std::vector<ClockSample> emit_video(const CameraState& state, std::span<const Frame> frames) {
  if (auto p = state_problem(state)) throw Error(ErrorCode::kBadConfig, *p);
  std::vector<ClockSample> out;
  append_idle(state, 1, out);
  for (const Frame& f : frames) {
    if (f.width != state.width || f.height != state.height ||
        f.bits_per_pixel != state.bits_per_pixel ||
        f.pixels.size() != std::size_t{f.width} * f.height) {
      throw Error(ErrorCode::kGeometryMismatch, "frame does not match camera geometry");
    }
    for (std::uint32_t y = 0; y < f.height; ++y) append_line(state, f, y, out);
  }
  return out;
}

std::pair<std::string, CameraState> handle_command(const CameraState& state,
                                                   std::string_view line) {
  if (line.empty() || line.back() != '\r') return {kErrBadCommand, state};
  line.remove_suffix(1);
  const auto words = split_words(line);
  if (words.empty()) return {kErrBadCommand, state};
  const std::string_view verb = words[0];

  if (verb == "ID" && words.size() == 1) {
    return {"OK " + std::string(kCameraId) + "\r", state};
  }
  if ((verb == "START" || verb == "STOP") && words.size() == 1) {
    CameraState next = state;
    next.running = verb == "START";
    return {kOk, next};
  }
  if (verb == "GET" && words.size() == 2) {
    if (!is_param(words[1])) return {kErrUnknownParam, state};
    return {"OK " + get_value(state, words[1]) + "\r", state};
  }
  if (verb == "SET" && words.size() == 3) {
    if (!is_param(words[1])) return {kErrUnknownParam, state};
    if (state.running && locked_while_running(words[1])) return {kErrRunning, state};
    auto next = apply_set(state, words[1], words[2]);
    if (!next) return {kErrBadValue, state};
    return {kOk, *next};
  }
  if (verb == "SET" && words.size() == 2 && !is_param(words[1])) {
    return {kErrUnknownParam, state};
  }
  return {kErrBadCommand, state};
}

std::span<const std::string_view> camera_param_names() noexcept { return kParamNames; }

std::string format_state(const CameraState& state) {
  std::ostringstream os;
  for (auto name : kParamNames) {
    os << name << '=' << get_value(state, name) << '\n';
  }
  os << "RUNNING=" << (state.running ? 1 : 0) << '\n';
  return os.str();
}

CameraState parse_state(std::string_view text) {
  CameraState s;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kBadConfig, "camera state line without '=': " + std::string(line));
    }
    const std::string_view key = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    if (key == "RUNNING") {
      if (value != "0" && value != "1") {
        throw Error(ErrorCode::kBadConfig, "RUNNING must be 0 or 1");
      }
      s.running = value == "1";
    } else if (!is_param(key)) {
      throw Error(ErrorCode::kBadConfig, "unknown camera parameter " + std::string(key));
    } else if (!assign_param(s, key, value)) {
      throw Error(ErrorCode::kBadConfig,
                  "bad value for " + std::string(key) + ": " + std::string(value));
    }
  }
  if (auto p = state_problem(s)) throw Error(ErrorCode::kBadConfig, *p);
  return s;
}

std::string Camera::command(std::string_view line) {
  auto [reply, next] = handle_command(pending_, line);
  pending_ = std::move(next);
  return reply;
}

Frame Camera::next_frame() {
  active_ = pending_;
  return generate_frame(active_, frames_emitted_++);
}

}  // namespace clgrab
