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

// Simulated Camera Link camera: deterministic test patterns, FVAL/LVAL/DVAL
// timing around them, and the reference control protocol spoken on its UART.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clgrab/cl_config.hpp"
#include "clgrab/tap_mapper.hpp"

namespace clgrab {

struct Frame {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  unsigned bits_per_pixel = 8;
  std::vector<std::uint16_t> pixels;  // row-major

  std::uint16_t at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }
  std::size_t byte_count() const noexcept {
    return std::size_t{width} * height * container_bytes(bits_per_pixel);
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class PatternKind { kGradient, kChecker, kCounter, kRandom };

struct Pattern {
  PatternKind kind = PatternKind::kGradient;
  std::uint64_t seed = 0;  // RANDOM only

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// GRADIENT, CHECKER, COUNTER, RANDOM or RANDOM:<seed>.
std::string to_string(const Pattern& pattern);
std::optional<Pattern> parse_pattern(std::string_view text);

struct CameraState {
  std::uint32_t width = 1024;
  std::uint32_t height = 768;
  unsigned bits_per_pixel = 8;
  unsigned taps = 1;
  Mode mode = Mode::kBase;
  std::uint64_t pixel_clock_hz = kMaxPixelClockHz;
  Pattern pattern;
  std::uint32_t line_gap = 4;
  std::uint32_t frame_gap = 16;
  bool running = false;

  CLConfig link_config() const noexcept {
    return CLConfig{mode, taps, bits_per_pixel, pixel_clock_hz};
  }

  friend bool operator==(const CameraState&, const CameraState&) = default;
};

inline constexpr std::uint32_t kMaxDimension = 16384;
inline constexpr std::uint32_t kMaxGap = 65535;

std::optional<std::string> state_problem(const CameraState& state);

/// Deterministic in (state, frame_number).
Frame generate_frame(const CameraState& state, std::uint64_t frame_number);

/// Appends `count` all-low clocks.
void append_idle(const CameraState& state, std::size_t count, std::vector<ClockSample>& out);

/// Appends line `y` of `frame` followed by its trailing gap: line_gap clocks
/// with FVAL held high, or frame_gap idle clocks after the last line.
void append_line(const CameraState& state, const Frame& frame, std::uint32_t y,
                 std::vector<ClockSample>& out);

/// One idle lead-in clock, then every frame with its line and frame gaps.
/// Throws GeometryMismatch if a frame disagrees with the state geometry.
std::vector<ClockSample> emit_video(const CameraState& state, std::span<const Frame> frames);

/// Reference UART protocol. Never throws for protocol-level problems; those
/// become ERR responses and leave the state unchanged.
std::pair<std::string, CameraState> handle_command(const CameraState& state,
                                                   std::string_view line);

inline constexpr std::string_view kCameraId = "CLGRAB-SIM 1.0";

/// Parameter names understood by GET/SET, in protocol order.
std::span<const std::string_view> camera_param_names() noexcept;

/// key=value lines, one per parameter plus RUNNING. parse_state starts from
/// the defaults, overrides the listed keys and validates the result as a whole.
std::string format_state(const CameraState& state);
CameraState parse_state(std::string_view text);

/// Single-owner camera: commands edit the pending state, which becomes the
/// active state at the next frame boundary.
class Camera {
 public:
  Camera() = default;
  explicit Camera(CameraState state) : pending_(state), active_(state) {}

  std::string command(std::string_view line);

  const CameraState& state() const noexcept { return pending_; }
  const CameraState& active() const noexcept { return active_; }
  std::uint64_t frames_emitted() const noexcept { return frames_emitted_; }

  /// Applies pending changes and generates the next frame.
  Frame next_frame();

 private:
  CameraState pending_;
  CameraState active_;
  std::uint64_t frames_emitted_ = 0;
};

}  // namespace clgrab
