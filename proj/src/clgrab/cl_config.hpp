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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace clgrab {

enum class Mode { kBase, kMedium, kFull, kDeca };

inline constexpr std::uint64_t kMaxPixelClockHz = 85'000'000;
inline constexpr unsigned kMaxTaps = 10;

/// Link geometry: which Camera Link configuration, how many pixels travel per
/// clock and at what depth.
struct CLConfig {
  Mode mode = Mode::kBase;
  unsigned taps = 1;
  unsigned bits_per_pixel = 8;
  std::uint64_t pixel_clock_hz = kMaxPixelClockHz;

  friend bool operator==(const CLConfig&, const CLConfig&) = default;
};

/// Channels carried by a mode: Base 1, Medium 2, Full and Deca 3.
unsigned channel_count(Mode mode) noexcept;

/// Data bits available per clock: 24, 48, 64 or 80.
unsigned data_bits(Mode mode) noexcept;

/// Empty when the configuration is supported, otherwise the reason.
std::optional<std::string> config_problem(const CLConfig& config);

/// Throws Error(kBadConfig) when the configuration is not supported.
void validate(const CLConfig& config);

/// Bytes used to store one pixel downstream: 1 for 8-bit, 2 otherwise.
constexpr unsigned container_bytes(unsigned bits_per_pixel) noexcept {
  return bits_per_pixel <= 8 ? 1u : 2u;
}

std::string_view mode_name(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

}  // namespace clgrab
