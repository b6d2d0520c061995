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

#include "clgrab/cl_config.hpp"

#include <array>
#include <cctype>

#include "clgrab/error.hpp"

namespace clgrab {

unsigned channel_count(Mode mode) noexcept {
  switch (mode) {
    case Mode::kBase: return 1;
    case Mode::kMedium: return 2;
    case Mode::kFull:
    case Mode::kDeca: return 3;
  }
  return 0;
}

unsigned data_bits(Mode mode) noexcept {
  switch (mode) {
    case Mode::kBase: return 24;
    case Mode::kMedium: return 48;
    case Mode::kFull: return 64;
    case Mode::kDeca: return 80;
  }
  return 0;
}

std::optional<std::string> config_problem(const CLConfig& config) {
  if (config.pixel_clock_hz == 0 || config.pixel_clock_hz > kMaxPixelClockHz) {
    return "pixel clock must be in 1.." + std::to_string(kMaxPixelClockHz) + " Hz";
  }
  const unsigned depth = config.bits_per_pixel;
  if (depth != 8 && depth != 10 && depth != 12 && depth != 16) {
    return "bits per pixel must be 8, 10, 12 or 16";
  }
  bool supported = false;
  switch (config.mode) {
    case Mode::kBase:
      supported = (depth == 8 && config.taps >= 1 && config.taps <= 3) ||
                  (depth != 8 && config.taps == 1);
      break;
    case Mode::kMedium: supported = depth == 8 && config.taps == 4; break;
    case Mode::kFull: supported = depth == 8 && config.taps == 8; break;
    case Mode::kDeca: supported = depth == 8 && config.taps == 10; break;
  }
  if (!supported) {
    return std::string(mode_name(config.mode)) + " does not support " +
           std::to_string(config.taps) + " taps x " + std::to_string(depth) + " bits";
  }
  return std::nullopt;
}

void validate(const CLConfig& config) {
  if (auto problem = config_problem(config)) {
    throw Error(ErrorCode::kBadConfig, *problem);
  }
}

std::string_view mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::kBase: return "BASE";
    case Mode::kMedium: return "MEDIUM";
    case Mode::kFull: return "FULL";
    case Mode::kDeca: return "DECA";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
  static constexpr std::array<Mode, 4> kModes = {Mode::kBase, Mode::kMedium,
                                                 Mode::kFull, Mode::kDeca};
  for (Mode m : kModes) {
    const std::string_view name = mode_name(m);
    if (name.size() != text.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text[i])) != name[i]) same = false;
    }
    if (same) return m;
  }
  return std::nullopt;
}

}  // namespace clgrab
