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

// Pixel <-> link-word rearrangement for each supported configuration.
//
// Pixels are packed tap 0 first, least significant bit first, into the data
// region of the 84-bit group. Base/Medium/Full use ports A, B, C (bits 0-23)
// of each active channel in channel order, with LVAL/FVAL/DVAL/spare
// replicated at bits 24-27 of every active channel. Deca fills X bits 0-23,
// then all 28 bits of Y and Z (80 data bits) and keeps sync on X bits 24-27.
// Decoding always reads sync from X.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "clgrab/cl_config.hpp"
#include "clgrab/link_codec.hpp"

namespace clgrab {

/// Pixel payload plus sync flags for one pixel clock.
struct ClockSample {
  std::array<std::uint16_t, kMaxTaps> pixels{};
  std::uint8_t taps = 0;
  bool lval = false;
  bool fval = false;
  bool dval = false;
  bool spare = false;

  std::span<const std::uint16_t> pixel_span() const noexcept { return {pixels.data(), taps}; }
  std::span<std::uint16_t> pixel_span() noexcept { return {pixels.data(), taps}; }

  friend bool operator==(const ClockSample&, const ClockSample&) = default;
};

/// Throws DepthOverflow if a pixel does not fit the configured depth and
/// InvalidArgument if the tap count disagrees with the configuration.
link::LineGroup pixels_to_group(const ClockSample& sample, const CLConfig& config);

/// Inverse of pixels_to_group; bits outside the data and sync regions of the
/// configuration are ignored.
ClockSample group_to_pixels(const link::LineGroup& group, const CLConfig& config);

/// Block forms of the two mappings; `out` is resized to match `in`.
void pixels_to_groups(std::span<const ClockSample> in, const CLConfig& config,
                      std::vector<link::LineGroup>& out);
void groups_to_pixels(std::span<const link::LineGroup> in, const CLConfig& config,
                      std::vector<ClockSample>& out);

/// Payload bits per second: taps x bits_per_pixel x pixel clock.
std::uint64_t raw_throughput(const CLConfig& config);

}  // namespace clgrab
