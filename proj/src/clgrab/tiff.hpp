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

// TIFF header provider. Every header is exactly 256 bytes so it can be
// emitted before the frame data is known to be complete: little-endian
// byte order, one IFD at offset 8 with eight entries, a single strip at
// offset 256, zero padding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clgrab/acquisition.hpp"
#include "clgrab/camera_sim.hpp"

namespace clgrab::tiff {

inline constexpr std::size_t kHeaderBytes = 256;

using TiffHeader = std::array<std::uint8_t, kHeaderBytes>;

namespace tag {
inline constexpr std::uint16_t kImageWidth = 256;
inline constexpr std::uint16_t kImageLength = 257;
inline constexpr std::uint16_t kBitsPerSample = 258;
inline constexpr std::uint16_t kCompression = 259;
inline constexpr std::uint16_t kPhotometricInterpretation = 262;
inline constexpr std::uint16_t kStripOffsets = 273;
inline constexpr std::uint16_t kSamplesPerPixel = 277;
inline constexpr std::uint16_t kStripByteCounts = 279;
}  // namespace tag

/// Throws BadGeometry for zero dimensions or an unsupported depth.
TiffHeader build_tiff_header(std::uint32_t width, std::uint32_t height, unsigned bits_per_pixel);

/// Header for a frame record. Throws Mismatch if byte_count does not match
/// the resolution and depth.
TiffHeader frame_header(const FrameInfo& info);

/// Header followed by the frame's little-endian containers.
/// Throws Mismatch if info.byte_count disagrees with the frame.
std::vector<std::uint8_t> write_frame_tiff(const FrameInfo& info, const Frame& frame);

/// Same output from container bytes already laid out as stored in the VFIFO.
void write_tiff_bytes(const FrameInfo& info, std::span<const std::uint8_t> payload,
                      std::vector<std::uint8_t>& out);

}  // namespace clgrab::tiff
