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

#include "clgrab/tiff.hpp"

#include <string>

#include "clgrab/error.hpp"

namespace clgrab::tiff {
namespace {

constexpr std::uint16_t kTypeShort = 3;
constexpr std::uint16_t kTypeLong = 4;
constexpr std::uint16_t kEntryCount = 8;
constexpr std::uint32_t kIfdOffset = 8;

void put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

// SHORT values are left-aligned in the 4-byte value field.
void put_entry(std::uint8_t* p, std::uint16_t tag, std::uint16_t type, std::uint32_t value) {
  put16(p, tag);
  put16(p + 2, type);
  put32(p + 4, 1);
  if (type == kTypeShort) {
    put16(p + 8, static_cast<std::uint16_t>(value));
    put16(p + 10, 0);
  } else {
    put32(p + 8, value);
  }
}

}  // namespace

TiffHeader build_tiff_header(std::uint32_t width, std::uint32_t height, unsigned bits_per_pixel) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kBadGeometry, "TIFF dimensions must be at least 1x1");
  }
  if (bits_per_pixel != 8 && bits_per_pixel != 10 && bits_per_pixel != 12 &&
      bits_per_pixel != 16) {
    throw Error(ErrorCode::kBadGeometry,
                "unsupported depth " + std::to_string(bits_per_pixel) + " for TIFF");
  }
  const unsigned cb = container_bytes(bits_per_pixel);
  const std::uint64_t strip = std::uint64_t{width} * height * cb;
  if (strip > 0xFFFF'FFFFu - kHeaderBytes) {
    throw Error(ErrorCode::kBadGeometry, "frame too large for a baseline TIFF strip");
  }

  TiffHeader h{};
  h[0] = 0x49;
  h[1] = 0x49;
  put16(&h[2], 42);
  put32(&h[4], kIfdOffset);
  std::uint8_t* p = &h[kIfdOffset];
  put16(p, kEntryCount);
  p += 2;
  put_entry(p, tag::kImageWidth, kTypeLong, width);
  put_entry(p += 12, tag::kImageLength, kTypeLong, height);
  put_entry(p += 12, tag::kBitsPerSample, kTypeShort, 8 * cb);
  put_entry(p += 12, tag::kCompression, kTypeShort, 1);
  put_entry(p += 12, tag::kPhotometricInterpretation, kTypeShort, 1);
  put_entry(p += 12, tag::kStripOffsets, kTypeLong, kHeaderBytes);
  put_entry(p += 12, tag::kSamplesPerPixel, kTypeShort, 1);
  put_entry(p += 12, tag::kStripByteCounts, kTypeLong, static_cast<std::uint32_t>(strip));
  put32(p + 12, 0);  // no further IFDs
  return h;
}

TiffHeader frame_header(const FrameInfo& info) {
  const std::size_t expected =
      std::size_t{info.width} * info.height * container_bytes(info.bits_per_pixel);
  if (info.byte_count != expected) {
    throw Error(ErrorCode::kMismatch, "frame " + std::to_string(info.frame_number) +
                                          ": byte count " + std::to_string(info.byte_count) +
                                          " does not match its resolution");
  }
  return build_tiff_header(info.width, info.height, info.bits_per_pixel);
}

void write_tiff_bytes(const FrameInfo& info, std::span<const std::uint8_t> payload,
                      std::vector<std::uint8_t>& out) {
  const TiffHeader h = frame_header(info);
  if (payload.size() != info.byte_count) {
    throw Error(ErrorCode::kMismatch, "frame " + std::to_string(info.frame_number) +
                                          ": payload of " + std::to_string(payload.size()) +
                                          " bytes, record says " +
                                          std::to_string(info.byte_count));
  }
  out.resize(kHeaderBytes + payload.size());
  std::copy(h.begin(), h.end(), out.begin());
  std::copy(payload.begin(), payload.end(), out.begin() + kHeaderBytes);
}

std::vector<std::uint8_t> write_frame_tiff(const FrameInfo& info, const Frame& frame) {
  if (frame.width != info.width || frame.height != info.height ||
      frame.bits_per_pixel != info.bits_per_pixel ||
      frame.pixels.size() != std::size_t{frame.width} * frame.height ||
      info.byte_count != frame.byte_count()) {
    throw Error(ErrorCode::kMismatch, "frame info does not describe the frame");
  }
  const unsigned cb = container_bytes(frame.bits_per_pixel);
  std::vector<std::uint8_t> payload(frame.pixels.size() * cb);
  if (cb == 1) {
    for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
      payload[i] = static_cast<std::uint8_t>(frame.pixels[i]);
    }
  } else {
    for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
      payload[2 * i] = static_cast<std::uint8_t>(frame.pixels[i] & 0xFF);
      payload[2 * i + 1] = static_cast<std::uint8_t>(frame.pixels[i] >> 8);
    }
  }
  std::vector<std::uint8_t> out;
  write_tiff_bytes(info, payload, out);
  return out;
}

}  // namespace clgrab::tiff
