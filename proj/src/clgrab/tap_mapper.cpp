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
#include "clgrab/tap_mapper.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "clgrab/error.hpp"

#if defined(__SSE2__)
#include <emmintrin.h>
#define CLGRAB_SSE2 1
#endif

namespace clgrab {
namespace {

// 80 data bits held as lo (bits 0-63) and hi (bits 64-79).
struct DataBits {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  void put(unsigned offset, std::uint64_t value, unsigned width) noexcept {
    if (offset < 64) {
      lo |= value << offset;
      if (offset + width > 64) hi |= value >> (64 - offset);
    } else {
      hi |= value << (offset - 64);
    }
  }

  std::uint64_t get(unsigned offset, unsigned width) const noexcept {
    std::uint64_t v;
    if (offset >= 64) {
      v = hi >> (offset - 64);
    } else {
      v = lo >> offset;
      if (offset != 0 && offset + width > 64) v |= hi << (64 - offset);
    }
    return width >= 64 ? v : v & ((std::uint64_t{1} << width) - 1);
  }
};

constexpr std::uint32_t kPortMask = 0x00FF'FFFF;
constexpr bool kLittleEndian = std::endian::native == std::endian::little;

std::uint32_t sync_bits(const ClockSample& s) noexcept {
  return (static_cast<std::uint32_t>(s.lval) << link::kLvalBit) |
         (static_cast<std::uint32_t>(s.fval) << link::kFvalBit) |
         (static_cast<std::uint32_t>(s.dval) << link::kDvalBit) |
         (static_cast<std::uint32_t>(s.spare) << link::kSpareBit);
}

// 8-bit pixels travel as 16-bit lanes in ClockSample; four lanes fit one
// 64-bit word. Lanes at or beyond the tap count are masked off.
constexpr std::uint64_t lane_mask(unsigned taps, unsigned first) noexcept {
  if (taps <= first) return 0;
  const unsigned n = taps - first;
  return n >= 4 ? ~std::uint64_t{0} : (std::uint64_t{1} << (16 * n)) - 1;
}

constexpr std::uint64_t pack_lanes(std::uint64_t v) noexcept {
  v = (v | (v >> 8)) & 0x0000'FFFF'0000'FFFF;
  return (v | (v >> 16)) & 0xFFFF'FFFF;
}

constexpr std::uint64_t unpack_lanes(std::uint64_t v) noexcept {
  v &= 0xFFFF'FFFF;
  v = (v | (v << 16)) & 0x0000'FFFF'0000'FFFF;
  return (v | (v << 8)) & 0x00FF'00FF'00FF'00FF;
}

static_assert(pack_lanes(unpack_lanes(0xA1B2'C3D4)) == 0xA1B2'C3D4);

[[noreturn]] void depth_overflow(std::uint16_t value, unsigned depth) {
  throw Error(ErrorCode::kDepthOverflow, "pixel value " + std::to_string(value) + " exceeds " +
                                             std::to_string(depth) + " bits");
}

[[noreturn]] void tap_mismatch(unsigned got, unsigned want) {
  throw Error(ErrorCode::kInvalidArgument, "sample carries " + std::to_string(got) +
                                               " pixels, config expects " + std::to_string(want));
}

// Configuration-derived constants, computed once per call or block.
class Mapper {
 public:
  explicit Mapper(const CLConfig& config)
      : deca_(config.mode == Mode::kDeca),
        channels_(channel_count(config.mode)),
        taps_(config.taps),
        depth_(config.bits_per_pixel),
        bytewise_(config.bits_per_pixel == 8 && kLittleEndian),
        masks_{lane_mask(taps_, 0), lane_mask(taps_, 4), lane_mask(taps_, 8)} {
#if CLGRAB_SSE2
    sse_masks_[0] = _mm_set_epi64x(static_cast<long long>(masks_[1]),
                                   static_cast<long long>(masks_[0]));
    sse_masks_[1] = _mm_set_epi64x(0, static_cast<long long>(masks_[2]));
#endif
  }

  link::LineGroup to_group(const ClockSample& sample) const {
    if (sample.taps != taps_) tap_mismatch(sample.taps, taps_);
    DataBits data;
    if (bytewise_ && pack_bytes(sample, data)) return place(data, sync_bits(sample));
    const std::uint32_t limit = 1u << depth_;
    for (unsigned i = 0; i < taps_; ++i) {
      if (sample.pixels[i] >= limit) depth_overflow(sample.pixels[i], depth_);
      data.put(i * depth_, sample.pixels[i], depth_);
    }
    return place(data, sync_bits(sample));
  }

  ClockSample to_pixels(const link::LineGroup& group) const {
    const DataBits data = unplace(group);
    ClockSample s;
    const unsigned taps = taps_ < kMaxTaps ? taps_ : kMaxTaps;
    s.taps = static_cast<std::uint8_t>(taps);
    if (bytewise_) {
      unpack_bytes(data, s);
    } else {
      for (unsigned i = 0; i < taps; ++i) {
        s.pixels[i] = static_cast<std::uint16_t>(data.get(i * depth_, depth_));
      }
    }
    const std::uint32_t x = group.words[0];
    s.lval = ((x >> link::kLvalBit) & 1u) != 0;
    s.fval = ((x >> link::kFvalBit) & 1u) != 0;
    s.dval = ((x >> link::kDvalBit) & 1u) != 0;
    s.spare = ((x >> link::kSpareBit) & 1u) != 0;
    return s;
  }

 private:
  // 8-bit taps: narrow the 16-bit pixel lanes to bytes. False if any active
  // pixel does not fit in 8 bits.
  bool pack_bytes(const ClockSample& sample, DataBits& data) const {
#if CLGRAB_SSE2
    std::uint32_t tail;
    std::memcpy(&tail, sample.pixels.data() + 8, sizeof tail);
    const __m128i a = _mm_and_si128(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(sample.pixels.data())), sse_masks_[0]);
    const __m128i b = _mm_and_si128(_mm_cvtsi32_si128(static_cast<int>(tail)), sse_masks_[1]);
    const __m128i high = _mm_srli_epi16(_mm_or_si128(a, b), 8);
    if (_mm_movemask_epi8(_mm_cmpeq_epi16(high, _mm_setzero_si128())) != 0xFFFF) return false;
    const __m128i packed = _mm_packus_epi16(a, b);
    data.lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(packed));
    data.hi = static_cast<std::uint64_t>(_mm_extract_epi16(packed, 4));
    return true;
#else
    std::uint64_t lanes[3] = {0, 0, 0};
    std::memcpy(lanes, sample.pixels.data(), sizeof(sample.pixels));
    const std::uint64_t a = lanes[0] & masks_[0];
    const std::uint64_t b = lanes[1] & masks_[1];
    const std::uint64_t c = lanes[2] & masks_[2];
    if (((a | b | c) & 0xFF00'FF00'FF00'FF00) != 0) return false;
    data.lo = pack_lanes(a) | (pack_lanes(b) << 32);
    data.hi = pack_lanes(c);
    return true;
#endif
  }

  void unpack_bytes(const DataBits& data, ClockSample& s) const {
#if CLGRAB_SSE2
    const __m128i bytes = _mm_set_epi64x(static_cast<long long>(data.hi),
                                         static_cast<long long>(data.lo));
    const __m128i a = _mm_and_si128(_mm_unpacklo_epi8(bytes, _mm_setzero_si128()), sse_masks_[0]);
    const __m128i b = _mm_and_si128(_mm_unpackhi_epi8(bytes, _mm_setzero_si128()), sse_masks_[1]);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(s.pixels.data()), a);
    const std::uint32_t tail = static_cast<std::uint32_t>(_mm_cvtsi128_si32(b));
    std::memcpy(s.pixels.data() + 8, &tail, sizeof tail);
#else
    const std::uint64_t lanes[3] = {unpack_lanes(data.lo) & masks_[0],
                                    unpack_lanes(data.lo >> 32) & masks_[1],
                                    unpack_lanes(data.hi) & masks_[2]};
    std::memcpy(s.pixels.data(), lanes, sizeof(s.pixels));
#endif
  }

  link::LineGroup place(const DataBits& d, std::uint32_t sync) const {
    link::LineGroup g;
    if (deca_) {
      g.words[0] = static_cast<std::uint32_t>(d.lo & kPortMask) | sync;
      g.words[1] = static_cast<std::uint32_t>(d.lo >> 24) & link::kWordMask;
      g.words[2] = static_cast<std::uint32_t>((d.lo >> 52) | (d.hi << 12)) & link::kWordMask;
      return g;
    }
    const std::uint32_t ports[3] = {
        static_cast<std::uint32_t>(d.lo) & kPortMask,
        static_cast<std::uint32_t>(d.lo >> 24) & kPortMask,
        static_cast<std::uint32_t>((d.lo >> 48) | (d.hi << 16)) & kPortMask};
    for (unsigned c = 0; c < channels_; ++c) g.words[c] = ports[c] | sync;
    return g;
  }

  DataBits unplace(const link::LineGroup& g) const {
    DataBits d;
    if (deca_) {
      const std::uint64_t y = g.words[1] & link::kWordMask;
      const std::uint64_t z = g.words[2] & link::kWordMask;
      d.lo = (g.words[0] & kPortMask) | (y << 24) | (z << 52);
      d.hi = z >> 12;
      return d;
    }
    d.lo = g.words[0] & kPortMask;
    if (channels_ > 1) d.lo |= std::uint64_t{g.words[1] & kPortMask} << 24;
    if (channels_ > 2) {
      const std::uint64_t z = g.words[2] & kPortMask;
      d.lo |= z << 48;
      d.hi = z >> 16;
    }
    return d;
  }

  bool deca_;
  unsigned channels_;
  unsigned taps_;
  unsigned depth_;
  bool bytewise_;
  std::uint64_t masks_[3];
#if CLGRAB_SSE2
  __m128i sse_masks_[2];
#endif
};

}  // namespace

link::LineGroup pixels_to_group(const ClockSample& sample, const CLConfig& config) {
  return Mapper(config).to_group(sample);
}

ClockSample group_to_pixels(const link::LineGroup& group, const CLConfig& config) {
  return Mapper(config).to_pixels(group);
}

void pixels_to_groups(std::span<const ClockSample> in, const CLConfig& config,
                      std::vector<link::LineGroup>& out) {
  const Mapper m(config);
  out.resize(in.size());
  link::LineGroup* dst = out.data();
  for (const ClockSample& s : in) *dst++ = m.to_group(s);
}

void groups_to_pixels(std::span<const link::LineGroup> in, const CLConfig& config,
                      std::vector<ClockSample>& out) {
  const Mapper m(config);
  out.resize(in.size());
  ClockSample* dst = out.data();
  for (const link::LineGroup& g : in) *dst++ = m.to_pixels(g);
}

std::uint64_t raw_throughput(const CLConfig& config) {
  validate(config);
  return std::uint64_t{config.taps} * config.bits_per_pixel * config.pixel_clock_hz;
}

}  // namespace clgrab
