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

// Channel Link 7:1 codec. One 28-bit word per pixel clock is spread over four
// data lanes during seven bit-times, accompanied by a clock lane carrying
// 1100011 once per word.
//
// Word layout: bits 0-7 port A, 8-15 port B, 16-23 port C, 24 LVAL, 25 FVAL,
// 26 DVAL, 27 spare. Lane mapping: data lane j at bit-time t carries word bit
// 4t + j, so nibble t of the word is the lane state at bit-time t.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "clgrab/cl_config.hpp"

namespace clgrab::link {

inline constexpr unsigned kWordBits = 28;
inline constexpr unsigned kBitTimesPerWord = 7;
inline constexpr unsigned kDataLanes = 4;
inline constexpr std::uint32_t kWordMask = (1u << kWordBits) - 1;
inline constexpr std::array<std::uint8_t, kBitTimesPerWord> kClockPattern = {1, 1, 0, 0,
                                                                             0, 1, 1};

inline constexpr unsigned kLvalBit = 24;
inline constexpr unsigned kFvalBit = 25;
inline constexpr unsigned kDvalBit = 26;
inline constexpr unsigned kSpareBit = 27;

struct LinkWord {
  std::uint32_t bits = 0;

  friend bool operator==(LinkWord, LinkWord) = default;
};

struct WordFields {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t c = 0;
  bool lval = false;
  bool fval = false;
  bool dval = false;
  bool spare = false;

  friend bool operator==(const WordFields&, const WordFields&) = default;
};

constexpr LinkWord pack_word(const WordFields& f) noexcept {
  return LinkWord{static_cast<std::uint32_t>(f.a) | (static_cast<std::uint32_t>(f.b) << 8) |
                  (static_cast<std::uint32_t>(f.c) << 16) |
                  (static_cast<std::uint32_t>(f.lval) << kLvalBit) |
                  (static_cast<std::uint32_t>(f.fval) << kFvalBit) |
                  (static_cast<std::uint32_t>(f.dval) << kDvalBit) |
                  (static_cast<std::uint32_t>(f.spare) << kSpareBit)};
}

/// Total on 28-bit values; bits above 27 are ignored.
constexpr WordFields unpack_word(LinkWord w) noexcept {
  return WordFields{static_cast<std::uint8_t>(w.bits & 0xFF),
                    static_cast<std::uint8_t>((w.bits >> 8) & 0xFF),
                    static_cast<std::uint8_t>((w.bits >> 16) & 0xFF),
                    ((w.bits >> kLvalBit) & 1u) != 0,
                    ((w.bits >> kFvalBit) & 1u) != 0,
                    ((w.bits >> kDvalBit) & 1u) != 0,
                    ((w.bits >> kSpareBit) & 1u) != 0};
}

enum class ChannelId { kX = 0, kY = 1, kZ = 2 };

/// Four data lanes and a clock lane of equal length.
///
/// Stored time-major: one symbol per bit-time, bit j (0..3) is data lane j and
/// bit 4 is the clock lane. Lane-major views are produced on demand.
class LaneSet {
 public:
  static constexpr std::uint8_t kClockMask = 0x10;

  LaneSet() = default;
  explicit LaneSet(std::vector<std::uint8_t> symbols) : symbols_(std::move(symbols)) {}

  /// Builds a lane set from five separate bit sequences (values 0/1).
  /// Throws InvalidArgument when the lengths differ.
  static LaneSet from_lanes(const std::array<std::vector<std::uint8_t>, kDataLanes>& data,
                            const std::vector<std::uint8_t>& clock);

  std::size_t bit_count() const noexcept { return symbols_.size(); }

  std::uint8_t data_bit(unsigned lane, std::size_t t) const noexcept {
    return (symbols_[t] >> lane) & 1u;
  }
  std::uint8_t clock_bit(std::size_t t) const noexcept {
    return (symbols_[t] >> 4) & 1u;
  }
  void set_data_bit(unsigned lane, std::size_t t, bool value) noexcept;
  void set_clock_bit(std::size_t t, bool value) noexcept;

  std::vector<std::uint8_t> data_lane(unsigned lane) const;
  std::vector<std::uint8_t> clock_lane() const;

  std::span<const std::uint8_t> symbols() const noexcept { return symbols_; }
  std::vector<std::uint8_t>& mutable_symbols() noexcept { return symbols_; }

 private:
  std::vector<std::uint8_t> symbols_;
};

/// Serializes words and rotates all five lanes left by `phase` bit positions.
/// Throws InvalidArgument if phase > 6.
LaneSet serialize_channel(std::span<const LinkWord> words, unsigned phase);

/// Buffer-reusing form of serialize_channel.
void serialize_channel(std::span<const LinkWord> words, unsigned phase, LaneSet& out);

/// Recovers the rotation applied by serialize_channel from the clock lane
/// alone. Throws NoAlignment when no rotation of the pattern matches every
/// clock bit, or when fewer than seven bits are present.
unsigned align_channel(const LaneSet& lanes);

/// Aligns, then decodes word by word. Throws NoAlignment or TruncatedWord.
std::vector<LinkWord> deserialize_channel(const LaneSet& lanes);

/// Buffer-reusing form of deserialize_channel; `out` is overwritten.
void deserialize_channel(const LaneSet& lanes, std::vector<LinkWord>& out);

/// One pixel clock worth of link data: three 28-bit words, X in bits 0-27,
/// Y in bits 28-55 and Z in bits 56-83 of the 84-bit group.
struct LineGroup {
  std::array<std::uint32_t, 3> words{};

  bool bit(unsigned index) const noexcept {
    return ((words[index / kWordBits] >> (index % kWordBits)) & 1u) != 0;
  }
  void set_bit(unsigned index, bool value) noexcept {
    const std::uint32_t m = 1u << (index % kWordBits);
    auto& w = words[index / kWordBits];
    w = value ? (w | m) : (w & ~m);
  }
  LinkWord channel(ChannelId id) const noexcept {
    return LinkWord{words[static_cast<unsigned>(id)]};
  }

  friend bool operator==(const LineGroup&, const LineGroup&) = default;
};

inline constexpr unsigned kGroupBits = 3 * kWordBits;

/// Combines per-channel word streams into 84-bit groups. Channels absent from
/// the configuration contribute zero and their sequences are ignored.
/// Throws LengthMismatch if the present channels differ in length.
std::vector<LineGroup> merge_channels(std::span<const LinkWord> x, std::span<const LinkWord> y,
                                      std::span<const LinkWord> z, const CLConfig& config);
void merge_channels(std::span<const LinkWord> x, std::span<const LinkWord> y,
                    std::span<const LinkWord> z, const CLConfig& config,
                    std::vector<LineGroup>& out);

/// Debug dump: one word per line as seven uppercase hex digits.
void write_word_dump(std::ostream& os, std::span<const LinkWord> words);
/// Reads a debug dump; throws InvalidArgument on malformed lines.
std::vector<LinkWord> read_word_dump(std::istream& is);

}  // namespace clgrab::link
