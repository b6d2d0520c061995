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

#include "clgrab/link_codec.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "clgrab/error.hpp"

namespace clgrab::link {
namespace {

constexpr std::array<std::uint8_t, kBitTimesPerWord> kClockSymbols = [] {
  std::array<std::uint8_t, kBitTimesPerWord> s{};
  for (unsigned t = 0; t < kBitTimesPerWord; ++t) {
    s[t] = static_cast<std::uint8_t>(kClockPattern[t] << 4);
  }
  return s;
}();

// Clock bits of one period as they sit in eight consecutive symbol bytes;
// the eighth byte is ignored.
constexpr std::uint64_t kClockLaneMask = 0x0010'1010'1010'1010;
constexpr std::uint64_t kClockLanes = [] {
  std::uint64_t v = 0;
  for (unsigned t = 0; t < kBitTimesPerWord; ++t) v |= std::uint64_t{kClockSymbols[t]} << (8 * t);
  return v;
}();

// Nibble t of a 28-bit word to byte t, and back.
constexpr std::uint64_t spread_nibbles(std::uint32_t bits) noexcept {
  std::uint64_t v = bits & kWordMask;
  v = (v | (v << 16)) & 0x0000'FFFF'0000'FFFF;
  v = (v | (v << 8)) & 0x00FF'00FF'00FF'00FF;
  v = (v | (v << 4)) & 0x0F0F'0F0F'0F0F'0F0F;
  return v;
}

constexpr std::uint32_t gather_nibbles(std::uint64_t v) noexcept {
  v &= 0x000F'0F0F'0F0F'0F0F;
  v = (v | (v >> 4)) & 0x00FF'00FF'00FF'00FF;
  v = (v | (v >> 8)) & 0x0000'FFFF'0000'FFFF;
  v = (v | (v >> 16)) & 0xFFFF'FFFF;
  return static_cast<std::uint32_t>(v);
}

static_assert(gather_nibbles(spread_nibbles(0x0ABC'DEF1)) == 0x0ABC'DEF1);

inline void store8(std::uint8_t* p, std::uint64_t v) noexcept {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(p, &v, 8);
  } else {
    for (unsigned t = 0; t < 8; ++t) p[t] = static_cast<std::uint8_t>(v >> (8 * t));
  }
}

// Reads up to eight bytes at i, zero-filling past the end.
inline std::uint64_t load8(const std::uint8_t* p, std::size_t n, std::size_t i) noexcept {
  std::uint64_t v = 0;
  if (i + 8 <= n && std::endian::native == std::endian::little) {
    std::memcpy(&v, p + i, 8);
    return v;
  }
  for (unsigned t = 0; t < 8 && i + t < n; ++t) v |= std::uint64_t{p[i + t]} << (8 * t);
  return v;
}

// kRotatedClock[k]: clock bits of the first period of a stream rotated
// left by k.
constexpr std::array<std::uint64_t, kBitTimesPerWord> kRotatedClock = [] {
  std::array<std::uint64_t, kBitTimesPerWord> r{};
  for (unsigned k = 0; k < kBitTimesPerWord; ++k) {
    for (unsigned t = 0; t < kBitTimesPerWord; ++t) {
      r[k] |= std::uint64_t{kClockSymbols[(t + k) % kBitTimesPerWord]} << (8 * t);
    }
  }
  return r;
}();

// The seven rotations of the pattern are pairwise distinct, so the first
// period selects at most one candidate phase.
unsigned head_phase(std::span<const std::uint8_t> sym) {
  if (sym.size() < kBitTimesPerWord) {
    throw Error(ErrorCode::kNoAlignment, "clock lane shorter than one word period");
  }
  const std::uint64_t head = load8(sym.data(), sym.size(), 0) & kClockLaneMask;
  for (unsigned k = 0; k < kBitTimesPerWord; ++k) {
    if (head == kRotatedClock[k]) return k;
  }
  throw Error(ErrorCode::kNoAlignment, "no rotation of the clock lane matches 1100011");
}

// Range of word indices whose eight-byte window at 7i - phase lies inside a
// stream of `count` words; only the first or last word can fall outside.
std::pair<std::size_t, std::size_t> fast_words(std::size_t count, unsigned phase) noexcept {
  if (count == 0) return {0, 0};
  if (phase == 0) return {0, count - 1};
  return {1, count};
}

}  // namespace

LaneSet LaneSet::from_lanes(const std::array<std::vector<std::uint8_t>, kDataLanes>& data,
                            const std::vector<std::uint8_t>& clock) {
  for (const auto& lane : data) {
    if (lane.size() != clock.size()) {
      throw Error(ErrorCode::kInvalidArgument, "lane lengths differ");
    }
  }
  std::vector<std::uint8_t> symbols(clock.size());
  for (std::size_t t = 0; t < clock.size(); ++t) {
    std::uint8_t s = static_cast<std::uint8_t>((clock[t] & 1u) << 4);
    for (unsigned j = 0; j < kDataLanes; ++j) {
      s = static_cast<std::uint8_t>(s | ((data[j][t] & 1u) << j));
    }
    symbols[t] = s;
  }
  return LaneSet(std::move(symbols));
}

void LaneSet::set_data_bit(unsigned lane, std::size_t t, bool value) noexcept {
  const auto m = static_cast<std::uint8_t>(1u << lane);
  symbols_[t] = value ? static_cast<std::uint8_t>(symbols_[t] | m)
                      : static_cast<std::uint8_t>(symbols_[t] & ~m);
}

void LaneSet::set_clock_bit(std::size_t t, bool value) noexcept {
  symbols_[t] = value ? static_cast<std::uint8_t>(symbols_[t] | kClockMask)
                      : static_cast<std::uint8_t>(symbols_[t] & ~kClockMask);
}

std::vector<std::uint8_t> LaneSet::data_lane(unsigned lane) const {
  std::vector<std::uint8_t> bits(symbols_.size());
  for (std::size_t t = 0; t < symbols_.size(); ++t) bits[t] = data_bit(lane, t);
  return bits;
}

std::vector<std::uint8_t> LaneSet::clock_lane() const {
  std::vector<std::uint8_t> bits(symbols_.size());
  for (std::size_t t = 0; t < symbols_.size(); ++t) bits[t] = clock_bit(t);
  return bits;
}

void serialize_channel(std::span<const LinkWord> words, unsigned phase, LaneSet& out) {
  if (phase >= kBitTimesPerWord) {
    throw Error(ErrorCode::kInvalidArgument, "phase must be in 0..6");
  }
  auto& sym = out.mutable_symbols();
  const std::size_t n = words.size() * kBitTimesPerWord;
  sym.resize(n);
  if (n == 0) return;
  std::uint8_t* p = sym.data();
  // Symbol m lands at (m - phase) mod n, which is the left rotation. Words
  // in [first, last) take a single eight-byte store that stays in bounds.
  const auto [first, last] = fast_words(words.size(), phase);
  for (std::size_t i = first; i < last; ++i) {
    store8(p + i * kBitTimesPerWord - phase, spread_nibbles(words[i].bits) | kClockLanes);
  }
  for (std::size_t i : {std::size_t{0}, words.size() - 1}) {
    if (i >= first && i < last) continue;
    const std::uint64_t v = spread_nibbles(words[i].bits) | kClockLanes;
    const std::size_t m = i * kBitTimesPerWord;
    for (unsigned t = 0; t < kBitTimesPerWord; ++t) {
      p[(m + t + n - phase) % n] = static_cast<std::uint8_t>(v >> (8 * t));
    }
  }
}

LaneSet serialize_channel(std::span<const LinkWord> words, unsigned phase) {
  LaneSet out;
  serialize_channel(words, phase, out);
  return out;
}

unsigned align_channel(const LaneSet& lanes) {
  const auto sym = lanes.symbols();
  const std::size_t n = sym.size();
  const unsigned k = head_phase(sym);
  const std::uint64_t expect = kRotatedClock[k];
  std::size_t j = kBitTimesPerWord;
  for (; j + 8 <= n; j += kBitTimesPerWord) {
    if ((load8(sym.data(), n, j) & kClockLaneMask) != expect) break;
  }
  for (unsigned pos = 0; j < n; ++j) {
    if ((sym[j] & LaneSet::kClockMask) != kClockSymbols[(pos + k) % kBitTimesPerWord]) {
      throw Error(ErrorCode::kNoAlignment, "clock lane breaks pattern at bit " + std::to_string(j));
    }
    if (++pos == kBitTimesPerWord) pos = 0;
  }
  return k;
}

void deserialize_channel(const LaneSet& lanes, std::vector<LinkWord>& out) {
  const auto sym = lanes.symbols();
  const std::size_t n = sym.size();
  if (n % kBitTimesPerWord != 0) {
    align_channel(lanes);
    throw Error(ErrorCode::kTruncatedWord,
                std::to_string(n) + " aligned bits is not a whole number of words");
  }
  // Once the first period fixes the phase, every aligned word must carry the
  // plain clock pattern; that check rides along with the data gather and the
  // full align_channel scan only runs to report a break.
  const unsigned phase = head_phase(sym);
  const std::size_t count = n / kBitTimesPerWord;
  out.resize(count);
  // Symbol m of the unrotated stream sits at index (m - phase) mod n.
  const std::uint8_t* p = sym.data();
  std::uint64_t broken = 0;
  const auto [first, last] = fast_words(count, phase);
  for (std::size_t i = first; i < last; ++i) {
    const std::uint64_t v = load8(p, n, i * kBitTimesPerWord - phase);
    broken |= (v & kClockLaneMask) ^ kClockLanes;
    out[i].bits = gather_nibbles(v);
  }
  for (std::size_t i : {std::size_t{0}, count - 1}) {
    if (i >= first && i < last) continue;
    std::uint64_t v = 0;
    const std::size_t m = i * kBitTimesPerWord;
    for (unsigned t = 0; t < kBitTimesPerWord; ++t) {
      v |= std::uint64_t{p[(m + t + n - phase) % n]} << (8 * t);
    }
    broken |= (v & kClockLaneMask) ^ kClockLanes;
    out[i].bits = gather_nibbles(v);
  }
  if (broken != 0) {
    align_channel(lanes);
    throw Error(ErrorCode::kNoAlignment, "clock lane breaks pattern");
  }
}

std::vector<LinkWord> deserialize_channel(const LaneSet& lanes) {
  std::vector<LinkWord> out;
  deserialize_channel(lanes, out);
  return out;
}

void merge_channels(std::span<const LinkWord> x, std::span<const LinkWord> y,
                    std::span<const LinkWord> z, const CLConfig& config,
                    std::vector<LineGroup>& out) {
  const unsigned channels = channel_count(config.mode);
  const std::array<std::span<const LinkWord>, 3> in = {x, y, z};
  for (unsigned c = 1; c < channels; ++c) {
    if (in[c].size() != x.size()) {
      throw Error(ErrorCode::kLengthMismatch, "channel word sequences differ in length");
    }
  }
  out.resize(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (unsigned c = 0; c < 3; ++c) {
      out[i].words[c] = c < channels ? in[c][i].bits & kWordMask : 0;
    }
  }
}

std::vector<LineGroup> merge_channels(std::span<const LinkWord> x, std::span<const LinkWord> y,
                                      std::span<const LinkWord> z, const CLConfig& config) {
  std::vector<LineGroup> groups;
  merge_channels(x, y, z, config, groups);
  return groups;
}

void write_word_dump(std::ostream& os, std::span<const LinkWord> words) {
  char line[16];
  for (const LinkWord w : words) {
    std::snprintf(line, sizeof line, "%07X\n", static_cast<unsigned>(w.bits & kWordMask));
    os << line;
  }
}

std::vector<LinkWord> read_word_dump(std::istream& is) {
  std::vector<LinkWord> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(line, &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || value > kWordMask) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad word dump line " + std::to_string(line_no) + ": " + line);
    }
    words.push_back(LinkWord{static_cast<std::uint32_t>(value)});
  }
  return words;
}

}  // namespace clgrab::link
