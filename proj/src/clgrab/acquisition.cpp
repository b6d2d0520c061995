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

#include "clgrab/acquisition.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "clgrab/error.hpp"

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace clgrab {

// ---------------------------------------------------------------- VFifo

VFifo::VFifo(std::size_t capacity_bytes, std::size_t page_bytes)
    : capacity_(capacity_bytes), page_(page_bytes) {
  if (page_ == 0 || capacity_ == 0 || capacity_ % page_ != 0) {
    throw Error(ErrorCode::kBadConfig,
                "vfifo capacity " + std::to_string(capacity_) +
                    " must be a non-zero multiple of the page size " + std::to_string(page_));
  }
  storage_.resize(capacity_);
}

bool VFifo::append(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  if (n > capacity_ - used() - pending_) return false;
  const std::size_t first = std::min(n, capacity_ - write_pos_);
  std::memcpy(storage_.data() + write_pos_, bytes.data(), first);
  std::memcpy(storage_.data(), bytes.data() + first, n - first);
  write_pos_ = (write_pos_ + n) % capacity_;
  pending_ += n;
  const std::size_t occupancy = used() + pending_;
  if (occupancy > high_watermark_.load(std::memory_order_relaxed)) {
    high_watermark_.store(occupancy, std::memory_order_relaxed);
  }
  return true;
}

void VFifo::commit() {
  used_.fetch_add(pending_, std::memory_order_release);
  pending_ = 0;
}

void VFifo::rollback() noexcept {
  write_pos_ = (write_pos_ + capacity_ - pending_) % capacity_;
  pending_ = 0;
}

std::array<std::span<const std::uint8_t>, 2> VFifo::peek(std::size_t n) const {
  if (n > used()) {
    throw Error(ErrorCode::kCorruptInfo, "read of " + std::to_string(n) + " bytes but only " +
                                             std::to_string(used()) + " are stored");
  }
  const std::size_t first = std::min(n, capacity_ - read_pos_);
  return {std::span<const std::uint8_t>(storage_.data() + read_pos_, first),
          std::span<const std::uint8_t>(storage_.data(), n - first)};
}

void VFifo::release(std::size_t n) {
  if (n > used()) {
    throw Error(ErrorCode::kCorruptInfo, "release of " + std::to_string(n) +
                                             " bytes but only " + std::to_string(used()) +
                                             " are stored");
  }
  read_pos_ = (read_pos_ + n) % capacity_;
  used_.fetch_sub(n, std::memory_order_release);
}

void VFifo::read(std::span<std::uint8_t> out) {
  const auto parts = peek(out.size());
  std::memcpy(out.data(), parts[0].data(), parts[0].size());
  std::memcpy(out.data() + parts[0].size(), parts[1].data(), parts[1].size());
  release(out.size());
}

// -------------------------------------------------------- FrameInfoFifo

void FrameInfoFifo::push(const FrameInfo& info) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(info);
  }
  cv_.notify_one();
}

std::optional<FrameInfo> FrameInfoFifo::try_pop() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  FrameInfo info = queue_.front();
  queue_.pop_front();
  return info;
}

std::optional<FrameInfo> FrameInfoFifo::wait_pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  FrameInfo info = queue_.front();
  queue_.pop_front();
  return info;
}

std::optional<FrameInfo> FrameInfoFifo::peek() const {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  return queue_.front();
}

void FrameInfoFifo::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t FrameInfoFifo::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

// ----------------------------------------------------------- FitMonitor

FitMonitor::FitMonitor(std::size_t page_bytes, std::size_t seed_bytes, unsigned window)
    : page_(page_bytes), seed_(seed_bytes), window_(std::max(1u, window)) {}

std::size_t FitMonitor::expected_frame_bytes() const noexcept {
  if (history_.empty()) return seed_;
  return *std::max_element(history_.begin(), history_.end());
}

void FitMonitor::record_captured(std::size_t frame_bytes) {
  history_.push_back(frame_bytes);
  if (history_.size() > window_) history_.pop_front();
}

// ------------------------------------------------------------ detection

Resolution detect_resolution(std::span<const ClockSample> span, unsigned taps) {
  std::uint32_t lines = 0;
  std::optional<std::uint32_t> width_clocks;
  std::uint32_t valid = 0;
  bool in_line = false;
  auto close_line = [&] {
    if (!width_clocks) {
      width_clocks = valid;
    } else if (*width_clocks != valid) {
      throw Error(ErrorCode::kRaggedLines, "line " + std::to_string(lines) + " has " +
                                               std::to_string(valid) + " valid clocks, expected " +
                                               std::to_string(*width_clocks));
    }
  };
  for (const ClockSample& s : span) {
    if (s.lval) {
      if (!in_line) {
        in_line = true;
        ++lines;
        valid = 0;
      }
      if (s.dval) ++valid;
    } else if (in_line) {
      in_line = false;
      close_line();
    }
  }
  if (in_line) close_line();
  if (lines == 0 || !width_clocks || *width_clocks == 0) {
    throw Error(ErrorCode::kEmptyFrame, "no valid pixels inside the FVAL span");
  }
  return Resolution{*width_clocks * taps, lines};
}

std::uint64_t ticks_to_ns(std::uint64_t ticks, std::uint64_t clock_hz) noexcept {
  constexpr std::uint64_t kNsPerSecond = 1'000'000'000;
  return (ticks / clock_hz) * kNsPerSecond + (ticks % clock_hz) * kNsPerSecond / clock_hz;
}

// ---------------------------------------------------------- FrameWriter

FrameWriter::FrameWriter(VFifo& fifo, FrameInfoFifo& infos, const CLConfig& config,
                         AcquisitionOptions options)
    : fifo_(fifo),
      infos_(infos),
      config_(config),
      monitor_(fifo.page_bytes(), options.seed_expected_bytes, options.fit_window) {
  validate(config_);
}

void FrameWriter::consume(std::span<const ClockSample> samples) {
  std::size_t i = 0;
  while (i < samples.size()) {
    // Inside an accepted line, a run of fully valid clocks only adds pixels.
    if (in_line_ && prev_fval_ && accepted_ && !overflow_ && !ragged_) {
      std::size_t j = i;
      while (j < samples.size() && samples[j].fval && samples[j].lval && samples[j].dval) ++j;
      if (j > i) {
        append_pixels(samples.subspan(i, j - i));
        line_valid_clocks_ += static_cast<std::uint32_t>(j - i);
        cycle_ += j - i;
        i = j;
        continue;
      }
    }
    consume(samples[i++]);
  }
}

void FrameWriter::append_pixels(std::span<const ClockSample> run) {
  const unsigned taps = config_.taps;
  const unsigned bytes = container_bytes(config_.bits_per_pixel);
  const std::size_t at = line_buffer_.size();
  const std::size_t end = at + run.size() * taps * bytes;
  if (bytes == 2) {
    line_buffer_.resize(end);
    std::uint8_t* out = line_buffer_.data() + at;
    for (const ClockSample& s : run) {
      for (unsigned t = 0; t < taps; ++t) {
        *out++ = static_cast<std::uint8_t>(s.pixels[t] & 0xFF);
        *out++ = static_cast<std::uint8_t>(s.pixels[t] >> 8);
      }
    }
    return;
  }
#if defined(__SSE2__)
  // Each sample is narrowed as a 16-byte store; the next sample overwrites
  // the spill, and the slack past the end is trimmed afterwards.
  line_buffer_.resize(end + 16);
  std::uint8_t* out = line_buffer_.data() + at;
  const __m128i low = _mm_set1_epi16(0x00FF);
  for (const ClockSample& s : run) {
    std::uint32_t tail;
    std::memcpy(&tail, s.pixels.data() + 8, sizeof tail);
    const __m128i a =
        _mm_and_si128(_mm_loadu_si128(reinterpret_cast<const __m128i*>(s.pixels.data())), low);
    const __m128i b = _mm_and_si128(_mm_cvtsi32_si128(static_cast<int>(tail)), low);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out), _mm_packus_epi16(a, b));
    out += taps;
  }
  line_buffer_.resize(end);
#else
  line_buffer_.resize(end);
  std::uint8_t* out = line_buffer_.data() + at;
  for (const ClockSample& s : run) {
    for (unsigned t = 0; t < taps; ++t) *out++ = static_cast<std::uint8_t>(s.pixels[t]);
  }
#endif
}

void FrameWriter::consume(const ClockSample& s) {
  if (s.fval && !prev_fval_) begin_frame();
  if (in_frame_ && !s.fval) {
    end_frame();
  } else if (in_frame_) {
    if (s.lval) {
      if (!in_line_) {
        in_line_ = true;
        ++lines_;
        line_valid_clocks_ = 0;
        line_buffer_.clear();
      }
      if (s.dval) {
        ++line_valid_clocks_;
        if (accepted_ && !overflow_ && !ragged_) {
          append_pixels({&s, 1});
        }
      }
    } else if (in_line_) {
      end_line();
    }
  }
  prev_fval_ = s.fval;
  ++cycle_;
}

void FrameWriter::begin_frame() {
  in_frame_ = true;
  frame_number_ = next_frame_number_++;
  frame_start_ = cycle_;
  accepted_ = monitor_.decide(fifo_.free_bytes()) == FitDecision::kAccept;
  overflow_ = false;
  ragged_ = false;
  in_line_ = false;
  lines_ = 0;
  line_valid_clocks_ = 0;
  first_line_clocks_.reset();
  frame_bytes_ = 0;
}

void FrameWriter::end_line() {
  in_line_ = false;
  if (!first_line_clocks_) {
    first_line_clocks_ = line_valid_clocks_;
  } else if (*first_line_clocks_ != line_valid_clocks_) {
    ragged_ = true;
  }
  frame_bytes_ += std::size_t{line_valid_clocks_} * config_.taps *
                  container_bytes(config_.bits_per_pixel);
  if (accepted_ && !overflow_ && !ragged_) {
    if (!fifo_.append(line_buffer_)) {
      overflow_ = true;
      fifo_.rollback();
    }
  }
  line_buffer_.clear();
}

void FrameWriter::end_frame() {
  if (in_line_) end_line();
  in_frame_ = false;
  if (lines_ == 0 || !first_line_clocks_ || *first_line_clocks_ == 0) {
    finish(FrameFate::kDroppedEmpty);
  } else if (ragged_) {
    finish(FrameFate::kDroppedRagged);
  } else if (!accepted_) {
    finish(FrameFate::kDroppedNoFit);
  } else if (overflow_) {
    finish(FrameFate::kDroppedOverflow);
  } else {
    finish(FrameFate::kCaptured);
  }
}

void FrameWriter::finish(FrameFate fate) {
  if (fate == FrameFate::kCaptured) {
    FrameInfo info;
    info.frame_number = frame_number_;
    info.width = *first_line_clocks_ * config_.taps;
    info.height = lines_;
    info.bits_per_pixel = config_.bits_per_pixel;
    info.byte_count = frame_bytes_;
    info.timestamp_ticks = frame_start_;
    info.timestamp_ns = ticks_to_ns(frame_start_, config_.pixel_clock_hz);
    info.user_meta = user_meta_;
    fifo_.commit();
    monitor_.record_captured(frame_bytes_);
    captured_.fetch_add(1, std::memory_order_relaxed);
    bytes_written_.fetch_add(frame_bytes_, std::memory_order_relaxed);
    infos_.push(info);
  } else {
    fifo_.rollback();
    dropped_.fetch_add(1, std::memory_order_relaxed);
  }
  if (observer_) observer_(FrameOutcome{frame_number_, fate, frame_bytes_});
}

AcqStats FrameWriter::stats() const noexcept {
  AcqStats s;
  s.frames_captured = captured_.load(std::memory_order_relaxed);
  s.frames_dropped = dropped_.load(std::memory_order_relaxed);
  s.bytes_written = bytes_written_.load(std::memory_order_relaxed);
  s.high_watermark_bytes = fifo_.high_watermark();
  return s;
}

AcqStats vfifo_write(VFifo& fifo, FrameInfoFifo& infos, std::span<const ClockSample> stream,
                     const CLConfig& config, std::uint64_t user_meta,
                     AcquisitionOptions options) {
  FrameWriter writer(fifo, infos, config, options);
  writer.set_user_meta(user_meta);
  writer.consume(stream);
  return writer.stats();
}

// ---------------------------------------------------------- FrameReader

void read_frame_bytes(VFifo& fifo, const FrameInfo& info, std::vector<std::uint8_t>& out) {
  if (info.byte_count > fifo.used()) {
    throw Error(ErrorCode::kCorruptInfo, "frame " + std::to_string(info.frame_number) +
                                             " claims " + std::to_string(info.byte_count) +
                                             " bytes, VFIFO holds " + std::to_string(fifo.used()));
  }
  out.resize(info.byte_count);
  fifo.read(out);
}

Frame unpack_frame(const FrameInfo& info, std::span<const std::uint8_t> bytes) {
  Frame f;
  f.width = info.width;
  f.height = info.height;
  f.bits_per_pixel = info.bits_per_pixel;
  const std::size_t n = std::size_t{info.width} * info.height;
  const unsigned cb = container_bytes(info.bits_per_pixel);
  if (bytes.size() != n * cb) {
    throw Error(ErrorCode::kCorruptInfo, "frame byte count does not match its resolution");
  }
  f.pixels.resize(n);
  if (cb == 1) {
    std::copy(bytes.begin(), bytes.end(), f.pixels.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      f.pixels[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
  }
  return f;
}

std::vector<ClockSample> regenerate_sync(const Frame& frame, unsigned taps) {
  if (taps == 0 || taps > kMaxTaps || frame.width % taps != 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame width is not a multiple of the tap count");
  }
  CameraState geometry;
  geometry.width = frame.width;
  geometry.height = frame.height;
  geometry.bits_per_pixel = frame.bits_per_pixel;
  geometry.taps = taps;
  geometry.line_gap = 1;
  geometry.frame_gap = 1;
  std::vector<ClockSample> out;
  out.reserve(std::size_t{frame.height} * (frame.width / taps + 1));
  for (std::uint32_t y = 0; y < frame.height; ++y) append_line(geometry, frame, y, out);
  out.pop_back();  // trailing idle clock belongs outside the FVAL span
  return out;
}

ReadFrame frame_read(VFifo& fifo, FrameInfoFifo& infos, unsigned taps, bool regenerate) {
  auto head = infos.peek();
  if (!head) throw Error(ErrorCode::kUnderflow, "frame information FIFO is empty");
  if (head->byte_count > fifo.used()) {
    throw Error(ErrorCode::kCorruptInfo, "frame " + std::to_string(head->frame_number) +
                                             " claims more bytes than the VFIFO holds");
  }
  ReadFrame r;
  r.info = *infos.try_pop();
  std::vector<std::uint8_t> bytes;
  read_frame_bytes(fifo, r.info, bytes);
  r.frame = unpack_frame(r.info, bytes);
  if (regenerate) r.sync = regenerate_sync(r.frame, taps);
  return r;
}

}  // namespace clgrab
