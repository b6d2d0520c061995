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

// Acquisition side of the grabber: the virtual FIFO over a bounded buffer, the
// frame-fit monitor, the frame information FIFO, the writer that detects
// resolution and timestamps frames, and the frame reader that regenerates
// sync for downstream consumers.

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "clgrab/camera_sim.hpp"
#include "clgrab/cl_config.hpp"
#include "clgrab/tap_mapper.hpp"

namespace clgrab {

inline constexpr std::size_t kDefaultVFifoCapacity = 64u << 20;
inline constexpr std::size_t kDefaultPageBytes = 4096;
inline constexpr unsigned kDefaultFitWindow = 8;

struct FrameInfo {
  std::uint64_t frame_number = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  unsigned bits_per_pixel = 8;
  std::size_t byte_count = 0;
  std::uint64_t timestamp_ticks = 0;  // pixel clocks since acquisition start
  std::uint64_t timestamp_ns = 0;     // timestamp_ticks converted, rounded down
  std::uint64_t user_meta = 0;

  friend bool operator==(const FrameInfo&, const FrameInfo&) = default;
};

struct AcqStats {
  std::uint64_t frames_captured = 0;
  std::uint64_t frames_dropped = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t high_watermark_bytes = 0;

  friend bool operator==(const AcqStats&, const AcqStats&) = default;
};

/// Ring buffer standing in for the external-memory FIFO. One writer thread
/// and one reader thread may use it concurrently.
///
/// The writer appends a frame's bytes as they arrive; they stay invisible to
/// the reader until commit(), and rollback() discards them. used() therefore
/// never includes a partial frame.
class VFifo {
 public:
  /// Throws BadConfig unless capacity is a non-zero multiple of page.
  VFifo(std::size_t capacity_bytes, std::size_t page_bytes);

  VFifo(const VFifo&) = delete;
  VFifo& operator=(const VFifo&) = delete;

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t page_bytes() const noexcept { return page_; }
  std::size_t used() const noexcept { return used_.load(std::memory_order_acquire); }
  std::size_t free_bytes() const noexcept { return capacity_ - used(); }
  std::size_t high_watermark() const noexcept {
    return high_watermark_.load(std::memory_order_relaxed);
  }

  // Writer side.
  /// False, with nothing written, if the bytes do not fit next to the
  /// committed and pending data.
  bool append(std::span<const std::uint8_t> bytes);
  std::size_t pending() const noexcept { return pending_; }
  void commit();
  void rollback() noexcept;

  // Reader side.
  /// Throws CorruptInfo if more bytes are requested than are committed.
  void read(std::span<std::uint8_t> out);
  /// The next n committed bytes in place, as at most two pieces (the second
  /// is empty unless the range wraps). release(n) then frees them.
  /// Both throw CorruptInfo if n exceeds the committed bytes.
  std::array<std::span<const std::uint8_t>, 2> peek(std::size_t n) const;
  void release(std::size_t n);

 private:
  std::size_t capacity_;
  std::size_t page_;
  std::vector<std::uint8_t> storage_;
  std::atomic<std::size_t> used_{0};
  std::atomic<std::size_t> high_watermark_{0};
  std::size_t write_pos_ = 0;  // writer-owned, includes pending bytes
  std::size_t pending_ = 0;    // writer-owned
  std::size_t read_pos_ = 0;   // reader-owned
};

/// Frame information FIFO, safe for one producer and any number of consumers.
class FrameInfoFifo {
 public:
  void push(const FrameInfo& info);
  std::optional<FrameInfo> try_pop();
  /// Blocks until a record is available or the FIFO is closed and empty.
  std::optional<FrameInfo> wait_pop();
  std::optional<FrameInfo> peek() const;
  void close();
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<FrameInfo> queue_;
  bool closed_ = false;
};

enum class FitDecision { kAccept, kDrop };

/// Accept iff free_bytes >= expected_frame_bytes + page_bytes.
constexpr FitDecision check_fit(std::size_t free_bytes, std::size_t expected_frame_bytes,
                                std::size_t page_bytes) noexcept {
  return free_bytes >= expected_frame_bytes + page_bytes ? FitDecision::kAccept
                                                         : FitDecision::kDrop;
}

/// Predicts the next frame size as the largest of the last `window` captured
/// frames, or `seed_bytes` before anything has been captured.
class FitMonitor {
 public:
  FitMonitor(std::size_t page_bytes, std::size_t seed_bytes, unsigned window = kDefaultFitWindow);

  std::size_t expected_frame_bytes() const noexcept;
  FitDecision decide(std::size_t free_bytes) const noexcept {
    return check_fit(free_bytes, expected_frame_bytes(), page_);
  }
  void record_captured(std::size_t frame_bytes);

 private:
  std::size_t page_;
  std::size_t seed_;
  unsigned window_;
  std::deque<std::size_t> history_;
};

struct Resolution {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Resolution of one FVAL-high span. Only clocks with LVAL and DVAL both high
/// count towards the width. Throws EmptyFrame or RaggedLines.
Resolution detect_resolution(std::span<const ClockSample> span, unsigned taps);

/// Pixel clock ticks to nanoseconds, rounded down.
std::uint64_t ticks_to_ns(std::uint64_t ticks, std::uint64_t clock_hz) noexcept;

enum class FrameFate { kCaptured, kDroppedNoFit, kDroppedOverflow, kDroppedRagged, kDroppedEmpty };

struct FrameOutcome {
  std::uint64_t frame_number = 0;
  FrameFate fate = FrameFate::kCaptured;
  std::size_t byte_count = 0;  // bytes the frame carried (0 when not measured)
};

struct AcquisitionOptions {
  std::size_t seed_expected_bytes = 0;
  unsigned fit_window = kDefaultFitWindow;
};

/// Write side of the pipeline: consumes clock samples, drops sync, packs valid
/// pixels into containers (1 byte for 8-bit, 2 bytes little-endian otherwise)
/// and publishes whole frames into the VFifo with a FrameInfo record.
class FrameWriter {
 public:
  FrameWriter(VFifo& fifo, FrameInfoFifo& infos, const CLConfig& config,
              AcquisitionOptions options = {});

  void set_user_meta(std::uint64_t meta) noexcept { user_meta_ = meta; }
  void set_observer(std::function<void(const FrameOutcome&)> observer) {
    observer_ = std::move(observer);
  }

  void consume(std::span<const ClockSample> samples);
  void consume(const ClockSample& s);

  /// Snapshot; safe to call from any thread.
  AcqStats stats() const noexcept;
  std::uint64_t cycles() const noexcept { return cycle_; }
  const FitMonitor& monitor() const noexcept { return monitor_; }

 private:
  void begin_frame();
  void append_pixels(std::span<const ClockSample> run);
  void end_line();
  void end_frame();
  void finish(FrameFate fate);

  VFifo& fifo_;
  FrameInfoFifo& infos_;
  CLConfig config_;
  FitMonitor monitor_;
  std::function<void(const FrameOutcome&)> observer_;
  std::uint64_t user_meta_ = 0;

  std::uint64_t cycle_ = 0;
  std::uint64_t next_frame_number_ = 0;
  bool prev_fval_ = false;

  // Per-frame state.
  bool in_frame_ = false;
  bool accepted_ = false;
  bool overflow_ = false;
  bool ragged_ = false;
  bool in_line_ = false;
  std::uint64_t frame_number_ = 0;
  std::uint64_t frame_start_ = 0;
  std::uint32_t lines_ = 0;
  std::uint32_t line_valid_clocks_ = 0;
  std::optional<std::uint32_t> first_line_clocks_;
  std::size_t frame_bytes_ = 0;
  std::vector<std::uint8_t> line_buffer_;

  std::atomic<std::uint64_t> captured_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> bytes_written_{0};
};

/// Convenience wrapper: one writer over a whole stream.
AcqStats vfifo_write(VFifo& fifo, FrameInfoFifo& infos, std::span<const ClockSample> stream,
                     const CLConfig& config, std::uint64_t user_meta,
                     AcquisitionOptions options = {});

struct ReadFrame {
  FrameInfo info;
  Frame frame;
  std::vector<ClockSample> sync;  // empty unless regeneration was requested
};

/// Pops one FrameInfo, reads exactly its byte_count from the VFifo and
/// rebuilds the frame. With `regenerate_sync`, also produces the FVAL-high span
/// with LVAL=DVAL high for width/taps clocks per line and one blank clock
/// between lines. Throws Underflow or CorruptInfo.
ReadFrame frame_read(VFifo& fifo, FrameInfoFifo& infos, unsigned taps,
                     bool regenerate_sync = true);

/// Reads the container bytes of an already-popped FrameInfo into `out`.
/// Throws CorruptInfo if byte_count exceeds the committed bytes.
void read_frame_bytes(VFifo& fifo, const FrameInfo& info, std::vector<std::uint8_t>& out);

/// Rebuilds pixel values from container bytes.
Frame unpack_frame(const FrameInfo& info, std::span<const std::uint8_t> bytes);

std::vector<ClockSample> regenerate_sync(const Frame& frame, unsigned taps);

}  // namespace clgrab
