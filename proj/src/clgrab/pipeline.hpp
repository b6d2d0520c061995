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

// End-to-end grabber pipeline:
//   camera -> tap mapping -> per-channel 7:1 serialization with skew ->
//   alignment and deserialization -> channel merge -> pixel recovery ->
//   VFIFO writer -> frame reader -> TIFF header -> scatter-gather DMA -> files

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "clgrab/acquisition.hpp"
#include "clgrab/link_codec.hpp"
#include "clgrab/run_config.hpp"
#include "clgrab/tap_mapper.hpp"

namespace clgrab {

/// Sends clock samples over the simulated cable and recovers them on the
/// receiving side, one block at a time. Each channel is skewed by its own
/// bit phase within the block.
class LinkLoopback {
 public:
  LinkLoopback(const CLConfig& config, std::array<unsigned, 3> skew);

  /// `out` is overwritten with the recovered samples.
  void process(std::span<const ClockSample> in, std::vector<ClockSample>& out);

 private:
  CLConfig config_;
  std::array<unsigned, 3> skew_;
  unsigned channels_;
  std::array<std::vector<link::LinkWord>, 3> tx_;
  std::array<std::vector<link::LinkWord>, 3> rx_;
  std::vector<link::LineGroup> groups_;
  std::array<link::LaneSet, 3> lanes_;
};

struct GrabResult {
  AcqStats stats;
  std::uint64_t frames_emitted = 0;
  std::uint64_t files_written = 0;
  std::uint64_t dma_bytes = 0;
  std::vector<FrameInfo> frames;  // captured frames, in read order
  std::vector<std::filesystem::path> files;
};

/// Frame geometry used for frame `index` of a run (fixed, or drawn from the
/// run seed when random_geometry is set).
CameraState frame_geometry(const RunConfig& config, std::uint64_t index);

/// Runs the whole pipeline single-threaded: each frame is streamed through
/// the writer and then drained by the reader before the next frame starts.
/// Throws BadConfig, Io or Pipeline.
GrabResult run_grab(const RunConfig& config);

/// bus_bits x clock x (2 if ddr), in bits per second.
std::uint64_t memory_bandwidth(unsigned bus_bits, std::uint64_t clock_hz, bool ddr);

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  /// num/den > n, exactly.
  bool exceeds(std::uint64_t n) const noexcept;
};

/// bandwidth / (cameras x 2 x raw), reduced.
Ratio headroom(std::uint64_t bandwidth_bits, unsigned cameras, std::uint64_t raw_bits);

/// Rounds to three significant figures and prints with a unit prefix,
/// e.g. 68224000000 -> "68.2 G".
std::string three_sig_figs(std::uint64_t value);

struct BenchReport {
  std::uint64_t raw_bits_per_s = 0;
  std::uint64_t line_rate_bytes_per_s = 0;  // raw / 8
  std::uint64_t memory_bits_per_s = 0;
  Ratio headroom;
  unsigned cameras = 0;
  double seconds = 0;
  std::uint64_t frames = 0;
  std::uint64_t bytes = 0;
  double measured_bytes_per_s = 0;
  AcqStats stats;
};

/// Theoretical figures only; no streaming.
BenchReport bench_arithmetic(const RunConfig& config);

/// Theoretical figures plus a concurrent writer/reader run of at least
/// bench_seconds of wall-clock time.
BenchReport run_bench(const RunConfig& config);

std::string format_stats(const AcqStats& stats, ReportFormat format);
std::string format_bench(const BenchReport& report, ReportFormat format);

/// frame_000042.tif
std::string frame_file_name(std::uint64_t frame_number);

}  // namespace clgrab
