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

#include "clgrab/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "clgrab/dma.hpp"
#include "clgrab/error.hpp"
#include "clgrab/tiff.hpp"

namespace clgrab {
namespace {

std::size_t largest_frame_bytes(const RunConfig& c) {
  const std::uint32_t w = c.random_geometry && c.max_width ? c.max_width : c.camera.width;
  const std::uint32_t h = c.random_geometry && c.max_height ? c.max_height : c.camera.height;
  return std::size_t{w} * h * container_bytes(c.camera.bits_per_pixel);
}

void expect_ok(Camera& camera, const std::string& line) {
  const std::string reply = camera.command(line);
  if (reply != "OK\r") {
    throw Error(ErrorCode::kPipeline, "camera rejected '" + line.substr(0, line.size() - 1) +
                                          "': " + reply.substr(0, reply.size() - 1));
  }
}

// Reconfigures the camera between frames the way a host would: stop, set the
// geometry, start again.
void apply_geometry(Camera& camera, const CameraState& geometry) {
  const CameraState& cur = camera.state();
  if (cur.width == geometry.width && cur.height == geometry.height) return;
  expect_ok(camera, "STOP\r");
  expect_ok(camera, "SET WIDTH " + std::to_string(geometry.width) + "\r");
  expect_ok(camera, "SET HEIGHT " + std::to_string(geometry.height) + "\r");
  expect_ok(camera, "START\r");
}

// Camera side of the pipeline: streams frames through the cable into the
// writer in blocks of block_clocks samples.
class CameraFeed {
 public:
  CameraFeed(const RunConfig& config, FrameWriter& writer)
      : config_(config),
        camera_(config.camera),
        writer_(writer),
        loop_(config.camera.link_config(), config.skew) {
    block_.reserve(config.block_clocks + kMaxDimension + kMaxGap);
    expect_ok(camera_, "START\r");
    append_idle(camera_.state(), 1, block_);
  }

  void stream_frame(std::uint64_t index) {
    if (config_.random_geometry) apply_geometry(camera_, frame_geometry(config_, index));
    const Frame frame = camera_.next_frame();
    const CameraState& state = camera_.active();
    for (std::uint32_t y = 0; y < frame.height; ++y) {
      append_line(state, frame, y, block_);
      if (block_.size() >= config_.block_clocks) flush();
    }
    flush();
  }

  std::uint64_t frames_emitted() const noexcept { return camera_.frames_emitted(); }

 private:
  void flush() {
    if (block_.empty()) return;
    loop_.process(block_, recovered_);
    writer_.consume(recovered_);
    block_.clear();
  }

  const RunConfig& config_;
  Camera camera_;
  FrameWriter& writer_;
  LinkLoopback loop_;
  std::vector<ClockSample> block_;
  std::vector<ClockSample> recovered_;
};

// Host side: frame reader, TIFF header provider and DMA engine. The reader
// streams the frame straight out of the VFIFO behind its header.
class HostSink {
 public:
  explicit HostSink(const RunConfig& config)
      : dma_(config.sg_buffers, dma::build_sg_list(config.sg_buffers, config.sg_chunk)) {}

  /// Moves one frame into host memory; returns the bytes transferred.
  std::size_t deliver(VFifo& fifo, const FrameInfo& info) {
    const tiff::TiffHeader header = tiff::frame_header(info);
    const auto body = fifo.peek(info.byte_count);
    const std::span<const std::uint8_t> parts[3] = {header, body[0], body[1]};
    const std::size_t size = tiff::kHeaderBytes + info.byte_count;
    // The host has consumed everything delivered so far; hand the list back
    // when the next frame would not fit what is left of it.
    if (dma_.remaining() < size) dma_.rearm();
    const auto c = dma_.transfer(info.frame_number, parts);
    if (!c || c->status != dma::CompletionStatus::kOk) {
      throw Error(ErrorCode::kPipeline, "frame " + std::to_string(info.frame_number) + " (" +
                                            std::to_string(size) +
                                            " bytes) does not fit the scatter-gather list");
    }
    fifo.release(info.byte_count);
    return c->bytes_written;
  }

  /// The last delivered frame as the host reads it back from its buffers.
  std::vector<std::uint8_t> last_file() const {
    return dma_.gather(dma_.completions().size() - 1);
  }

 private:
  dma::DmaEngine dma_;
};

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

// --------------------------------------------------------- LinkLoopback

LinkLoopback::LinkLoopback(const CLConfig& config, std::array<unsigned, 3> skew)
    : config_(config), skew_(skew), channels_(channel_count(config.mode)) {
  validate(config_);
  for (unsigned s : skew_) {
    if (s >= link::kBitTimesPerWord) {
      throw Error(ErrorCode::kBadConfig, "channel skew must be in 0..6");
    }
  }
}

void LinkLoopback::process(std::span<const ClockSample> in, std::vector<ClockSample>& out) {
  pixels_to_groups(in, config_, groups_);
  for (unsigned c = 0; c < channels_; ++c) {
    tx_[c].resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) tx_[c][i] = link::LinkWord{groups_[i].words[c]};
  }
  for (unsigned c = 0; c < channels_; ++c) {
    link::serialize_channel(tx_[c], skew_[c], lanes_[c]);
    link::deserialize_channel(lanes_[c], rx_[c]);
  }
  link::merge_channels(rx_[0], rx_[1], rx_[2], config_, groups_);
  groups_to_pixels(groups_, config_, out);
}

// ------------------------------------------------------------------ grab

CameraState frame_geometry(const RunConfig& config, std::uint64_t index) {
  CameraState s = config.camera;
  if (!config.random_geometry) return s;
  const std::uint32_t max_w = config.max_width ? config.max_width : s.width;
  const std::uint32_t max_h = config.max_height ? config.max_height : s.height;
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const std::uint64_t clocks = max_w / s.taps;
  s.width = static_cast<std::uint32_t>((1 + rng() % clocks) * s.taps);
  s.height = static_cast<std::uint32_t>(1 + rng() % max_h);
  return s;
}

GrabResult run_grab(const RunConfig& config) {
  validate(config);
  const std::filesystem::path dir(config.output_dir);
  if (config.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
      throw Error(ErrorCode::kIo, "cannot create output directory " + dir.string());
    }
  }

  VFifo fifo(config.vfifo_capacity, config.vfifo_page);
  FrameInfoFifo infos;
  AcquisitionOptions options;
  options.seed_expected_bytes =
      config.fit_seed_bytes ? config.fit_seed_bytes : largest_frame_bytes(config);
  options.fit_window = config.fit_window;
  FrameWriter writer(fifo, infos, config.camera.link_config(), options);
  writer.set_user_meta(config.user_meta);
  CameraFeed feed(config, writer);
  HostSink host(config);

  GrabResult result;
  for (std::uint64_t i = 0; i < config.frames; ++i) {
    feed.stream_frame(i);
    while (auto info = infos.try_pop()) {
      result.dma_bytes += host.deliver(fifo, *info);
      if (config.write_files) {
        auto path = dir / frame_file_name(info->frame_number);
        write_file(path, host.last_file());
        result.files.push_back(std::move(path));
        ++result.files_written;
      }
      result.frames.push_back(*info);
    }
  }
  result.stats = writer.stats();
  result.frames_emitted = feed.frames_emitted();
  return result;
}

// ----------------------------------------------------------------- bench

std::uint64_t memory_bandwidth(unsigned bus_bits, std::uint64_t clock_hz, bool ddr) {
  return std::uint64_t{bus_bits} * clock_hz * (ddr ? 2u : 1u);
}

bool Ratio::exceeds(std::uint64_t n) const noexcept {
  // num / den > n  <=>  num > n * den, evaluated without overflow.
  return num / den > n || (num / den == n && num % den != 0);
}

Ratio headroom(std::uint64_t bandwidth_bits, unsigned cameras, std::uint64_t raw_bits) {
  Ratio r{bandwidth_bits, std::uint64_t{cameras} * 2 * raw_bits};
  if (r.den == 0) throw Error(ErrorCode::kInvalidArgument, "headroom of a zero-rate link");
  const std::uint64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string three_sig_figs(std::uint64_t value) {
  if (value == 0) return "0";
  unsigned digits = 0;
  for (std::uint64_t v = value; v != 0; v /= 10) ++digits;
  std::uint64_t sig = value;
  if (digits > 3) {
    std::uint64_t div = 1;
    for (unsigned i = 0; i < digits - 3; ++i) div *= 10;
    sig = value / div;
    if ((value % div) * 2 >= div) ++sig;
    if (sig == 1000) {
      sig = 100;
      ++digits;
    }
  }
  static constexpr const char* kPrefixes[] = {"", " k", " M", " G", " T", " P", " E"};
  const unsigned group = (digits - 1) / 3;
  const unsigned int_digits = digits - 3 * group;
  std::string s = std::to_string(sig);
  if (digits <= 3) return s;
  if (int_digits < 3) s.insert(int_digits, ".");
  return s + kPrefixes[group];
}

BenchReport bench_arithmetic(const RunConfig& config) {
  validate(config);
  BenchReport r;
  r.raw_bits_per_s = raw_throughput(config.camera.link_config());
  r.line_rate_bytes_per_s = r.raw_bits_per_s / 8;
  r.memory_bits_per_s = memory_bandwidth(config.mem_bus_bits, config.mem_clock_hz, config.mem_ddr);
  r.cameras = config.cameras;
  r.headroom = headroom(r.memory_bits_per_s, config.cameras, r.raw_bits_per_s);
  return r;
}

BenchReport run_bench(const RunConfig& config) {
  BenchReport report = bench_arithmetic(config);

  VFifo fifo(config.vfifo_capacity, config.vfifo_page);
  FrameInfoFifo infos;
  AcquisitionOptions options;
  options.seed_expected_bytes =
      config.fit_seed_bytes ? config.fit_seed_bytes : largest_frame_bytes(config);
  options.fit_window = config.fit_window;
  FrameWriter writer(fifo, infos, config.camera.link_config(), options);
  writer.set_user_meta(config.user_meta);
  CameraFeed feed(config, writer);
  HostSink host(config);

  std::atomic<bool> stop{false};
  std::exception_ptr writer_error;
  std::exception_ptr reader_error;
  std::uint64_t frames = 0;
  std::uint64_t bytes = 0;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::thread reader([&] {
    try {
      while (auto info = infos.wait_pop()) {
        host.deliver(fifo, *info);
        ++frames;
        bytes += info->byte_count;
      }
    } catch (...) {
      reader_error = std::current_exception();
      stop = true;
    }
  });
  std::thread camera([&] {
    try {
      for (std::uint64_t i = 0; !stop.load(std::memory_order_relaxed); ++i) feed.stream_frame(i);
    } catch (...) {
      writer_error = std::current_exception();
    }
    infos.close();
  });
  const auto deadline = start + std::chrono::duration<double>(config.bench_seconds);
  while (Clock::now() < deadline && !stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  stop = true;
  camera.join();
  reader.join();
  const auto end = Clock::now();
  if (writer_error) std::rethrow_exception(writer_error);
  if (reader_error) std::rethrow_exception(reader_error);

  report.seconds = std::chrono::duration<double>(end - start).count();
  report.frames = frames;
  report.bytes = bytes;
  report.measured_bytes_per_s = static_cast<double>(bytes) / report.seconds;
  report.stats = writer.stats();
  return report;
}

// ------------------------------------------------------------- reports

std::string format_stats(const AcqStats& s, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::kKeyValue) {
    os << "frames_captured=" << s.frames_captured << '\n'
       << "frames_dropped=" << s.frames_dropped << '\n'
       << "bytes_written=" << s.bytes_written << '\n'
       << "high_watermark_bytes=" << s.high_watermark_bytes << '\n';
  } else {
    os << "frames captured : " << s.frames_captured << '\n'
       << "frames dropped  : " << s.frames_dropped << '\n'
       << "bytes written   : " << s.bytes_written << '\n'
       << "high watermark  : " << s.high_watermark_bytes << " bytes\n";
  }
  return os.str();
}

std::string format_bench(const BenchReport& r, ReportFormat format) {
  std::ostringstream os;
  const auto measured = static_cast<std::uint64_t>(r.measured_bytes_per_s);
  if (format == ReportFormat::kKeyValue) {
    os << "raw_throughput_bps=" << r.raw_bits_per_s << '\n'
       << "raw_throughput=" << three_sig_figs(r.raw_bits_per_s) << "b/s\n"
       << "line_rate_Bps=" << r.line_rate_bytes_per_s << '\n'
       << "memory_bandwidth_bps=" << r.memory_bits_per_s << '\n'
       << "memory_bandwidth=" << three_sig_figs(r.memory_bits_per_s) << "b/s\n"
       << "cameras=" << r.cameras << '\n'
       << "headroom=" << r.headroom.num << '/' << r.headroom.den << '\n'
       << "headroom_decimal=" << r.headroom.value() << '\n'
       << "headroom_exceeds_2=" << (r.headroom.exceeds(2) ? 1 : 0) << '\n';
    if (r.seconds > 0) {
      os << "measured_seconds=" << r.seconds << '\n'
         << "measured_frames=" << r.frames << '\n'
         << "measured_bytes=" << r.bytes << '\n'
         << "measured_Bps=" << measured << '\n'
         << format_stats(r.stats, format);
    }
  } else {
    os << "raw throughput     : " << three_sig_figs(r.raw_bits_per_s) << "b/s ("
       << r.raw_bits_per_s << " b/s, " << three_sig_figs(r.line_rate_bytes_per_s) << "B/s)\n"
       << "memory bandwidth   : " << three_sig_figs(r.memory_bits_per_s) << "b/s ("
       << r.memory_bits_per_s << " b/s)\n"
       << "headroom           : " << r.headroom.num << '/' << r.headroom.den
       << " = " << r.headroom.value() << (r.headroom.exceeds(2) ? " (> 2)" : " (<= 2)") << " for "
       << r.cameras << " cameras\n";
    if (r.seconds > 0) {
      os << "measured pipeline  : " << three_sig_figs(measured) << "B/s over " << r.seconds
         << " s (" << r.frames << " frames, " << r.bytes << " bytes)\n"
         << "hardware line rate : " << three_sig_figs(r.line_rate_bytes_per_s) << "B/s\n"
         << format_stats(r.stats, format);
    }
  }
  return os.str();
}

std::string frame_file_name(std::uint64_t frame_number) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06llu.tif",
                static_cast<unsigned long long>(frame_number));
  return name;
}

}  // namespace clgrab
