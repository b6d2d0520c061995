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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Every limit below is fixed here; none is
// adjustable from the command line.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "clgrab/acquisition.hpp"
#include "clgrab/camera_sim.hpp"
#include "clgrab/clgrab.h"
#include "clgrab/control.hpp"
#include "clgrab/dma.hpp"
#include "clgrab/error.hpp"
#include "clgrab/link_codec.hpp"
#include "clgrab/pipeline.hpp"
#include "clgrab/tap_mapper.hpp"
#include "support/dma_walker.hpp"
#include "support/fifo_model.hpp"
#include "support/gen.hpp"
#include "support/tiff_reader.hpp"

using namespace clgrab;
using namespace clgrab::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kCodecFramesPerPhase = 1000;
constexpr double kCodecBudgetSeconds = 120.0;
constexpr int kGrabFrames = 100;
constexpr int kFifoSteps = 100'000;
constexpr std::size_t kFifoCapacity = 1u << 20;
constexpr std::size_t kFifoPage = 4096;
constexpr int kGeometries = 1000;
constexpr int kDmaTilings = 10'000;
constexpr double kBenchFloorBytesPerSecond = 100e6;
constexpr double kBenchBudgetSeconds = 30.0;

constexpr std::uint64_t kDecaRawBits = 6'800'000'000ull;       // 6.8 Gb/s
constexpr std::uint64_t kMemoryBits = 68'224'000'000ull;       // 64 x 533 MHz x 2
constexpr std::uint64_t kLineRateBytes = 850'000'000ull;       // 6.8 Gb/s / 8

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- codec

Verdict codec_round_trip() {
  Rng rng(0xacce0001);
  const auto t0 = Clock::now();
  std::uint64_t frames = 0, clocks = 0, mismatches = 0;
  std::vector<link::LineGroup> groups, merged;
  std::vector<ClockSample> recovered;
  std::array<std::vector<link::LinkWord>, 3> tx, rx;
  link::LaneSet lanes;
  VFifo fifo(1 << 20, 4096);
  FrameInfoFifo infos;
  for (const auto& nc : supported_configs()) {
    const unsigned channels = channel_count(nc.config.mode);
    for (unsigned p = 0; p < 7; ++p) {
      for (int f = 0; f < kCodecFramesPerPhase; ++f) {
        CameraState s = random_camera(rng, nc.config, 64, 16, 4);
        s.pattern = Pattern{PatternKind::kRandom, rng.next()};
        const Frame frame = generate_frame(s, static_cast<std::uint64_t>(f));
        const auto samples = emit_video(s, std::span(&frame, 1));
        pixels_to_groups(samples, nc.config, groups);
        // Channel X sweeps the phase under test; Y and Z walk all phases
        // across the frames.
        const unsigned phase[3] = {p, (p + static_cast<unsigned>(f)) % 7,
                                   (p + 3 * static_cast<unsigned>(f)) % 7};
        for (unsigned c = 0; c < 3; ++c) {
          tx[c].clear();
          rx[c].clear();
        }
        for (unsigned c = 0; c < channels; ++c) {
          for (const auto& g : groups) tx[c].push_back(g.channel(static_cast<link::ChannelId>(c)));
          link::serialize_channel(tx[c], phase[c], lanes);
          if (link::align_channel(lanes) != phase[c]) ++mismatches;
          link::deserialize_channel(lanes, rx[c]);
        }
        link::merge_channels(rx[0], rx[1], rx[2], nc.config, merged);
        groups_to_pixels(merged, nc.config, recovered);
        if (recovered != samples) ++mismatches;

        // Remap into the frame buffer and compare pixels.
        vfifo_write(fifo, infos, recovered, nc.config, 0);
        if (infos.size() != 1) {
          ++mismatches;
        } else if (frame_read(fifo, infos, s.taps, false).frame != frame) {
          ++mismatches;
        }
        ++frames;
        clocks += samples.size();
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = mismatches == 0 && frames == 9u * 7u * kCodecFramesPerPhase && secs < kCodecBudgetSeconds;
  return {ok, std::to_string(mismatches) + " mismatches over " + std::to_string(frames) +
                  " frames (9 configs x 7 phases x " + std::to_string(kCodecFramesPerPhase) + ", " +
                  std::to_string(clocks) + " clocks) in " + fmt("%.1f", secs) + " s (limit " +
                  fmt("%.0f", kCodecBudgetSeconds) + " s)"};
}

// ----------------------------------------------------------- arithmetic

Verdict throughput_arithmetic() {
  std::uint64_t raw = 0;
  const bool raw_ok = clgrab_raw_throughput(CLGRAB_MODE_DECA, 10, 8, 85'000'000, &raw) == CLGRAB_OK;
  const std::uint64_t mem = clgrab_memory_bandwidth(64, 533'000'000, 1);

  clgrab_config* cfg = nullptr;
  clgrab_config_create(&cfg);
  clgrab_config_set(cfg, "mode", "DECA");
  clgrab_config_set(cfg, "taps", "10");
  clgrab_config_set(cfg, "width", "1280");
  clgrab_config_set(cfg, "cameras", "2");
  clgrab_bench_report r{};
  const bool bench_ok = clgrab_bench(cfg, 0, &r) == CLGRAB_OK;
  char text[2048] = {};
  clgrab_bench_format(&r, 0, text, sizeof text, nullptr);
  clgrab_config_destroy(cfg);

  // Headroom as an exact fraction: bandwidth / (2 cameras x 2 x raw).
  const std::uint64_t need = 2ull * 2 * kDecaRawBits;
  const std::uint64_t g = std::gcd(kMemoryBits, need);
  const bool ratio_exact = r.headroom_num == kMemoryBits / g && r.headroom_den == need / g;
  const bool ratio_gt_2 = r.headroom_num > 2 * r.headroom_den;
  const std::string report(text);
  const bool printed = report.find("68.2 Gb/s") != std::string::npos &&
                       report.find("6.80 Gb/s") != std::string::npos;

  const bool ok = raw_ok && bench_ok && raw == kDecaRawBits && mem == kMemoryBits &&
                  r.raw_bits_per_s == kDecaRawBits && r.memory_bits_per_s == kMemoryBits &&
                  ratio_exact && ratio_gt_2 && printed;
  return {ok, "raw " + std::to_string(raw) + " b/s (6.8 Gb/s), memory " + std::to_string(mem) +
                  " b/s (reported 68.2 Gb/s), headroom " + std::to_string(r.headroom_num) + "/" +
                  std::to_string(r.headroom_den) + " = " +
                  fmt("%.3f", static_cast<double>(r.headroom_num) / r.headroom_den) + " > 2"};
}

// ---------------------------------------------------------- end to end

std::uint16_t formula_pixel(const CameraState& s, std::uint32_t x, std::uint32_t y,
                            std::uint64_t frame, const Frame& generated) {
  const std::uint64_t mod = std::uint64_t{1} << s.bits_per_pixel;
  switch (s.pattern.kind) {
    case PatternKind::kGradient: return static_cast<std::uint16_t>((x + y) % mod);
    case PatternKind::kChecker: return static_cast<std::uint16_t>((x + y) % 2 == 0 ? mod - 1 : 0);
    case PatternKind::kCounter:
      return static_cast<std::uint16_t>((std::uint64_t{y} * s.width + x + frame) % mod);
    case PatternKind::kRandom: return generated.at(x, y);
  }
  return 0;
}

Verdict end_to_end_grab() {
  const fs::path root = fs::temp_directory_path() / "clgrab_acceptance_grab";
  fs::remove_all(root);
  const char* runs[] = {
      "mode=BASE\ntaps=1\ndepth=8\nwidth=256\nheight=128\npattern=GRADIENT\nskew_x=1\n",
      "mode=BASE\ntaps=1\ndepth=12\nwidth=256\nheight=128\npattern=COUNTER\nskew_x=6\n",
      "mode=MEDIUM\ntaps=4\ndepth=8\nwidth=1024\nheight=128\npattern=CHECKER\nskew_x=2\nskew_y=5\n",
      "mode=DECA\ntaps=10\ndepth=8\nwidth=2560\nheight=128\npattern=RANDOM:77\nskew_x=3\nskew_y=6\nskew_z=4\n",
  };
  const int per_run = kGrabFrames / 4;
  int files = 0, exact = 0;
  std::string problem;
  for (int i = 0; i < 4; ++i) {
    const fs::path dir = root / ("run" + std::to_string(i));
    const fs::path conf = root / ("run" + std::to_string(i) + ".conf");
    const std::string text = std::string(runs[i]) + "frames=" + std::to_string(per_run) +
                             "\nrandom_geometry=1\nseed=" + std::to_string(1000 + i) +
                             "\nline_gap=3\nframe_gap=5\noutput_dir=" + dir.string() + "\n";
    fs::create_directories(root);
    std::ofstream(conf) << text;

    clgrab_config* cfg = nullptr;
    clgrab_config_create(&cfg);
    clgrab_stats st{};
    const clgrab_status rc = clgrab_config_load_file(cfg, conf.string().c_str()) == CLGRAB_OK
                                 ? clgrab_grab(cfg, &st)
                                 : CLGRAB_E_BAD_CONFIG;
    clgrab_config_destroy(cfg);
    if (rc != CLGRAB_OK) {
      problem = std::string("grab failed: ") + clgrab_last_error();
      break;
    }

    RunConfig mirror;
    apply_config_text(mirror, text);
    for (int k = 0; k < per_run; ++k) {
      const fs::path file = dir / frame_file_name(static_cast<std::uint64_t>(k));
      if (!fs::exists(file)) continue;
      ++files;
      const CameraState geom = frame_geometry(mirror, static_cast<std::uint64_t>(k));
      const Frame generated = generate_frame(geom, static_cast<std::uint64_t>(k));
      const DecodedTiff d = read_tiff_file(file.string());
      bool same = d.width == geom.width && d.height == geom.height &&
                  d.bits_per_sample == (geom.bits_per_pixel == 8 ? 8 : 16);
      for (std::uint32_t y = 0; same && y < geom.height; ++y) {
        for (std::uint32_t x = 0; same && x < geom.width; ++x) {
          same = d.pixels[std::size_t{y} * geom.width + x] ==
                 formula_pixel(geom, x, y, static_cast<std::uint64_t>(k), generated);
        }
      }
      exact += same;
    }
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(dir)) on_disk += e.path().extension() == ".tif";
    if (on_disk != static_cast<std::size_t>(per_run) || st.files_written != static_cast<std::uint64_t>(per_run)) {
      problem = "run " + std::to_string(i) + " wrote " + std::to_string(on_disk) + " files";
    }
  }
  fs::remove_all(root);
  const bool ok = problem.empty() && files == kGrabFrames && exact == kGrabFrames;
  return {ok, std::to_string(files) + " TIFF files, " + std::to_string(exact) +
                  " pixel-exact under libtiff (4 configs, random geometry, skewed channels)" +
                  (problem.empty() ? "" : "; " + problem)};
}

// ---------------------------------------------------------------- VFIFO

// Produces adversarial frames clock by clock for an 80-bit camera.
class FrameSource {
 public:
  explicit FrameSource(Rng& rng) : rng_(rng) {}

  ClockSample next() {
    if (pos_ == buf_.size()) refill();
    return buf_[pos_++];
  }
  std::uint64_t frames() const { return frames_; }

 private:
  static constexpr unsigned kTaps = 10;

  ClockSample make(bool fval, bool lval, bool dval) {
    ClockSample s;
    s.taps = kTaps;
    s.fval = fval;
    s.lval = lval;
    s.dval = dval;
    for (unsigned t = 0; t < kTaps; ++t) s.pixels[t] = static_cast<std::uint16_t>((seq_++ * 131) & 0xFF);
    return s;
  }

  void refill() {
    buf_.clear();
    pos_ = 0;
    ++frames_;
    std::uint32_t clocks = 1, lines = 1;
    const std::size_t line_cap = 1024;  // clocks, 10240 bytes per line
    const std::size_t page_lines = (kFifoCapacity - kFifoPage) / (line_cap * kTaps);
    bool ragged = false, empty = false;
    switch (rng_.range(0, 9)) {
      case 0: break;                                                      // one pixel clock
      case 1: clocks = line_cap; lines = static_cast<std::uint32_t>(page_lines); break;  // just fits empty FIFO
      case 2: clocks = line_cap; lines = static_cast<std::uint32_t>(page_lines + 1); break;  // misses by a line
      case 3: clocks = line_cap; lines = static_cast<std::uint32_t>(kFifoCapacity / (line_cap * kTaps) + 2); break;  // over capacity
      case 4: clocks = static_cast<std::uint32_t>(rng_.range(1, 64)); lines = static_cast<std::uint32_t>(rng_.range(1, 8)); break;
      case 5: clocks = static_cast<std::uint32_t>(rng_.range(100, 1024)); lines = static_cast<std::uint32_t>(rng_.range(10, 60)); break;
      case 6: clocks = line_cap; lines = static_cast<std::uint32_t>(rng_.range(page_lines / 2, page_lines + 3)); break;
      case 7: clocks = static_cast<std::uint32_t>(rng_.range(1, 300)); lines = static_cast<std::uint32_t>(rng_.range(2, 20)); ragged = true; break;
      case 8: empty = true; lines = static_cast<std::uint32_t>(rng_.range(1, 5)); break;
      default: clocks = static_cast<std::uint32_t>(rng_.range(1, 1024)); lines = static_cast<std::uint32_t>(rng_.range(1, 120)); break;
    }
    buf_.push_back(make(false, false, false));
    for (std::uint32_t y = 0; y < lines; ++y) {
      const std::uint32_t n = ragged && y + 1 == lines ? clocks + 1 : clocks;
      for (std::uint32_t c = 0; c < n; ++c) buf_.push_back(make(true, !empty, !empty));
      buf_.push_back(make(true, false, false));
    }
    for (std::size_t k = rng_.range(1, 4); k > 0; --k) buf_.push_back(make(false, false, false));
  }

  Rng& rng_;
  std::vector<ClockSample> buf_;
  std::size_t pos_ = 0;
  std::uint64_t frames_ = 0;
  std::uint64_t seq_ = 0;
};

Verdict vfifo_safety() {
  Rng rng(0xacce0004);
  const CLConfig deca{Mode::kDeca, 10, 8, kMaxPixelClockHz};
  const std::size_t seed_bytes = 100'000;
  VFifo fifo(kFifoCapacity, kFifoPage);
  FrameInfoFifo infos;
  FrameWriter writer(fifo, infos, deca, AcquisitionOptions{seed_bytes, 8});
  FifoModel model(kFifoCapacity, kFifoPage, seed_bytes, 8, 10, 1);
  std::vector<FrameFate> fates;
  std::size_t committed_bytes = 0;  // sum of byte_count over queued records
  writer.set_observer([&](const FrameOutcome& o) {
    fates.push_back(o.fate);
    if (o.fate == FrameFate::kCaptured) committed_bytes += o.byte_count;
  });
  FrameSource source(rng);

  std::uint64_t violations = 0, reads = 0, max_used = 0;
  std::vector<ClockSample> chunk;
  double read_rate = 0.5;
  for (int step = 0; step < kFifoSteps; ++step) {
    if (step % 2000 == 0) {
      const double rates[] = {0.0, 0.02, 0.2, 0.5, 0.9, 1.0};
      read_rate = rates[rng.range(0, 5)];
    }
    if (rng.chance(read_rate)) {
      if (model.committed_frames() > 0) {
        const ReadFrame r = frame_read(fifo, infos, 10, false);
        const auto expect = model.read_frame();
        committed_bytes -= r.info.byte_count;
        ++reads;
        if (r.frame.pixels.size() != expect->size() ||
            !std::equal(expect->begin(), expect->end(), r.frame.pixels.begin())) {
          ++violations;
        }
      } else if (!infos.empty()) {
        ++violations;
      }
    } else {
      chunk.clear();
      for (std::size_t k = rng.range(1, 1024); k > 0; --k) chunk.push_back(source.next());
      writer.consume(chunk);
      for (const auto& s : chunk) model.feed(s);
    }
    max_used = std::max<std::uint64_t>(max_used, fifo.used());
    if (fifo.used() > fifo.capacity() || fifo.used() + fifo.pending() > fifo.capacity()) ++violations;
    if (fifo.used() != committed_bytes) ++violations;  // a partial frame is visible
    if (fifo.used() != model.used()) ++violations;
  }
  std::size_t decisions_equal = 0;
  const auto& mf = model.fates();
  const std::size_t n = std::min(fates.size(), mf.size());
  std::size_t counts[5] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const FrameFate want[] = {FrameFate::kCaptured, FrameFate::kDroppedNoFit,
                              FrameFate::kDroppedOverflow, FrameFate::kDroppedRagged,
                              FrameFate::kDroppedEmpty};
    decisions_equal += fates[i] == want[static_cast<int>(mf[i])];
    ++counts[static_cast<int>(mf[i])];
  }
  const AcqStats st = writer.stats();
  const bool every_kind = counts[0] && counts[1] && counts[2] && counts[3] && counts[4];
  const bool ok = violations == 0 && fates.size() == mf.size() && decisions_equal == n &&
                  st.frames_captured + st.frames_dropped == fates.size() && every_kind &&
                  st.high_watermark_bytes <= kFifoCapacity;
  return {ok, std::to_string(kFifoSteps) + " steps, " + std::to_string(violations) +
                  " violations, " + std::to_string(decisions_equal) + "/" +
                  std::to_string(fates.size()) + " decisions match the byte model (captured " +
                  std::to_string(counts[0]) + ", no-fit " + std::to_string(counts[1]) +
                  ", overflow " + std::to_string(counts[2]) + ", ragged " +
                  std::to_string(counts[3]) + ", empty " + std::to_string(counts[4]) + "), " +
                  std::to_string(reads) + " reads, peak " + std::to_string(max_used) + " of " +
                  std::to_string(kFifoCapacity) + " bytes"};
}

// ------------------------------------------------------ resolution detection

Verdict resolution_detection() {
  Rng rng(0xacce0005);
  int correct = 0, captured_exact = 0;
  std::uint64_t gated_total = 0;
  const auto configs = supported_configs();
  for (int i = 0; i < kGeometries; ++i) {
    const CLConfig config = rng.pick(configs).config;
    CameraState s = random_camera(rng, config, 256, 128, 16);
    const Frame frame = generate_frame(s, static_cast<std::uint64_t>(i));
    const auto clean = emit_video(s, std::span(&frame, 1));
    // Sprinkle DVAL-low clocks carrying junk pixels inside the lines.
    std::vector<ClockSample> v;
    v.reserve(clean.size() * 2);
    for (const auto& c : clean) {
      if (c.lval && rng.chance(0.1)) {
        for (std::size_t k = rng.range(1, 3); k > 0; --k) {
          ClockSample junk = random_sample(rng, config);
          junk.fval = junk.lval = true;
          junk.dval = false;
          v.push_back(junk);
          ++gated_total;
        }
      }
      v.push_back(c);
    }
    std::size_t a = 0;
    while (!v[a].fval) ++a;
    std::size_t b = a;
    while (b < v.size() && v[b].fval) ++b;
    const Resolution r = detect_resolution(std::span(v).subspan(a, b - a), s.taps);
    correct += r.width == s.width && r.height == s.height;

    VFifo fifo((std::size_t{s.width} * s.height * 2 / 4096 + 2) * 4096, 4096);
    FrameInfoFifo infos;
    vfifo_write(fifo, infos, v, config, 0);
    if (infos.size() == 1) captured_exact += frame_read(fifo, infos, s.taps, false).frame == frame;
  }
  const bool ok = correct == kGeometries && captured_exact == kGeometries && gated_total > 0;
  return {ok, std::to_string(correct) + "/" + std::to_string(kGeometries) +
                  " geometries detected, " + std::to_string(captured_exact) +
                  " frames captured pixel-exact, " + std::to_string(gated_total) +
                  " DVAL-low clocks excluded"};
}

// ----------------------------------------------------------------- DMA

Verdict dma_reassembly() {
  Rng rng(0xacce0006);
  int good = 0, exhausted_cases = 0, exhausted_good = 0;
  for (int i = 0; i < kDmaTilings; ++i) {
    std::vector<std::size_t> sizes(rng.range(1, 5));
    for (auto& s : sizes) s = rng.range(1, 3000);
    std::vector<dma::SgDescriptor> list;
    if (rng.chance(0.5)) {
      list = dma::build_sg_list(sizes, rng.range(1, 700));
    } else {
      for (std::size_t id = 0; id < sizes.size(); ++id) {
        for (std::size_t off = 0; off < sizes[id];) {
          const std::size_t len = std::min(sizes[id] - off, rng.range(1, 400));
          if (rng.chance(0.85)) list.push_back({id, off, len, false});
          off += len;
        }
      }
      for (std::size_t k = list.size(); k > 1; --k) std::swap(list[k - 1], list[rng.range(0, k - 1)]);
      if (list.empty()) list.push_back({0, 0, sizes[0], false});
      list.back().last = true;
    }
    const std::size_t capacity = std::accumulate(list.begin(), list.end(), std::size_t{0},
                                                 [](std::size_t a, const auto& d) { return a + d.length; });
    std::vector<std::vector<std::uint8_t>> frames(rng.range(1, 16));
    std::vector<std::size_t> lengths;
    std::vector<std::uint8_t> stream;
    for (auto& f : frames) {
      f = rng.bytes(rng.range(0, capacity / 4 + 300), 1);
      lengths.push_back(f.size());
      stream.insert(stream.end(), f.begin(), f.end());
    }
    dma::DmaEngine engine(sizes, list);
    std::size_t accepted = 0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      // Alternate single and two-piece submissions.
      std::optional<dma::Completion> c;
      if (k % 2 == 0) {
        c = engine.transfer(k, frames[k]);
      } else {
        const std::size_t cut = frames[k].size() / 3;
        const std::span<const std::uint8_t> parts[] = {
            std::span(frames[k]).first(cut), std::span(frames[k]).subspan(cut)};
        c = engine.transfer(k, parts);
      }
      if (!c) break;
      ++accepted;
    }
    const auto expected = expected_completions(lengths, list);
    const std::vector<dma::Completion> got(engine.completions().begin(), engine.completions().end());
    const auto walked = walk_descriptors(engine);
    std::size_t expect_bytes = 0;
    for (const auto& c : expected) expect_bytes += c.bytes_written;
    bool ok = got == expected && accepted == got.size() && walked.size() == expect_bytes &&
              std::equal(walked.begin(), walked.end(), stream.begin());

    const bool exhausts = stream.size() > capacity;
    const auto n_exhausted = std::count_if(got.begin(), got.end(), [](const auto& c) {
      return c.status == dma::CompletionStatus::kListExhausted;
    });
    if (exhausts) {
      ++exhausted_cases;
      const bool halted_right = n_exhausted == 1 && got.back().status == dma::CompletionStatus::kListExhausted &&
                                engine.halted() && !engine.transfer(999, frames[0]).has_value() &&
                                engine.completions().size() == got.size();
      exhausted_good += halted_right;
      ok = ok && halted_right;
    } else {
      ok = ok && n_exhausted == 0 && !engine.halted() && got.size() == frames.size();
    }
    good += ok;
  }
  const bool ok = good == kDmaTilings && exhausted_cases > 0 && exhausted_good == exhausted_cases;
  return {ok, std::to_string(good) + "/" + std::to_string(kDmaTilings) +
                  " tilings reassemble byte-identical; " + std::to_string(exhausted_good) + "/" +
                  std::to_string(exhausted_cases) + " exhaustion cases end with exactly one ListExhausted and halt"};
}

// ------------------------------------------------------------- control

struct Row {
  std::vector<std::string> setup;
  std::string command;
  std::string reply;
  std::string echo;  // expected GET reply afterwards, when set
};

std::vector<Row> protocol_table() {
  std::vector<Row> t;
  const std::pair<const char*, const char*> defaults[] = {
      {"WIDTH", "1024"},        {"HEIGHT", "768"},       {"DEPTH", "8"},
      {"TAPS", "1"},            {"MODE", "BASE"},        {"CLOCK_HZ", "85000000"},
      {"PATTERN", "GRADIENT"},  {"LINE_GAP", "4"},       {"FRAME_GAP", "16"}};
  for (const auto& [name, value] : defaults) {
    t.push_back({{}, std::string("GET ") + name, std::string("OK ") + value, ""});
  }
  auto set_ok = [&](std::vector<std::string> setup, std::string name, std::string value,
                    std::string echo = "") {
    t.push_back({std::move(setup), "SET " + name + " " + value, "OK",
                 "OK " + (echo.empty() ? value : echo)});
  };
  auto set_bad = [&](std::vector<std::string> setup, std::string name, std::string value) {
    t.push_back({std::move(setup), "SET " + name + " " + value, "ERR 2 bad value", ""});
  };
  for (const char* v : {"1", "2048", "16384"}) set_ok({}, "WIDTH", v);
  for (const char* v : {"0", "16385", "abc", "-1", "1e3"}) set_bad({}, "WIDTH", v);
  set_bad({"SET TAPS 2"}, "WIDTH", "1001");
  for (const char* v : {"1", "1000", "16384"}) set_ok({}, "HEIGHT", v);
  for (const char* v : {"0", "16385", "x"}) set_bad({}, "HEIGHT", v);
  for (const char* v : {"8", "10", "12", "16"}) set_ok({}, "DEPTH", v);
  for (const char* v : {"0", "7", "9", "17", "24"}) set_bad({}, "DEPTH", v);
  set_bad({"SET TAPS 2"}, "DEPTH", "10");
  for (const char* v : {"1", "2"}) set_ok({}, "TAPS", v);
  set_ok({"SET WIDTH 1020"}, "TAPS", "3");
  for (const char* v : {"0", "3", "4", "11"}) set_bad({}, "TAPS", v);
  set_bad({"SET DEPTH 12"}, "TAPS", "2");
  set_ok({}, "MODE", "BASE");
  set_ok({}, "MODE", "MEDIUM");
  set_ok({}, "MODE", "FULL");
  set_ok({"SET WIDTH 1280"}, "MODE", "DECA");
  t.push_back({{"SET WIDTH 1280", "SET MODE DECA"}, "GET TAPS", "OK 10", ""});
  t.push_back({{"SET MODE FULL"}, "GET TAPS", "OK 8", ""});
  set_bad({}, "MODE", "DECA");  // 1024 is not a multiple of 10
  set_bad({}, "MODE", "WIDE");
  set_ok({}, "MODE", "medium", "MEDIUM");  // names are case-insensitive, echoed upper
  for (const char* v : {"1", "40000000", "85000000"}) set_ok({}, "CLOCK_HZ", v);
  for (const char* v : {"0", "85000001", "fast"}) set_bad({}, "CLOCK_HZ", v);
  for (const char* v : {"GRADIENT", "CHECKER", "COUNTER", "RANDOM:42"}) set_ok({}, "PATTERN", v);
  set_ok({}, "PATTERN", "RANDOM", "RANDOM:0");
  for (const char* v : {"NOISE", "RANDOM:", "RANDOM:x", "gradient"}) set_bad({}, "PATTERN", v);
  for (const char* p : {"LINE_GAP", "FRAME_GAP"}) {
    for (const char* v : {"1", "65535"}) set_ok({}, p, v);
    for (const char* v : {"0", "65536"}) set_bad({}, p, v);
  }
  // START/STOP interlock.
  for (const char* p : {"WIDTH", "HEIGHT", "DEPTH", "TAPS", "MODE", "CLOCK_HZ"}) {
    const std::string v = std::string(p) == "MODE" ? "BASE" : std::string(p) == "DEPTH" ? "8" : "1";
    t.push_back({{"START"}, std::string("SET ") + p + " " + v, "ERR 4 not allowed while running", ""});
    t.push_back({{"START", "STOP"}, std::string("SET ") + p + " " + v, "OK", ""});
  }
  t.push_back({{"START"}, "SET WIDTH 0", "ERR 4 not allowed while running", ""});
  t.push_back({{"START"}, "GET WIDTH", "OK 1024", ""});
  set_ok({"START"}, "PATTERN", "CHECKER");
  set_ok({"START"}, "LINE_GAP", "7");
  set_ok({"START"}, "FRAME_GAP", "9");
  t.push_back({{}, "START", "OK", ""});
  t.push_back({{"START"}, "START", "OK", ""});
  t.push_back({{}, "STOP", "OK", ""});
  t.push_back({{}, "ID", "OK CLGRAB-SIM 1.0", ""});
  t.push_back({{"START"}, "ID", "OK CLGRAB-SIM 1.0", ""});
  // Unknown parameters and malformed commands.
  t.push_back({{}, "GET BOGUS", "ERR 1 unknown parameter", ""});
  t.push_back({{}, "SET BOGUS 1", "ERR 1 unknown parameter", ""});
  t.push_back({{}, "GET width", "ERR 1 unknown parameter", ""});
  for (const char* c : {"FROB", "GET", "SET WIDTH", "ID 1", "START NOW", "get WIDTH", "GET WIDTH X"}) {
    t.push_back({{}, c, "ERR 3 bad command", ""});
  }
  return t;
}

Verdict control_conformance() {
  using namespace clgrab::control;
  const TransportOptions fast{9600, std::chrono::milliseconds(50), false};
  int rows = 0, passed = 0;
  std::string first_failure;
  for (const Row& row : protocol_table()) {
    ++rows;
    Camera cam;
    SimulatedUart uart(cam);
    bool ok = true;
    for (const auto& s : row.setup) ok = ok && send_command(uart, s + "\r", fast) == "OK\r";
    ok = ok && send_command(uart, row.command + "\r", fast) == row.reply + "\r";
    if (!row.echo.empty()) {
      const std::string name = row.command.substr(4, row.command.find(' ', 4) - 4);
      ok = ok && send_command(uart, "GET " + name + "\r", fast) == row.echo + "\r";
    }
    passed += ok;
    if (!ok && first_failure.empty()) first_failure = row.command;
  }

  // Library layer: client-side range checks never reach the wire, and
  // every writable parameter echoes what was set.
  struct Counting final : CommandChannel {
    explicit Counting(CommandChannel& in) : inner(in) {}
    std::string transact(std::string_view l) override {
      ++count;
      return inner.transact(l);
    }
    CommandChannel& inner;
    int count = 0;
  };
  Camera cam;
  SimulatedUart uart(cam);
  UartChannel wire(uart, fast);
  Counting counting(wire);
  ReferenceCamera lib(counting);
  int lib_checks = 0, lib_passed = 0;
  const std::pair<const char*, ParamValue> out_of_range[] = {
      {"WIDTH", std::int64_t{0}},       {"WIDTH", std::int64_t{16385}}, {"HEIGHT", std::int64_t{0}},
      {"DEPTH", std::int64_t{9}},       {"TAPS", std::int64_t{11}},     {"MODE", std::string("WIDE")},
      {"CLOCK_HZ", std::int64_t{85'000'001}}, {"PATTERN", std::string("NOISE")},
      {"LINE_GAP", std::int64_t{0}},    {"FRAME_GAP", std::int64_t{65536}}};
  for (const auto& [name, value] : out_of_range) {
    ++lib_checks;
    const int before = counting.count;
    try {
      lib.set_param(name, value);
    } catch (const Error& e) {
      lib_passed += e.code() == ErrorCode::kOutOfRange && counting.count == before;
    }
  }
  const std::pair<const char*, ParamValue> writable[] = {
      {"WIDTH", std::int64_t{1280}},   {"HEIGHT", std::int64_t{1024}},  {"DEPTH", std::int64_t{12}},
      {"DEPTH", std::int64_t{8}},      {"TAPS", std::int64_t{2}},        {"MODE", std::string("DECA")},
      {"CLOCK_HZ", std::int64_t{66'000'000}}, {"PATTERN", std::string("RANDOM:5")},
      {"LINE_GAP", std::int64_t{12}},  {"FRAME_GAP", std::int64_t{300}}};
  for (const auto& [name, value] : writable) {
    ++lib_checks;
    try {
      lib.set_param(name, value);
      lib_passed += lib.get_param(name) == value;
    } catch (const Error&) {
    }
  }
  ++lib_checks;
  try {
    lib.start();
    lib.set_param("WIDTH", std::int64_t{640});
  } catch (const RemoteError& e) {
    lib_passed += e.remote_code() == 4;
  }

  const bool ok = passed == rows && lib_passed == lib_checks;
  return {ok, std::to_string(passed) + "/" + std::to_string(rows) + " wire rows, " +
                  std::to_string(lib_passed) + "/" + std::to_string(lib_checks) + " library checks" +
                  (first_failure.empty() ? "" : "; first failure: " + first_failure)};
}

// --------------------------------------------------------------- bench

Verdict desk_performance() {
  clgrab_config* cfg = nullptr;
  clgrab_config_create(&cfg);
  clgrab_config_set(cfg, "mode", "DECA");
  clgrab_config_set(cfg, "taps", "10");
  clgrab_config_set(cfg, "depth", "8");
  clgrab_config_set(cfg, "width", "1280");
  clgrab_config_set(cfg, "height", "1024");
  clgrab_config_set(cfg, "bench_seconds", "3");
  clgrab_bench_report r{};
  const auto t0 = Clock::now();
  const clgrab_status rc = clgrab_bench(cfg, 1, &r);
  const double wall = seconds_since(t0);
  char text[4096] = {};
  clgrab_bench_format(&r, 0, text, sizeof text, nullptr);
  clgrab_config_destroy(cfg);
  const std::string report(text);
  const bool printed = report.find("measured pipeline") != std::string::npos &&
                       report.find("hardware line rate : 850 MB/s") != std::string::npos;
  const bool ok = rc == CLGRAB_OK && r.measured_bytes_per_s >= kBenchFloorBytesPerSecond &&
                  r.seconds >= 3.0 && wall <= kBenchBudgetSeconds &&
                  r.line_rate_bytes_per_s == kLineRateBytes && printed &&
                  r.stats.frames_dropped == 0;
  return {ok, "measured " + fmt("%.1f", r.measured_bytes_per_s / 1e6) + " MB/s (floor " +
                  fmt("%.0f", kBenchFloorBytesPerSecond / 1e6) + ") vs 850 MB/s hardware line rate, " +
                  std::to_string(r.frames) + " frames over " + fmt("%.2f", r.seconds) + " s, " +
                  fmt("%.1f", wall) + " s wall (limit " + fmt("%.0f", kBenchBudgetSeconds) + " s)"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"codec-round-trip", codec_round_trip},
      {"throughput-arithmetic", throughput_arithmetic},
      {"end-to-end-grab", end_to_end_grab},
      {"vfifo-safety", vfifo_safety},
      {"resolution-detection", resolution_detection},
      {"dma-reassembly", dma_reassembly},
      {"control-conformance", control_conformance},
      {"desk-performance", desk_performance},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-22s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
