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

#include "clgrab/run_config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "clgrab/error.hpp"

namespace clgrab {
namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kBadConfig,
              "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) bad(key, value);
  return v;
}

template <typename T>
T to_uint(std::string_view key, std::string_view value) {
  const std::uint64_t v = to_u64(key, value);
  if (v > std::numeric_limits<T>::max()) bad(key, value);
  return static_cast<T>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  bad(key, value);
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) bad(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad(key, value);
  }
}

std::vector<std::size_t> to_size_list(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    out.push_back(to_uint<std::size_t>(key, value.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

const std::vector<std::string> kKeys = {
    "mode",         "taps",         "depth",      "clock_hz",       "width",
    "height",       "pattern",      "line_gap",   "frame_gap",      "frames",
    "vfifo_capacity", "vfifo_page", "fit_window", "fit_seed_bytes", "output_dir",
    "sg_buffers",   "sg_chunk",     "skew_x",     "skew_y",         "skew_z",
    "report",       "random_geometry", "seed",    "max_width",      "max_height",
    "user_meta",    "block_clocks", "write_files", "bench_seconds", "cameras",
    "mem_bus_bits", "mem_clock_hz", "mem_ddr"};

}  // namespace

std::vector<std::string> config_keys() { return kKeys; }

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  auto& cam = c.camera;
  if (key == "mode") {
    auto m = parse_mode(value);
    if (!m) bad(key, value);
    cam.mode = *m;
  } else if (key == "taps") {
    cam.taps = to_uint<unsigned>(key, value);
  } else if (key == "depth") {
    cam.bits_per_pixel = to_uint<unsigned>(key, value);
  } else if (key == "clock_hz") {
    cam.pixel_clock_hz = to_u64(key, value);
  } else if (key == "width") {
    cam.width = to_uint<std::uint32_t>(key, value);
  } else if (key == "height") {
    cam.height = to_uint<std::uint32_t>(key, value);
  } else if (key == "pattern") {
    auto p = parse_pattern(value);
    if (!p) bad(key, value);
    cam.pattern = *p;
  } else if (key == "line_gap") {
    cam.line_gap = to_uint<std::uint32_t>(key, value);
  } else if (key == "frame_gap") {
    cam.frame_gap = to_uint<std::uint32_t>(key, value);
  } else if (key == "frames") {
    c.frames = to_u64(key, value);
  } else if (key == "vfifo_capacity") {
    c.vfifo_capacity = to_uint<std::size_t>(key, value);
  } else if (key == "vfifo_page") {
    c.vfifo_page = to_uint<std::size_t>(key, value);
  } else if (key == "fit_window") {
    c.fit_window = to_uint<unsigned>(key, value);
  } else if (key == "fit_seed_bytes") {
    c.fit_seed_bytes = to_uint<std::size_t>(key, value);
  } else if (key == "output_dir") {
    if (value.empty()) bad(key, value);
    c.output_dir = std::string(value);
  } else if (key == "sg_buffers") {
    c.sg_buffers = to_size_list(key, value);
  } else if (key == "sg_chunk") {
    c.sg_chunk = to_uint<std::size_t>(key, value);
  } else if (key == "skew_x" || key == "skew_y" || key == "skew_z") {
    c.skew[static_cast<std::size_t>(key.back() - 'x')] = to_uint<unsigned>(key, value);
  } else if (key == "report") {
    if (value == "text") c.report = ReportFormat::kText;
    else if (value == "kv" || value == "key=value") c.report = ReportFormat::kKeyValue;
    else bad(key, value);
  } else if (key == "random_geometry") {
    c.random_geometry = to_bool(key, value);
  } else if (key == "seed") {
    c.seed = to_u64(key, value);
  } else if (key == "max_width") {
    c.max_width = to_uint<std::uint32_t>(key, value);
  } else if (key == "max_height") {
    c.max_height = to_uint<std::uint32_t>(key, value);
  } else if (key == "user_meta") {
    c.user_meta = to_u64(key, value);
  } else if (key == "block_clocks") {
    c.block_clocks = to_uint<std::size_t>(key, value);
  } else if (key == "write_files") {
    c.write_files = to_bool(key, value);
  } else if (key == "bench_seconds") {
    c.bench_seconds = to_double(key, value);
  } else if (key == "cameras") {
    c.cameras = to_uint<unsigned>(key, value);
  } else if (key == "mem_bus_bits") {
    c.mem_bus_bits = to_uint<unsigned>(key, value);
  } else if (key == "mem_clock_hz") {
    c.mem_clock_hz = to_u64(key, value);
  } else if (key == "mem_ddr") {
    c.mem_ddr = to_bool(key, value);
  } else {
    throw Error(ErrorCode::kBadConfig, "unknown configuration key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kBadConfig,
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str());
}

std::string get_setting(const RunConfig& c, std::string_view key) {
  const auto& cam = c.camera;
  if (key == "mode") return std::string(mode_name(cam.mode));
  if (key == "taps") return std::to_string(cam.taps);
  if (key == "depth") return std::to_string(cam.bits_per_pixel);
  if (key == "clock_hz") return std::to_string(cam.pixel_clock_hz);
  if (key == "width") return std::to_string(cam.width);
  if (key == "height") return std::to_string(cam.height);
  if (key == "pattern") return to_string(cam.pattern);
  if (key == "line_gap") return std::to_string(cam.line_gap);
  if (key == "frame_gap") return std::to_string(cam.frame_gap);
  if (key == "frames") return std::to_string(c.frames);
  if (key == "vfifo_capacity") return std::to_string(c.vfifo_capacity);
  if (key == "vfifo_page") return std::to_string(c.vfifo_page);
  if (key == "fit_window") return std::to_string(c.fit_window);
  if (key == "fit_seed_bytes") return std::to_string(c.fit_seed_bytes);
  if (key == "output_dir") return c.output_dir;
  if (key == "sg_buffers") {
    std::string s;
    for (std::size_t i = 0; i < c.sg_buffers.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(c.sg_buffers[i]);
    }
    return s;
  }
  if (key == "sg_chunk") return std::to_string(c.sg_chunk);
  if (key == "skew_x") return std::to_string(c.skew[0]);
  if (key == "skew_y") return std::to_string(c.skew[1]);
  if (key == "skew_z") return std::to_string(c.skew[2]);
  if (key == "report") return c.report == ReportFormat::kText ? "text" : "kv";
  if (key == "random_geometry") return c.random_geometry ? "1" : "0";
  if (key == "seed") return std::to_string(c.seed);
  if (key == "max_width") return std::to_string(c.max_width);
  if (key == "max_height") return std::to_string(c.max_height);
  if (key == "user_meta") return std::to_string(c.user_meta);
  if (key == "block_clocks") return std::to_string(c.block_clocks);
  if (key == "write_files") return c.write_files ? "1" : "0";
  if (key == "bench_seconds") {
    std::ostringstream os;
    os << c.bench_seconds;
    return os.str();
  }
  if (key == "cameras") return std::to_string(c.cameras);
  if (key == "mem_bus_bits") return std::to_string(c.mem_bus_bits);
  if (key == "mem_clock_hz") return std::to_string(c.mem_clock_hz);
  if (key == "mem_ddr") return c.mem_ddr ? "1" : "0";
  throw Error(ErrorCode::kBadConfig, "unknown configuration key '" + std::string(key) + "'");
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const auto& key : kKeys) out += key + "=" + get_setting(config, key) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  if (auto p = state_problem(c.camera)) throw Error(ErrorCode::kBadConfig, *p);
  if (c.vfifo_page == 0 || c.vfifo_capacity == 0 || c.vfifo_capacity % c.vfifo_page != 0) {
    throw Error(ErrorCode::kBadConfig,
                "vfifo_capacity must be a non-zero multiple of vfifo_page");
  }
  if (c.fit_window == 0) throw Error(ErrorCode::kBadConfig, "fit_window must be at least 1");
  if (c.sg_chunk == 0) throw Error(ErrorCode::kBadConfig, "sg_chunk must be at least 1");
  if (c.sg_buffers.empty()) throw Error(ErrorCode::kBadConfig, "sg_buffers is empty");
  for (std::size_t b : c.sg_buffers) {
    if (b == 0) throw Error(ErrorCode::kBadConfig, "sg buffer sizes must be at least 1");
  }
  for (unsigned s : c.skew) {
    if (s > 6) throw Error(ErrorCode::kBadConfig, "channel skew must be in 0..6");
  }
  if (c.random_geometry) {
    const std::uint32_t mw = c.max_width ? c.max_width : c.camera.width;
    const std::uint32_t mh = c.max_height ? c.max_height : c.camera.height;
    if (mw < c.camera.taps || mw > kMaxDimension || mh == 0 || mh > kMaxDimension) {
      throw Error(ErrorCode::kBadConfig, "max_width/max_height out of range");
    }
  }
  if (c.block_clocks < 2) throw Error(ErrorCode::kBadConfig, "block_clocks must be at least 2");
  if (!(c.bench_seconds > 0)) throw Error(ErrorCode::kBadConfig, "bench_seconds must be positive");
  if (c.cameras == 0) throw Error(ErrorCode::kBadConfig, "cameras must be at least 1");
  if (c.mem_bus_bits == 0 || c.mem_clock_hz == 0) {
    throw Error(ErrorCode::kBadConfig, "memory bus width and clock must be non-zero");
  }
}

}  // namespace clgrab
