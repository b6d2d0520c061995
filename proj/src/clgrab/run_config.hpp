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

// Run configuration shared by the grab and bench paths. Stored as flat
// key=value lines; later settings override earlier ones.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clgrab/acquisition.hpp"
#include "clgrab/camera_sim.hpp"

namespace clgrab {

enum class ReportFormat { kText, kKeyValue };

struct RunConfig {
  CameraState camera;
  std::uint64_t frames = 10;
  std::size_t vfifo_capacity = kDefaultVFifoCapacity;
  std::size_t vfifo_page = kDefaultPageBytes;
  unsigned fit_window = kDefaultFitWindow;
  std::size_t fit_seed_bytes = 0;  // 0: size of the configured frame
  std::string output_dir = "frames";
  std::vector<std::size_t> sg_buffers = {4u << 20, 4u << 20, 4u << 20, 4u << 20};
  std::size_t sg_chunk = 64u << 10;
  std::array<unsigned, 3> skew = {0, 0, 0};
  ReportFormat report = ReportFormat::kText;
  bool random_geometry = false;
  std::uint64_t seed = 1;
  std::uint32_t max_width = 0;   // 0: camera width
  std::uint32_t max_height = 0;  // 0: camera height
  std::uint64_t user_meta = 0;
  std::size_t block_clocks = 1024;
  bool write_files = true;

  double bench_seconds = 3.0;
  unsigned cameras = 2;
  unsigned mem_bus_bits = 64;
  std::uint64_t mem_clock_hz = 533'000'000;
  bool mem_ddr = true;
};

/// Every recognised key, in the order format_config writes them.
std::vector<std::string> config_keys();

/// Throws BadConfig for unknown keys or malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Applies key=value lines ('#' starts a comment). Throws BadConfig.
void apply_config_text(RunConfig& config, std::string_view text);

/// Throws Io if the file cannot be read, BadConfig for bad content.
void apply_config_file(RunConfig& config, const std::string& path);

std::string get_setting(const RunConfig& config, std::string_view key);
std::string format_config(const RunConfig& config);

/// Throws BadConfig describing the first inconsistency.
void validate(const RunConfig& config);

}  // namespace clgrab
