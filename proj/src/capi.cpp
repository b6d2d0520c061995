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

#include "clgrab/clgrab.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "clgrab/camera_sim.hpp"
#include "clgrab/control.hpp"
#include "clgrab/error.hpp"
#include "clgrab/link_codec.hpp"
#include "clgrab/pipeline.hpp"
#include "clgrab/run_config.hpp"
#include "clgrab/tiff.hpp"

struct clgrab_config {
  clgrab::RunConfig value;
};

struct clgrab_camera {
  clgrab::Camera camera;
};

struct clgrab_transport {
  std::unique_ptr<clgrab::control::Transport> line;
  std::unique_ptr<clgrab::control::UartChannel> channel;
  std::unique_ptr<clgrab::control::CameraLibrary> library;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_remote_code = 0;

clgrab_status to_status(clgrab::ErrorCode code) {
  using clgrab::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return CLGRAB_E_INVALID_ARGUMENT;
    case ErrorCode::kBadConfig: return CLGRAB_E_BAD_CONFIG;
    case ErrorCode::kNoAlignment: return CLGRAB_E_NO_ALIGNMENT;
    case ErrorCode::kTruncatedWord: return CLGRAB_E_TRUNCATED_WORD;
    case ErrorCode::kLengthMismatch: return CLGRAB_E_LENGTH_MISMATCH;
    case ErrorCode::kDepthOverflow: return CLGRAB_E_DEPTH_OVERFLOW;
    case ErrorCode::kGeometryMismatch: return CLGRAB_E_GEOMETRY_MISMATCH;
    case ErrorCode::kRaggedLines: return CLGRAB_E_RAGGED_LINES;
    case ErrorCode::kEmptyFrame: return CLGRAB_E_EMPTY_FRAME;
    case ErrorCode::kUnderflow: return CLGRAB_E_UNDERFLOW;
    case ErrorCode::kCorruptInfo: return CLGRAB_E_CORRUPT_INFO;
    case ErrorCode::kBadGeometry: return CLGRAB_E_BAD_GEOMETRY;
    case ErrorCode::kMismatch: return CLGRAB_E_MISMATCH;
    case ErrorCode::kTimeout: return CLGRAB_E_TIMEOUT;
    case ErrorCode::kLineTooLong: return CLGRAB_E_LINE_TOO_LONG;
    case ErrorCode::kUnknownParam: return CLGRAB_E_UNKNOWN_PARAM;
    case ErrorCode::kOutOfRange: return CLGRAB_E_OUT_OF_RANGE;
    case ErrorCode::kRemoteError: return CLGRAB_E_REMOTE;
    case ErrorCode::kIo: return CLGRAB_E_IO;
    case ErrorCode::kPipeline: return CLGRAB_E_PIPELINE;
  }
  return CLGRAB_E_INTERNAL;
}

clgrab_status fail(clgrab_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
clgrab_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const clgrab::RemoteError& e) {
    g_last_remote_code = e.remote_code();
    return fail(CLGRAB_E_REMOTE, e.what());
  } catch (const clgrab::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CLGRAB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CLGRAB_E_INTERNAL, e.what());
  } catch (...) {
    return fail(CLGRAB_E_INTERNAL, "unknown failure");
  }
}

clgrab_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size();
  if (!buf || len <= s.size()) {
    return fail(CLGRAB_E_BUFFER_TOO_SMALL,
                "output needs " + std::to_string(s.size() + 1) + " bytes");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return CLGRAB_OK;
}

clgrab_stats to_c(const clgrab::AcqStats& s) {
  clgrab_stats out{};
  out.frames_captured = s.frames_captured;
  out.frames_dropped = s.frames_dropped;
  out.bytes_written = s.bytes_written;
  out.high_watermark_bytes = s.high_watermark_bytes;
  return out;
}

clgrab::AcqStats from_c(const clgrab_stats& s) {
  return clgrab::AcqStats{s.frames_captured, s.frames_dropped, s.bytes_written,
                          s.high_watermark_bytes};
}

clgrab::ReportFormat format_of(int key_value) {
  return key_value ? clgrab::ReportFormat::kKeyValue : clgrab::ReportFormat::kText;
}

clgrab::control::CameraLibrary& library_of(clgrab_transport* t) {
  if (!t->library) {
    t->library = clgrab::control::CameraRegistry::with_builtin().detect(*t->channel);
  }
  return *t->library;
}

std::vector<std::string> split(const char* text) {
  std::istringstream is(text);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  return words;
}

clgrab_status open_transport(std::unique_ptr<clgrab::control::Transport> line, uint32_t baud,
                             uint32_t timeout_ms, clgrab_transport** out) {
  clgrab::control::TransportOptions options;
  options.baud = baud ? baud : 1;
  options.pace = baud != 0;
  options.timeout = std::chrono::milliseconds(timeout_ms);
  auto t = std::make_unique<clgrab_transport>();
  t->line = std::move(line);
  t->channel = std::make_unique<clgrab::control::UartChannel>(*t->line, options);
  *out = t.release();
  return CLGRAB_OK;
}

}  // namespace

extern "C" {

const char* clgrab_version(void) { return "1.0.0"; }

const char* clgrab_status_string(clgrab_status status) {
  switch (status) {
    case CLGRAB_OK: return "ok";
    case CLGRAB_E_INVALID_ARGUMENT: return "invalid argument";
    case CLGRAB_E_BAD_CONFIG: return "bad configuration";
    case CLGRAB_E_NO_ALIGNMENT: return "no alignment";
    case CLGRAB_E_TRUNCATED_WORD: return "truncated word";
    case CLGRAB_E_LENGTH_MISMATCH: return "length mismatch";
    case CLGRAB_E_DEPTH_OVERFLOW: return "depth overflow";
    case CLGRAB_E_GEOMETRY_MISMATCH: return "geometry mismatch";
    case CLGRAB_E_RAGGED_LINES: return "ragged lines";
    case CLGRAB_E_EMPTY_FRAME: return "empty frame";
    case CLGRAB_E_UNDERFLOW: return "underflow";
    case CLGRAB_E_CORRUPT_INFO: return "corrupt frame info";
    case CLGRAB_E_BAD_GEOMETRY: return "bad geometry";
    case CLGRAB_E_MISMATCH: return "mismatch";
    case CLGRAB_E_TIMEOUT: return "timeout";
    case CLGRAB_E_LINE_TOO_LONG: return "line too long";
    case CLGRAB_E_UNKNOWN_PARAM: return "unknown parameter";
    case CLGRAB_E_OUT_OF_RANGE: return "out of range";
    case CLGRAB_E_REMOTE: return "camera error";
    case CLGRAB_E_IO: return "i/o error";
    case CLGRAB_E_PIPELINE: return "pipeline error";
    case CLGRAB_E_BUFFER_TOO_SMALL: return "buffer too small";
    case CLGRAB_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* clgrab_last_error(void) { return g_last_error.c_str(); }

int clgrab_last_remote_code(void) { return g_last_remote_code; }

// ---------------------------------------------------------------- config

clgrab_status clgrab_config_create(clgrab_config** out) {
  if (!out) return fail(CLGRAB_E_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new clgrab_config{};
    return CLGRAB_OK;
  });
}

void clgrab_config_destroy(clgrab_config* config) { delete config; }

clgrab_status clgrab_config_set(clgrab_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    clgrab::apply_setting(config->value, key, value);
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_config_get(const clgrab_config* config, const char* key, char* buf,
                                size_t len, size_t* needed) {
  if (!config || !key) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { return copy_out(clgrab::get_setting(config->value, key), buf, len, needed); });
}

clgrab_status clgrab_config_load_file(clgrab_config* config, const char* path) {
  if (!config || !path) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    clgrab::RunConfig next = config->value;
    clgrab::apply_config_file(next, path);
    config->value = std::move(next);
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_config_dump(const clgrab_config* config, char* buf, size_t len,
                                 size_t* needed) {
  if (!config) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { return copy_out(clgrab::format_config(config->value), buf, len, needed); });
}

clgrab_status clgrab_config_validate(const clgrab_config* config) {
  if (!config) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    clgrab::validate(config->value);
    return CLGRAB_OK;
  });
}

// ----------------------------------------------------------- acquisition

clgrab_status clgrab_grab(const clgrab_config* config, clgrab_stats* stats) {
  if (!config || !stats) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  *stats = clgrab_stats{};
  return guarded([&] {
    const clgrab::GrabResult r = clgrab::run_grab(config->value);
    *stats = to_c(r.stats);
    stats->frames_emitted = r.frames_emitted;
    stats->files_written = r.files_written;
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_stats_format(const clgrab_stats* stats, int key_value, char* buf, size_t len,
                                  size_t* needed) {
  if (!stats) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::string s = clgrab::format_stats(from_c(*stats), format_of(key_value));
    if (key_value) {
      s += "frames_emitted=" + std::to_string(stats->frames_emitted) + "\n";
      s += "files_written=" + std::to_string(stats->files_written) + "\n";
    } else {
      s += "frames emitted  : " + std::to_string(stats->frames_emitted) + "\n";
      s += "files written   : " + std::to_string(stats->files_written) + "\n";
    }
    return copy_out(s, buf, len, needed);
  });
}

clgrab_status clgrab_bench(const clgrab_config* config, int measure, clgrab_bench_report* report) {
  if (!config || !report) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const clgrab::BenchReport r =
        measure ? clgrab::run_bench(config->value) : clgrab::bench_arithmetic(config->value);
    *report = clgrab_bench_report{};
    report->raw_bits_per_s = r.raw_bits_per_s;
    report->line_rate_bytes_per_s = r.line_rate_bytes_per_s;
    report->memory_bits_per_s = r.memory_bits_per_s;
    report->headroom_num = r.headroom.num;
    report->headroom_den = r.headroom.den;
    report->cameras = r.cameras;
    report->seconds = r.seconds;
    report->frames = r.frames;
    report->bytes = r.bytes;
    report->measured_bytes_per_s = r.measured_bytes_per_s;
    report->stats = to_c(r.stats);
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_bench_format(const clgrab_bench_report* report, int key_value, char* buf,
                                  size_t len, size_t* needed) {
  if (!report) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    clgrab::BenchReport r;
    r.raw_bits_per_s = report->raw_bits_per_s;
    r.line_rate_bytes_per_s = report->line_rate_bytes_per_s;
    r.memory_bits_per_s = report->memory_bits_per_s;
    r.headroom = clgrab::Ratio{report->headroom_num, report->headroom_den ? report->headroom_den : 1};
    r.cameras = report->cameras;
    r.seconds = report->seconds;
    r.frames = report->frames;
    r.bytes = report->bytes;
    r.measured_bytes_per_s = report->measured_bytes_per_s;
    r.stats = from_c(report->stats);
    return copy_out(clgrab::format_bench(r, format_of(key_value)), buf, len, needed);
  });
}

// ------------------------------------------------------------ link level

uint32_t clgrab_pack_word(uint8_t a, uint8_t b, uint8_t c, int lval, int fval, int dval,
                          int spare) {
  return clgrab::link::pack_word(
             clgrab::link::WordFields{a, b, c, lval != 0, fval != 0, dval != 0, spare != 0})
      .bits;
}

clgrab_status clgrab_raw_throughput(clgrab_mode mode, unsigned taps, unsigned bits_per_pixel,
                                    uint64_t pixel_clock_hz, uint64_t* bits_per_s) {
  if (!bits_per_s) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  if (mode < CLGRAB_MODE_BASE || mode > CLGRAB_MODE_DECA) {
    return fail(CLGRAB_E_INVALID_ARGUMENT, "unknown mode");
  }
  return guarded([&] {
    *bits_per_s = clgrab::raw_throughput(
        clgrab::CLConfig{static_cast<clgrab::Mode>(mode), taps, bits_per_pixel, pixel_clock_hz});
    return CLGRAB_OK;
  });
}

uint64_t clgrab_memory_bandwidth(unsigned bus_bits, uint64_t clock_hz, int ddr) {
  return clgrab::memory_bandwidth(bus_bits, clock_hz, ddr != 0);
}

clgrab_status clgrab_tiff_header(uint32_t width, uint32_t height, unsigned bits_per_pixel,
                                 uint8_t out[256]) {
  if (!out) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto h = clgrab::tiff::build_tiff_header(width, height, bits_per_pixel);
    std::memcpy(out, h.data(), h.size());
    return CLGRAB_OK;
  });
}

// --------------------------------------------------------------- control

clgrab_status clgrab_camera_create(clgrab_camera** out) {
  if (!out) return fail(CLGRAB_E_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new clgrab_camera{};
    return CLGRAB_OK;
  });
}

void clgrab_camera_destroy(clgrab_camera* camera) { delete camera; }

clgrab_status clgrab_camera_load_state(clgrab_camera* camera, const char* path) {
  if (!camera || !path) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) return fail(CLGRAB_E_IO, std::string("cannot read camera state ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    camera->camera = clgrab::Camera(clgrab::parse_state(ss.str()));
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_camera_save_state(const clgrab_camera* camera, const char* path) {
  if (!camera || !path) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::trunc);
    out << clgrab::format_state(camera->camera.state());
    if (!out) return fail(CLGRAB_E_IO, std::string("cannot write camera state ") + path);
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_transport_open_sim(clgrab_camera* camera, uint32_t baud, uint32_t timeout_ms,
                                        clgrab_transport** out) {
  if (!camera || !out) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    return open_transport(std::make_unique<clgrab::control::SimulatedUart>(camera->camera), baud,
                          timeout_ms, out);
  });
}

clgrab_status clgrab_transport_open_disconnected(uint32_t timeout_ms, clgrab_transport** out) {
  if (!out) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    return open_transport(std::make_unique<clgrab::control::DisconnectedUart>(true), 0,
                          timeout_ms, out);
  });
}

void clgrab_transport_close(clgrab_transport* transport) { delete transport; }

clgrab_status clgrab_send_command(clgrab_transport* transport, const char* line, char* buf,
                                  size_t len, size_t* needed) {
  if (!transport || !line) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { return copy_out(transport->channel->transact(line), buf, len, needed); });
}

clgrab_status clgrab_get_param(clgrab_transport* transport, const char* name, char* buf,
                               size_t len, size_t* needed) {
  if (!transport || !name) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    return copy_out(clgrab::control::to_string(library_of(transport).get_param(name)), buf, len,
                    needed);
  });
}

clgrab_status clgrab_set_param(clgrab_transport* transport, const char* name, const char* value) {
  if (!transport || !name || !value) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    auto& lib = library_of(transport);
    const auto* param = lib.find_param(name);
    if (!param) return fail(CLGRAB_E_UNKNOWN_PARAM, std::string("unknown parameter ") + name);
    clgrab::control::ParamValue v;
    try {
      v = clgrab::control::parse_value(*param, value);
    } catch (const clgrab::Error&) {
      return fail(CLGRAB_E_OUT_OF_RANGE, std::string(value) + " is not a valid " + name);
    }
    lib.set_param(name, v);
    return CLGRAB_OK;
  });
}

clgrab_status clgrab_ctl(clgrab_transport* transport, const char* command, char* buf, size_t len,
                         size_t* needed) {
  if (!transport || !command) return fail(CLGRAB_E_INVALID_ARGUMENT, "NULL argument");
  const auto words = split(command);
  if (words.size() == 2 && words[0] == "GET") {
    return clgrab_get_param(transport, words[1].c_str(), buf, len, needed);
  }
  if (words.size() == 3 && words[0] == "SET") {
    const clgrab_status s = clgrab_set_param(transport, words[1].c_str(), words[2].c_str());
    if (s != CLGRAB_OK) return s;
    return copy_out("", buf, len, needed);
  }
  return guarded([&] {
    auto& lib = library_of(transport);
    if (words.size() == 1 && words[0] == "ID") return copy_out(lib.identify(), buf, len, needed);
    if (words.size() == 1 && words[0] == "START") {
      lib.start();
      return copy_out("", buf, len, needed);
    }
    if (words.size() == 1 && words[0] == "STOP") {
      lib.stop();
      return copy_out("", buf, len, needed);
    }
    // Anything else goes to the camera verbatim.
    std::string line;
    for (std::size_t i = 0; i < words.size(); ++i) line += (i ? " " : "") + words[i];
    const auto r = clgrab::control::parse_response(transport->channel->transact(line + "\r"));
    if (!r.ok) throw clgrab::RemoteError(r.error_code, r.error_message);
    return copy_out(r.value, buf, len, needed);
  });
}

}  // extern "C"
