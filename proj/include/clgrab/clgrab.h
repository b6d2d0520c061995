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

/*
 * clgrab C API.
 *
 * Opaque handles own their resources and are released with the matching
 * destroy/close function. Every fallible call returns a clgrab_status;
 * clgrab_last_error() describes the most recent failure on the calling
 * thread. String outputs use caller buffers: on CLGRAB_E_BUFFER_TOO_SMALL the
 * required size (excluding the terminating NUL) is stored in *needed when
 * needed is non-NULL.
 */
#ifndef CLGRAB_CLGRAB_H_
#define CLGRAB_CLGRAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CLGRAB_API __declspec(dllexport)
#else
#define CLGRAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clgrab_status {
  CLGRAB_OK = 0,
  CLGRAB_E_INVALID_ARGUMENT = 1,
  CLGRAB_E_BAD_CONFIG = 2,
  CLGRAB_E_NO_ALIGNMENT = 3,
  CLGRAB_E_TRUNCATED_WORD = 4,
  CLGRAB_E_LENGTH_MISMATCH = 5,
  CLGRAB_E_DEPTH_OVERFLOW = 6,
  CLGRAB_E_GEOMETRY_MISMATCH = 7,
  CLGRAB_E_RAGGED_LINES = 8,
  CLGRAB_E_EMPTY_FRAME = 9,
  CLGRAB_E_UNDERFLOW = 10,
  CLGRAB_E_CORRUPT_INFO = 11,
  CLGRAB_E_BAD_GEOMETRY = 12,
  CLGRAB_E_MISMATCH = 13,
  CLGRAB_E_TIMEOUT = 14,
  CLGRAB_E_LINE_TOO_LONG = 15,
  CLGRAB_E_UNKNOWN_PARAM = 16,
  CLGRAB_E_OUT_OF_RANGE = 17,
  CLGRAB_E_REMOTE = 18,
  CLGRAB_E_IO = 19,
  CLGRAB_E_PIPELINE = 20,
  CLGRAB_E_BUFFER_TOO_SMALL = 21,
  CLGRAB_E_INTERNAL = 22
} clgrab_status;

typedef enum clgrab_mode {
  CLGRAB_MODE_BASE = 0,
  CLGRAB_MODE_MEDIUM = 1,
  CLGRAB_MODE_FULL = 2,
  CLGRAB_MODE_DECA = 3
} clgrab_mode;

typedef struct clgrab_config clgrab_config;
typedef struct clgrab_camera clgrab_camera;
typedef struct clgrab_transport clgrab_transport;

CLGRAB_API const char* clgrab_version(void);
CLGRAB_API const char* clgrab_status_string(clgrab_status status);
CLGRAB_API const char* clgrab_last_error(void);

/* ---- Run configuration (flat key=value settings) ---------------------- */

CLGRAB_API clgrab_status clgrab_config_create(clgrab_config** out);
CLGRAB_API void clgrab_config_destroy(clgrab_config* config);
CLGRAB_API clgrab_status clgrab_config_set(clgrab_config* config, const char* key,
                                           const char* value);
CLGRAB_API clgrab_status clgrab_config_get(const clgrab_config* config, const char* key,
                                           char* buf, size_t len, size_t* needed);
/* Applies every key=value line of the file on top of the current values. */
CLGRAB_API clgrab_status clgrab_config_load_file(clgrab_config* config, const char* path);
/* All settings as key=value lines. */
CLGRAB_API clgrab_status clgrab_config_dump(const clgrab_config* config, char* buf, size_t len,
                                            size_t* needed);
CLGRAB_API clgrab_status clgrab_config_validate(const clgrab_config* config);

/* ---- Acquisition ------------------------------------------------------ */

typedef struct clgrab_stats {
  uint64_t frames_captured;
  uint64_t frames_dropped;
  uint64_t bytes_written;
  uint64_t high_watermark_bytes;
  uint64_t frames_emitted;
  uint64_t files_written;
} clgrab_stats;

/* Runs the full pipeline, writing frame_NNNNNN.tif files into output_dir.
 * *stats is filled whenever the run got as far as streaming. */
CLGRAB_API clgrab_status clgrab_grab(const clgrab_config* config, clgrab_stats* stats);

/* Text (key_value == 0) or key=value report of the acquisition counters. */
CLGRAB_API clgrab_status clgrab_stats_format(const clgrab_stats* stats, int key_value, char* buf,
                                             size_t len, size_t* needed);

typedef struct clgrab_bench_report {
  uint64_t raw_bits_per_s;
  uint64_t line_rate_bytes_per_s;
  uint64_t memory_bits_per_s;
  uint64_t headroom_num;
  uint64_t headroom_den;
  uint32_t cameras;
  double seconds;
  uint64_t frames;
  uint64_t bytes;
  double measured_bytes_per_s;
  clgrab_stats stats;
} clgrab_bench_report;

/* Throughput arithmetic, plus a timed streaming run when measure != 0. */
CLGRAB_API clgrab_status clgrab_bench(const clgrab_config* config, int measure,
                                      clgrab_bench_report* report);
CLGRAB_API clgrab_status clgrab_bench_format(const clgrab_bench_report* report, int key_value,
                                             char* buf, size_t len, size_t* needed);

/* ---- Link arithmetic and formats -------------------------------------- */

CLGRAB_API uint32_t clgrab_pack_word(uint8_t a, uint8_t b, uint8_t c, int lval, int fval,
                                     int dval, int spare);
CLGRAB_API clgrab_status clgrab_raw_throughput(clgrab_mode mode, unsigned taps,
                                               unsigned bits_per_pixel, uint64_t pixel_clock_hz,
                                               uint64_t* bits_per_s);
CLGRAB_API uint64_t clgrab_memory_bandwidth(unsigned bus_bits, uint64_t clock_hz, int ddr);
/* Writes the fixed 256-byte TIFF header for a frame. */
CLGRAB_API clgrab_status clgrab_tiff_header(uint32_t width, uint32_t height,
                                            unsigned bits_per_pixel, uint8_t out[256]);

/* ---- Camera control --------------------------------------------------- */

/* A simulated camera in its default state. */
CLGRAB_API clgrab_status clgrab_camera_create(clgrab_camera** out);
CLGRAB_API void clgrab_camera_destroy(clgrab_camera* camera);
CLGRAB_API clgrab_status clgrab_camera_load_state(clgrab_camera* camera, const char* path);
CLGRAB_API clgrab_status clgrab_camera_save_state(const clgrab_camera* camera, const char* path);

/* Serial line to a simulated camera; the camera must outlive the transport.
 * baud is in characters per second; 0 disables pacing. */
CLGRAB_API clgrab_status clgrab_transport_open_sim(clgrab_camera* camera, uint32_t baud,
                                                   uint32_t timeout_ms, clgrab_transport** out);
/* Serial line with nothing attached. */
CLGRAB_API clgrab_status clgrab_transport_open_disconnected(uint32_t timeout_ms,
                                                            clgrab_transport** out);
CLGRAB_API void clgrab_transport_close(clgrab_transport* transport);

/* Raw exchange: line must end in CR; the response line is returned verbatim. */
CLGRAB_API clgrab_status clgrab_send_command(clgrab_transport* transport, const char* line,
                                             char* buf, size_t len, size_t* needed);

/* Typed access through the camera library matching the camera's ID. */
CLGRAB_API clgrab_status clgrab_get_param(clgrab_transport* transport, const char* name,
                                          char* buf, size_t len, size_t* needed);
CLGRAB_API clgrab_status clgrab_set_param(clgrab_transport* transport, const char* name,
                                          const char* value);

/* One console command (without CR), e.g. "GET WIDTH", "SET WIDTH 2048",
 * "ID", "START". On success buf holds the response value ("" for a bare
 * OK). Camera-side errors return CLGRAB_E_REMOTE; see
 * clgrab_last_remote_code(). */
CLGRAB_API clgrab_status clgrab_ctl(clgrab_transport* transport, const char* command, char* buf,
                                    size_t len, size_t* needed);

/* Code of the last ERR response seen on this thread, 0 if none. */
CLGRAB_API int clgrab_last_remote_code(void);

#ifdef __cplusplus
}
#endif

#endif /* CLGRAB_CLGRAB_H_ */
