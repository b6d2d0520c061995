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

// clgrab: console front end for the frame grabber library.
//
//   clgrab grab  [--config FILE] [--<setting> VALUE ...]
//   clgrab bench [--config FILE] [--<setting> VALUE ...]
//   clgrab ctl   [--state FILE] COMMAND WORDS...
//   clgrab info  [--config FILE] [--<setting> VALUE ...]
//
// Exit codes: 0 success, 1 pipeline error, 2 configuration error,
// 3 control error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clgrab/clgrab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitConfig = 2;
constexpr int kExitControl = 3;

struct ConfigDeleter {
  void operator()(clgrab_config* c) const { clgrab_config_destroy(c); }
};
struct CameraDeleter {
  void operator()(clgrab_camera* c) const { clgrab_camera_destroy(c); }
};
struct TransportDeleter {
  void operator()(clgrab_transport* t) const { clgrab_transport_close(t); }
};
using ConfigPtr = std::unique_ptr<clgrab_config, ConfigDeleter>;
using CameraPtr = std::unique_ptr<clgrab_camera, CameraDeleter>;
using TransportPtr = std::unique_ptr<clgrab_transport, TransportDeleter>;

// Reads a string result through the size-query protocol of the C API.
template <typename F>
clgrab_status read_string(F&& call, std::string& out) {
  std::vector<char> buf(256);
  size_t needed = 0;
  clgrab_status s = call(buf.data(), buf.size(), &needed);
  if (s == CLGRAB_E_BUFFER_TOO_SMALL) {
    buf.resize(needed + 1);
    s = call(buf.data(), buf.size(), &needed);
  }
  if (s == CLGRAB_OK) out.assign(buf.data());
  return s;
}

std::string error_text(clgrab_status s) {
  std::string msg = clgrab_last_error();
  return msg.empty() ? clgrab_status_string(s) : msg;
}

std::vector<std::string> setting_keys() {
  ConfigPtr cfg;
  clgrab_config* raw = nullptr;
  if (clgrab_config_create(&raw) != CLGRAB_OK) return {};
  cfg.reset(raw);
  std::string dump;
  read_string([&](char* b, size_t n, size_t* need) { return clgrab_config_dump(cfg.get(), b, n, need); },
              dump);
  std::vector<std::string> keys;
  std::size_t pos = 0;
  while (pos < dump.size()) {
    const auto eq = dump.find('=', pos);
    const auto nl = dump.find('\n', pos);
    if (eq == std::string::npos) break;
    keys.push_back(dump.substr(pos, eq - pos));
    pos = nl == std::string::npos ? dump.size() : nl + 1;
  }
  return keys;
}

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

// Settings shared by grab, bench and info: a config file plus one flag per
// configuration key. Flags override the file.
struct SettingOptions {
  std::string config_file;
  std::map<std::string, std::string> flags;

  void attach(CLI::App& cmd, const std::vector<std::string>& keys) {
    cmd.add_option("-c,--config", config_file, "key=value configuration file")
        ->check(CLI::ExistingFile);
    for (const auto& key : keys) {
      cmd.add_option(flag_name(key), flags[key], "configuration key '" + key + "'");
    }
  }

  // Returns an exit code, or -1 on success.
  int apply(clgrab_config* cfg, const CLI::App& cmd) const {
    if (!config_file.empty()) {
      const clgrab_status s = clgrab_config_load_file(cfg, config_file.c_str());
      if (s != CLGRAB_OK) {
        std::cerr << "clgrab: " << error_text(s) << '\n';
        return kExitConfig;
      }
    }
    for (const auto& [key, value] : flags) {
      if (cmd.count(flag_name(key)) == 0) continue;
      const clgrab_status s = clgrab_config_set(cfg, key.c_str(), value.c_str());
      if (s != CLGRAB_OK) {
        std::cerr << "clgrab: " << error_text(s) << '\n';
        return kExitConfig;
      }
    }
    const clgrab_status s = clgrab_config_validate(cfg);
    if (s != CLGRAB_OK) {
      std::cerr << "clgrab: " << error_text(s) << '\n';
      return kExitConfig;
    }
    return -1;
  }
};

bool key_value_report(clgrab_config* cfg) {
  std::string report;
  read_string([&](char* b, size_t n, size_t* need) { return clgrab_config_get(cfg, "report", b, n, need); },
              report);
  return report == "kv";
}

ConfigPtr new_config() {
  clgrab_config* raw = nullptr;
  if (clgrab_config_create(&raw) != CLGRAB_OK) return nullptr;
  return ConfigPtr(raw);
}

int run_grab(const SettingOptions& opts, const CLI::App& cmd) {
  ConfigPtr cfg = new_config();
  if (!cfg) return kExitPipeline;
  if (int rc = opts.apply(cfg.get(), cmd); rc >= 0) return rc;

  clgrab_stats stats{};
  const clgrab_status s = clgrab_grab(cfg.get(), &stats);
  const bool kv = key_value_report(cfg.get());
  std::string report;
  read_string([&](char* b, size_t n, size_t* need) { return clgrab_stats_format(&stats, kv, b, n, need); },
              report);
  std::cout << report;
  if (s == CLGRAB_E_BAD_CONFIG) {
    std::cerr << "clgrab: " << error_text(s) << '\n';
    return kExitConfig;
  }
  if (s != CLGRAB_OK) {
    std::cerr << "clgrab: " << error_text(s) << '\n';
    return kExitPipeline;
  }
  if (stats.frames_dropped != 0) {
    std::cerr << "clgrab: " << stats.frames_dropped << " frame(s) dropped\n";
    return kExitPipeline;
  }
  return kExitOk;
}

int run_bench(const SettingOptions& opts, const CLI::App& cmd, bool arithmetic_only) {
  ConfigPtr cfg = new_config();
  if (!cfg) return kExitPipeline;
  // Benchmark defaults: the widest link at full rate.
  clgrab_config_set(cfg.get(), "mode", "DECA");
  clgrab_config_set(cfg.get(), "taps", "10");
  clgrab_config_set(cfg.get(), "depth", "8");
  clgrab_config_set(cfg.get(), "width", "1280");
  clgrab_config_set(cfg.get(), "height", "1024");
  if (int rc = opts.apply(cfg.get(), cmd); rc >= 0) return rc;

  clgrab_bench_report report{};
  const clgrab_status s = clgrab_bench(cfg.get(), arithmetic_only ? 0 : 1, &report);
  if (s != CLGRAB_OK) {
    std::cerr << "clgrab: " << error_text(s) << '\n';
    return s == CLGRAB_E_BAD_CONFIG ? kExitConfig : kExitPipeline;
  }
  std::string text;
  read_string([&](char* b, size_t n, size_t* need) {
    return clgrab_bench_format(&report, key_value_report(cfg.get()), b, n, need);
  }, text);
  std::cout << text;
  return kExitOk;
}

int run_info(const SettingOptions& opts, const CLI::App& cmd) {
  ConfigPtr cfg = new_config();
  if (!cfg) return kExitPipeline;
  if (int rc = opts.apply(cfg.get(), cmd); rc >= 0) return rc;
  std::cout << "clgrab " << clgrab_version() << '\n'
            << "supported link configurations:\n"
            << "  BASE   1, 2 or 3 taps x 8 bits; 1 tap x 10, 12 or 16 bits\n"
            << "  MEDIUM 4 taps x 8 bits\n"
            << "  FULL   8 taps x 8 bits\n"
            << "  DECA   10 taps x 8 bits (80 data bits per clock)\n"
            << "  pixel clock up to 85000000 Hz\n";
  clgrab_bench_report report{};
  if (clgrab_bench(cfg.get(), 0, &report) == CLGRAB_OK) {
    std::string text;
    read_string([&](char* b, size_t n, size_t* need) {
      return clgrab_bench_format(&report, key_value_report(cfg.get()), b, n, need);
    }, text);
    std::cout << "current configuration throughput:\n" << text;
  }
  std::string dump;
  read_string([&](char* b, size_t n, size_t* need) { return clgrab_config_dump(cfg.get(), b, n, need); },
              dump);
  std::cout << "settings:\n" << dump;
  return kExitOk;
}

struct CtlOptions {
  std::string state_file;
  unsigned baud = 9600;
  unsigned timeout_ms = 500;
  bool disconnected = false;
  std::vector<std::string> words;
};

int run_ctl(const CtlOptions& opts) {
  clgrab_camera* raw_cam = nullptr;
  if (clgrab_camera_create(&raw_cam) != CLGRAB_OK) return kExitControl;
  CameraPtr camera(raw_cam);
  if (!opts.state_file.empty() && std::filesystem::exists(opts.state_file)) {
    const clgrab_status s = clgrab_camera_load_state(camera.get(), opts.state_file.c_str());
    if (s != CLGRAB_OK) {
      std::cerr << "clgrab: " << error_text(s) << '\n';
      return kExitConfig;
    }
  }
  clgrab_transport* raw_t = nullptr;
  const clgrab_status open =
      opts.disconnected ? clgrab_transport_open_disconnected(opts.timeout_ms, &raw_t)
                        : clgrab_transport_open_sim(camera.get(), opts.baud, opts.timeout_ms, &raw_t);
  if (open != CLGRAB_OK) {
    std::cerr << "clgrab: " << error_text(open) << '\n';
    return kExitControl;
  }
  TransportPtr transport(raw_t);

  std::string command;
  for (std::size_t i = 0; i < opts.words.size(); ++i) command += (i ? " " : "") + opts.words[i];
  std::string value;
  const clgrab_status s = read_string(
      [&](char* b, size_t n, size_t* need) { return clgrab_ctl(transport.get(), command.c_str(), b, n, need); },
      value);
  if (s != CLGRAB_OK) {
    std::cout << "error: " << error_text(s) << '\n';
    return kExitControl;
  }
  std::cout << (value.empty() ? "OK" : value) << '\n';
  if (!opts.state_file.empty()) {
    const clgrab_status w = clgrab_camera_save_state(camera.get(), opts.state_file.c_str());
    if (w != CLGRAB_OK) {
      std::cerr << "clgrab: " << error_text(w) << '\n';
      return kExitControl;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera Link frame grabber simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(clgrab_version()));

  const auto keys = setting_keys();

  SettingOptions grab_opts;
  auto* grab = app.add_subcommand("grab", "acquire frames through the full pipeline into TIFF files");
  grab_opts.attach(*grab, keys);

  SettingOptions bench_opts;
  bool arithmetic_only = false;
  auto* bench = app.add_subcommand("bench", "throughput arithmetic and measured pipeline rate");
  bench_opts.attach(*bench, keys);
  bench->add_flag("--no-measure", arithmetic_only, "only print the theoretical figures");

  SettingOptions info_opts;
  auto* info = app.add_subcommand("info", "library version, supported modes and settings");
  info_opts.attach(*info, keys);

  CtlOptions ctl_opts;
  auto* ctl = app.add_subcommand("ctl", "send one control command to the camera");
  ctl->add_option("--state", ctl_opts.state_file,
                  "camera state file, loaded before and saved after the command");
  ctl->add_option("--baud", ctl_opts.baud, "serial rate in characters per second (0: unpaced)");
  ctl->add_option("--timeout-ms", ctl_opts.timeout_ms, "response timeout");
  ctl->add_flag("--disconnected", ctl_opts.disconnected, "use a serial line with no camera");
  ctl->add_option("command", ctl_opts.words, "command words, e.g. GET WIDTH")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*grab) return run_grab(grab_opts, *grab);
  if (*bench) return run_bench(bench_opts, *bench, arithmetic_only);
  if (*info) return run_info(info_opts, *info);
  return run_ctl(ctl_opts);
}
