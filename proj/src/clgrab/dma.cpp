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

#include "clgrab/dma.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "clgrab/error.hpp"

namespace clgrab::dma {

std::vector<SgDescriptor> build_sg_list(std::span<const std::size_t> buffer_sizes,
                                        std::size_t chunk) {
  if (chunk == 0) throw Error(ErrorCode::kInvalidArgument, "sg chunk must be at least 1 byte");
  std::vector<SgDescriptor> list;
  for (std::size_t id = 0; id < buffer_sizes.size(); ++id) {
    for (std::size_t off = 0; off < buffer_sizes[id]; off += chunk) {
      list.push_back(SgDescriptor{id, off, std::min(chunk, buffer_sizes[id] - off), false});
    }
  }
  if (!list.empty()) list.back().last = true;
  return list;
}

DmaEngine::DmaEngine(std::span<const std::size_t> buffer_sizes, std::vector<SgDescriptor> list)
    : list_(std::move(list)), written_(list_.size(), 0) {
  buffers_.reserve(buffer_sizes.size());
  for (std::size_t size : buffer_sizes) buffers_.emplace_back(size, 0);
  for (std::size_t i = 0; i < list_.size(); ++i) {
    const auto& d = list_[i];
    if (d.length == 0 || d.buffer_id >= buffers_.size() ||
        d.offset > buffers_[d.buffer_id].size() ||
        d.length > buffers_[d.buffer_id].size() - d.offset) {
      throw Error(ErrorCode::kInvalidArgument,
                  "descriptor " + std::to_string(i) + " does not fit its buffer");
    }
  }
}

std::size_t DmaEngine::remaining() const noexcept {
  if (halted_) return 0;
  std::size_t total = 0;
  for (std::size_t i = current_; i < list_.size(); ++i) total += list_[i].length - written_[i];
  return total;
}

std::optional<Completion> DmaEngine::transfer(std::uint64_t frame_number,
                                              std::span<const std::uint8_t> bytes) {
  const std::span<const std::uint8_t> parts[1] = {bytes};
  return transfer(frame_number, parts);
}

std::optional<Completion> DmaEngine::transfer(
    std::uint64_t frame_number, std::span<const std::span<const std::uint8_t>> parts) {
  if (halted_) return std::nullopt;
  // Skip descriptors a previous frame filled exactly.
  while (current_ < list_.size() && written_[current_] == list_[current_].length) ++current_;

  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();

  Completion c;
  c.frame_number = frame_number;
  c.first_descriptor = current_;
  const std::size_t start_offset = current_ < list_.size() ? written_[current_] : 0;
  std::size_t done = 0;
  std::size_t part = 0;
  std::size_t part_done = 0;
  while (done < total && current_ < list_.size()) {
    while (part_done == parts[part].size()) {
      ++part;
      part_done = 0;
    }
    const SgDescriptor& d = list_[current_];
    const std::size_t room = d.length - written_[current_];
    const std::size_t n = std::min(room, parts[part].size() - part_done);
    std::memcpy(buffers_[d.buffer_id].data() + d.offset + written_[current_],
                parts[part].data() + part_done, n);
    if (written_[current_] == 0 || c.descriptor_count == 0) ++c.descriptor_count;
    written_[current_] += n;
    done += n;
    part_done += n;
    if (written_[current_] == d.length) ++current_;
  }
  c.bytes_written = done;
  if (done < total) {
    c.status = CompletionStatus::kListExhausted;
    halted_ = true;
  }
  completions_.push_back(c);
  frame_start_offset_.push_back(start_offset);
  return c;
}

void DmaEngine::rearm() {
  std::fill(written_.begin(), written_.end(), 0);
  completions_.clear();
  frame_start_offset_.clear();
  current_ = 0;
  halted_ = false;
}

std::vector<std::uint8_t> DmaEngine::gather(std::size_t index) const {
  const Completion& c = completions_.at(index);
  std::vector<std::uint8_t> out;
  out.reserve(c.bytes_written);
  std::size_t offset = frame_start_offset_[index];
  for (std::size_t i = c.first_descriptor; out.size() < c.bytes_written && i < list_.size(); ++i) {
    const SgDescriptor& d = list_[i];
    const std::size_t n = std::min(d.length - offset, c.bytes_written - out.size());
    const auto* src = buffers_[d.buffer_id].data() + d.offset + offset;
    out.insert(out.end(), src, src + n);
    offset = 0;
  }
  return out;
}

TransferResult dma_transfer(std::span<const std::vector<std::uint8_t>> frames,
                            std::span<const std::size_t> buffer_sizes,
                            std::span<const SgDescriptor> list) {
  DmaEngine engine(buffer_sizes, std::vector<SgDescriptor>(list.begin(), list.end()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!engine.transfer(i, frames[i])) break;
  }
  TransferResult r;
  for (std::size_t id = 0; id < buffer_sizes.size(); ++id) {
    const auto b = engine.buffer(id);
    r.buffers.emplace_back(b.begin(), b.end());
  }
  for (std::size_t i = 0; i < list.size(); ++i) r.written.push_back(engine.written(i));
  r.completions.assign(engine.completions().begin(), engine.completions().end());
  return r;
}

}  // namespace clgrab::dma
