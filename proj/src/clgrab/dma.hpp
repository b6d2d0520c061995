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

// Scatter-gather DMA engine emulation. Descriptors are consumed strictly in
// list order; frames follow one another without alignment, so a frame starts
// at the next unused byte of the current descriptor. Running out of
// descriptors mid-frame ends that frame with ListExhausted and halts the
// engine until the list is re-armed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace clgrab::dma {

struct SgDescriptor {
  std::size_t buffer_id = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  bool last = false;

  friend bool operator==(const SgDescriptor&, const SgDescriptor&) = default;
};

enum class CompletionStatus { kOk, kListExhausted };

struct Completion {
  std::uint64_t frame_number = 0;
  std::size_t bytes_written = 0;
  std::size_t first_descriptor = 0;
  std::size_t descriptor_count = 0;
  CompletionStatus status = CompletionStatus::kOk;

  friend bool operator==(const Completion&, const Completion&) = default;
};

/// Tiles each buffer in order with `chunk`-byte segments; the final
/// descriptor carries the last flag. Throws InvalidArgument if chunk is 0.
std::vector<SgDescriptor> build_sg_list(std::span<const std::size_t> buffer_sizes,
                                        std::size_t chunk);

class DmaEngine {
 public:
  /// Allocates host buffers of the given sizes. Throws InvalidArgument if a
  /// descriptor is empty or reaches outside its buffer.
  DmaEngine(std::span<const std::size_t> buffer_sizes, std::vector<SgDescriptor> list);

  /// Transfers one frame. Empty once the engine has halted.
  std::optional<Completion> transfer(std::uint64_t frame_number,
                                     std::span<const std::uint8_t> bytes);
  /// Same, for a frame held in several pieces, sent back to back.
  std::optional<Completion> transfer(std::uint64_t frame_number,
                                     std::span<const std::span<const std::uint8_t>> parts);

  bool halted() const noexcept { return halted_; }
  /// Bytes still available before the list runs out.
  std::size_t remaining() const noexcept;
  /// Hands every descriptor back to the engine, clearing written lengths,
  /// completions and the halt.
  void rearm();

  std::span<const SgDescriptor> descriptors() const noexcept { return list_; }
  std::size_t written(std::size_t descriptor) const { return written_.at(descriptor); }
  std::span<const std::uint8_t> buffer(std::size_t id) const { return buffers_.at(id); }
  std::span<const Completion> completions() const noexcept { return completions_; }

  /// Copies the bytes of completion `index` back out of the host buffers.
  std::vector<std::uint8_t> gather(std::size_t index) const;

 private:
  std::vector<std::vector<std::uint8_t>> buffers_;
  std::vector<SgDescriptor> list_;
  std::vector<std::size_t> written_;
  std::vector<Completion> completions_;
  std::vector<std::size_t> frame_start_offset_;  // per completion: offset in first descriptor
  std::size_t current_ = 0;
  bool halted_ = false;
};

/// Runs every frame through a fresh engine until it halts.
struct TransferResult {
  std::vector<std::vector<std::uint8_t>> buffers;
  std::vector<std::size_t> written;
  std::vector<Completion> completions;
};

TransferResult dma_transfer(std::span<const std::vector<std::uint8_t>> frames,
                            std::span<const std::size_t> buffer_sizes,
                            std::span<const SgDescriptor> list);

}  // namespace clgrab::dma
