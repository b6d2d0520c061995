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

#include <doctest.h>

#include <numeric>

#include "clgrab/dma.hpp"
#include "support/check.hpp"
#include "support/dma_walker.hpp"
#include "support/gen.hpp"

using namespace clgrab;
using namespace clgrab::dma;
using namespace clgrab::testing;

namespace {

// Cuts every buffer into random segments, then shuffles the segments across
// buffers so list order and address order differ.
std::vector<SgDescriptor> random_tiling(Rng& rng, const std::vector<std::size_t>& sizes) {
  std::vector<SgDescriptor> list;
  for (std::size_t id = 0; id < sizes.size(); ++id) {
    std::size_t off = 0;
    while (off < sizes[id]) {
      const std::size_t len = std::min(sizes[id] - off, rng.range(1, 200));
      if (rng.chance(0.8)) list.push_back({id, off, len, false});  // leave some holes
      off += len;
    }
  }
  for (std::size_t i = list.size(); i > 1; --i) std::swap(list[i - 1], list[rng.range(0, i - 1)]);
  if (!list.empty()) list.back().last = true;
  return list;
}

}  // namespace

TEST_CASE("build_sg_list examples") {
  const std::size_t one[] = {300};
  CHECK(build_sg_list(one, 128) ==
        std::vector<SgDescriptor>{{0, 0, 128, false}, {0, 128, 128, false}, {0, 256, 44, true}});
  const std::size_t two[] = {128, 128};
  CHECK(build_sg_list(two, 128).size() == 2);
  CHECK_ERROR(build_sg_list(two, 0), ErrorCode::kInvalidArgument);
  CHECK(build_sg_list(std::span<const std::size_t>{}, 16).empty());
}

TEST_CASE("sg lists tile their buffers") {
  Rng rng(0xd3a001);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::size_t> sizes(rng.range(1, 8));
    for (auto& s : sizes) s = rng.range(1, 5000);
    const std::size_t chunk = rng.range(1, 700);
    const auto list = build_sg_list(sizes, chunk);
    std::size_t sum = 0;
    std::vector<std::size_t> next_offset(sizes.size(), 0);
    std::size_t prev_id = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& d = list[k];
      REQUIRE(d.length >= 1);
      REQUIRE(d.length <= chunk);
      REQUIRE(d.buffer_id >= prev_id);
      REQUIRE(d.offset == next_offset[d.buffer_id]);
      REQUIRE(d.last == (k + 1 == list.size()));
      next_offset[d.buffer_id] += d.length;
      prev_id = d.buffer_id;
      sum += d.length;
    }
    REQUIRE(sum == std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
    REQUIRE(next_offset == sizes);
  }
}

TEST_CASE("engine rejects descriptors outside their buffer") {
  const std::size_t sizes[] = {100};
  CHECK_ERROR(DmaEngine(sizes, {{0, 50, 51, true}}), ErrorCode::kInvalidArgument);
  CHECK_ERROR(DmaEngine(sizes, {{1, 0, 10, true}}), ErrorCode::kInvalidArgument);
  CHECK_ERROR(DmaEngine(sizes, {{0, 0, 0, true}}), ErrorCode::kInvalidArgument);
  CHECK_NOTHROW(DmaEngine(sizes, {{0, 0, 100, true}}));
}

TEST_CASE("single frame into one buffer") {
  Rng rng(0xd3a002);
  const auto frame = rng.bytes(260);
  const std::size_t sizes[] = {4096};
  DmaEngine e(sizes, build_sg_list(sizes, 4096));
  const auto c = e.transfer(0, frame);
  REQUIRE(c.has_value());
  CHECK(c->status == CompletionStatus::kOk);
  CHECK(c->bytes_written == 260);
  CHECK(c->descriptor_count == 1);
  CHECK(std::equal(frame.begin(), frame.end(), e.buffer(0).begin()));
  CHECK(e.gather(0) == frame);
}

TEST_CASE("exhaustion halts the engine") {
  Rng rng(0xd3a003);
  const std::size_t sizes[] = {256};
  DmaEngine e(sizes, build_sg_list(sizes, 100));
  const auto c = e.transfer(0, rng.bytes(300));
  REQUIRE(c.has_value());
  CHECK(c->status == CompletionStatus::kListExhausted);
  CHECK(c->bytes_written == 256);
  CHECK(c->descriptor_count == 3);
  CHECK(e.halted());
  CHECK(e.remaining() == 0);
  CHECK_FALSE(e.transfer(1, rng.bytes(1)).has_value());
  CHECK(e.completions().size() == 1);

  e.rearm();
  CHECK_FALSE(e.halted());
  CHECK(e.remaining() == 256);
  CHECK(e.completions().empty());
  CHECK(e.transfer(2, rng.bytes(10))->status == CompletionStatus::kOk);
}

TEST_CASE("frames share descriptors and straddle them") {
  const std::size_t sizes[] = {64};
  DmaEngine e(sizes, build_sg_list(sizes, 16));
  std::vector<std::uint8_t> a(10, 1), b(30, 2), c(8, 3);
  CHECK(*e.transfer(0, a) == Completion{0, 10, 0, 1, CompletionStatus::kOk});
  CHECK(*e.transfer(1, b) == Completion{1, 30, 0, 3, CompletionStatus::kOk});
  CHECK(*e.transfer(2, c) == Completion{2, 8, 2, 1, CompletionStatus::kOk});
  // Descriptor 2 is full now; the next frame starts on descriptor 3.
  CHECK(e.transfer(3, a)->first_descriptor == 3);
  CHECK(e.gather(1) == b);
}

TEST_CASE("multi-part transfers match contiguous ones") {
  Rng rng(0xd3a004);
  for (int i = 0; i < 300; ++i) {
    const std::vector<std::size_t> sizes = {rng.range(1, 3000), rng.range(1, 3000)};
    const auto list = random_tiling(rng, sizes);
    if (list.empty()) continue;
    DmaEngine one(sizes, list), parts(sizes, list);
    for (int f = 0; f < 10 && !one.halted(); ++f) {
      const auto a = rng.bytes(rng.range(0, 300)), b = rng.bytes(rng.range(0, 300)),
                 c = rng.bytes(rng.range(0, 300));
      std::vector<std::uint8_t> joined = a;
      joined.insert(joined.end(), b.begin(), b.end());
      joined.insert(joined.end(), c.begin(), c.end());
      const std::span<const std::uint8_t> pieces[] = {a, b, c};
      REQUIRE(one.transfer(f, joined) == parts.transfer(f, pieces));
    }
    for (std::size_t id = 0; id < sizes.size(); ++id) {
      REQUIRE(std::equal(one.buffer(id).begin(), one.buffer(id).end(), parts.buffer(id).begin()));
    }
  }
}

TEST_CASE("descriptor walk reproduces the stream") {
  Rng rng(0xd3a005);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::size_t> sizes(rng.range(1, 4));
    for (auto& s : sizes) s = rng.range(1, 2000);
    const auto list = rng.chance(0.5) ? build_sg_list(sizes, rng.range(1, 500)) : random_tiling(rng, sizes);
    if (list.empty()) continue;
    std::vector<std::vector<std::uint8_t>> frames(rng.range(1, 12));
    std::vector<std::size_t> lengths;
    std::vector<std::uint8_t> stream;
    for (auto& f : frames) {
      f = rng.bytes(rng.range(0, 900), 1);  // never zero, so stray writes show
      lengths.push_back(f.size());
      stream.insert(stream.end(), f.begin(), f.end());
    }
    DmaEngine e(sizes, list);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      if (!e.transfer(k, frames[k])) break;
    }
    const auto expected = expected_completions(lengths, list);
    REQUIRE(std::vector<Completion>(e.completions().begin(), e.completions().end()) == expected);
    const auto walked = walk_descriptors(e);
    REQUIRE(walked.size() <= stream.size());
    REQUIRE(std::equal(walked.begin(), walked.end(), stream.begin()));
    // Nothing outside the written descriptor spans.
    std::vector<std::vector<bool>> touched;
    for (auto s : sizes) touched.emplace_back(s, false);
    for (std::size_t k = 0; k < list.size(); ++k) {
      REQUIRE(e.written(k) <= list[k].length);
      for (std::size_t b = 0; b < e.written(k); ++b) touched[list[k].buffer_id][list[k].offset + b] = true;
    }
    for (std::size_t id = 0; id < sizes.size(); ++id) {
      for (std::size_t b = 0; b < sizes[id]; ++b) REQUIRE((e.buffer(id)[b] != 0) == touched[id][b]);
    }
    std::size_t offset = 0;
    for (std::size_t k = 0; k < e.completions().size(); ++k) {
      const auto g = e.gather(k);
      REQUIRE(std::equal(g.begin(), g.end(), stream.begin() + static_cast<std::ptrdiff_t>(offset)));
      offset += g.size();
    }
  }
}

TEST_CASE("dma_transfer wrapper") {
  Rng rng(0xd3a006);
  const std::vector<std::vector<std::uint8_t>> frames = {rng.bytes(100), rng.bytes(200), rng.bytes(50)};
  const std::vector<std::size_t> sizes = {128, 128};
  const auto r = dma_transfer(frames, sizes, build_sg_list(sizes, 64));
  REQUIRE(r.completions.size() == 2);
  CHECK(r.completions[0].status == CompletionStatus::kOk);
  CHECK(r.completions[1].status == CompletionStatus::kListExhausted);
  CHECK(r.completions[1].bytes_written == 156);
  CHECK(r.written == std::vector<std::size_t>{64, 64, 64, 64});
}
