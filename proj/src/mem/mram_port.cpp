/*
 * Copyright 2026 The nemsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "nemsim/mram_port.hpp"

#include <deque>

#include "nemsim/error.hpp"

namespace nemsim::mem {
namespace {

constexpr std::uint64_t kWordBytes = kMramWordBits / 8;
constexpr std::uint64_t kCdcCycles = 2;
constexpr std::uint64_t kArrayCycles = 6;  // 3 MRAM cycles at half rate
constexpr std::uint64_t kReturnCycles = 1;

}  // namespace

MramStream mram_stream(std::uint64_t bytes) {
  MramStream s;
  s.bits_per_cycle = kMramWordBits;
  s.latency = kMramLatency;
  s.total_cycles = kMramLatency + (bytes * 8 + kMramWordBits - 1) / kMramWordBits;
  return s;
}

std::uint64_t mram_access_cycles(std::span<const std::pair<std::uint64_t, std::uint64_t>> extents) {
  std::uint64_t total = 0;
  std::uint64_t run_bytes = 0;
  std::uint64_t next = 0;
  bool open = false;
  for (const auto& [addr, bytes] : extents) {
    if (bytes == 0) continue;
    if (open && addr == next) {
      run_bytes += bytes;
    } else {
      if (open) total += mram_stream(run_bytes).total_cycles;
      run_bytes = bytes;
      open = true;
    }
    next = addr + bytes;
  }
  if (open) total += mram_stream(run_bytes).total_cycles;
  return total;
}

std::vector<std::uint64_t> MramPortModel::run(std::span<const std::uint64_t> addrs) const {
  for (auto a : addrs)
    if (a % kWordBytes) throw InvalidConfig("MRAM port addresses must be 256-bit aligned");

  struct InFlight {
    std::size_t first;
    std::size_t count;
    std::uint64_t ready;  // cycle the words leave the array
  };
  std::vector<std::uint64_t> arrival(addrs.size(), 0);
  std::deque<InFlight> cdc, array;
  std::deque<std::size_t> response;
  std::size_t issued = 0;
  std::size_t delivered = 0;
  std::uint64_t stream_start = 0;
  bool draining = false;  // discontinuity: wait for the pipe to empty
  std::uint64_t cycle = 0;

  while (delivered < addrs.size()) {
    // Return path: one word per cycle.
    if (!response.empty()) {
      arrival[response.front()] = cycle;
      response.pop_front();
      ++delivered;
    }
    // Array outputs become visible to the return path one cycle later.
    while (!array.empty() && array.front().ready + kReturnCycles <= cycle + 1) {
      for (std::size_t i = 0; i < array.front().count; ++i) response.push_back(array.front().first + i);
      array.pop_front();
    }
    // CDC hands pairs to the cuts on MRAM clock edges.
    while (!cdc.empty() && cdc.front().ready <= cycle) {
      InFlight f = cdc.front();
      cdc.pop_front();
      f.ready = cycle + kArrayCycles;
      array.push_back(f);
    }
    // Issue stage.
    if (draining && delivered == issued && response.empty() && array.empty() && cdc.empty()) {
      draining = false;
      stream_start = cycle + 1;
    }
    if (!draining && issued < addrs.size() && cycle >= stream_start && (cycle - stream_start) % 2 == 0) {
      std::size_t count = 1;
      if (issued + 1 < addrs.size() && addrs[issued + 1] == addrs[issued] + kWordBytes) count = 2;
      cdc.push_back({issued, count, cycle + kCdcCycles});
      issued += count;
      if (issued < addrs.size() && addrs[issued] != addrs[issued - 1] + kWordBytes) draining = true;
    }
    ++cycle;
  }
  return arrival;
}

std::uint64_t MramPortModel::total_cycles(std::span<const std::uint64_t> addrs) const {
  if (addrs.empty()) return 0;
  return run(addrs).back() + 1;
}

}  // namespace nemsim::mem
