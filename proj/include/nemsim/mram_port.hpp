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

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace nemsim::mem {

inline constexpr std::uint32_t kMramLatency = 9;
inline constexpr std::uint32_t kMramWordBits = 256;

struct MramStream {
  double bits_per_cycle = 0.0;
  std::uint32_t latency = 0;
  std::uint64_t total_cycles = 0;
};

/// Sequential weight stream of `bytes` through the wide port: 9 + ceil(bytes*8/256) cycles.
MramStream mram_stream(std::uint64_t bytes);

/// Reads of (address, bytes) extents; every discontinuity restarts the access latency.
std::uint64_t mram_access_cycles(std::span<const std::pair<std::uint64_t, std::uint64_t>> extents);

/// Cycle-stepped model of the half-rate, two-cut weight port.
///
/// Requests go out in pairs on every other cluster cycle, cross the clock-domain
/// crossing in 2 cycles, spend 3 MRAM cycles (6 cluster cycles) in the cuts and
/// return one 256-bit word per cluster cycle after 1 more cycle.
class MramPortModel {
 public:
  /// Arrival cycle of each 256-bit word, for word-aligned addresses in request order.
  std::vector<std::uint64_t> run(std::span<const std::uint64_t> word_addresses) const;

  /// Cycles until the last word has arrived.
  std::uint64_t total_cycles(std::span<const std::uint64_t> word_addresses) const;
};

}  // namespace nemsim::mem
