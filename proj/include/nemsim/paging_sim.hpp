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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nemsim/link.hpp"
#include "nemsim/paging_unit.hpp"

namespace nemsim::paging {

/// A burst of weight reads from one page taking `read_cycles` when served without stalls.
struct ScheduleEntry {
  std::uint32_t page = 0;
  std::uint64_t read_cycles = 0;
};

enum class Policy { Reactive, Proactive };

enum class EventKind { Hit, Miss, SwapStart, SwapDone };
std::string_view to_string(EventKind k);

struct TraceEvent {
  std::uint64_t cycle = 0;
  EventKind kind = EventKind::Hit;
  std::uint32_t page = 0;
  bool operator==(const TraceEvent&) const = default;
};

struct PagingConfig {
  std::uint64_t weight_space = 0;  // bytes
  std::uint64_t swap_cycles = 0;   // miss service + one 4 MiB transfer
};

struct PagingRun {
  std::uint64_t total_stall = 0;
  std::uint64_t finish_cycle = 0;
  std::uint64_t swaps = 0;
  std::uint64_t wrong_page_reads = 0;  // safety violations seen by the physical-content check
  std::uint64_t max_single_stall = 0;
  std::vector<TraceEvent> trace;
};

/// Boot state: page 0 programmed in MRAM, page 1 (if any) preloaded in tile SRAM.
PageState boot_state(std::uint64_t weight_space);

/// Cycles for one swap: service constant plus the 4 MiB transfer on the swap link.
std::uint64_t swap_cycles(const xfer::Link& swap_link, const OperatingPoint& opp, std::uint64_t service_cycles);

struct PlannedSwap {
  std::size_t trigger = 0;  // schedule index whose start launches the swap
  std::uint32_t page = 0;
  bool operator==(const PlannedSwap&) const = default;
};

/// Page the proactive policy would load when `pages[i]` becomes the active read target,
/// or nothing when region B must be kept.
std::optional<std::uint32_t> proactive_choice(std::span<const std::uint32_t> pages, std::size_t i, const PageState& st);

/// Static swap plan assuming each swap lands before the next page switch.
std::vector<PlannedSwap> proactive_swap(std::span<const std::uint32_t> pages, const PageState& initial);

/// Event replay of a schedule under a swap policy.
PagingRun simulate_paging(std::span<const ScheduleEntry> schedule, Policy policy, const PagingConfig& cfg);

void write_trace_csv(std::ostream& os, const std::vector<TraceEvent>& trace);

/// Byte-level weight memory behind the paging unit: a flat backing image plus two physical regions.
class PagedWeightStore {
 public:
  PagedWeightStore(std::vector<std::uint8_t> image, std::uint64_t swap_cycles);

  /// Reads `len` bytes at virtual address `addr`, missing and swapping as needed.
  /// Reads never straddle a page. Returns the cycle at which the data is available.
  std::uint64_t read(std::uint64_t addr, std::span<std::uint8_t> out, std::uint64_t now);

  /// Starts a proactive swap of `page` into region B if the unit is idle.
  bool prefetch(std::uint32_t page, std::uint64_t now);

  const PageState& state() const { return st_; }
  std::uint64_t stall() const { return stall_; }
  std::uint64_t swaps() const { return swaps_; }

 private:
  void land(std::uint64_t now);

  std::vector<std::uint8_t> image_;
  std::vector<std::uint8_t> region_a_;
  std::vector<std::uint8_t> region_b_;
  std::uint32_t region_b_content_ = UINT32_MAX;
  PageState st_;
  std::uint64_t swap_cycles_;
  std::uint64_t stall_ = 0;
  std::uint64_t swaps_ = 0;
};

}  // namespace nemsim::paging
