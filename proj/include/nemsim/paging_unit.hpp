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
#include <optional>
#include <variant>

#include "nemsim/memory_level.hpp"

namespace nemsim::paging {

inline constexpr std::uint64_t kPageBytes = 4 * mem::kMiB;

/// Physical regions: A is the weight MRAM (never written at runtime), B is the tile SRAM.
enum class Region { A, B };

struct PendingSwap {
  Region target = Region::B;
  std::uint32_t page = 0;
  std::uint64_t completion = 0;  // cluster cycle
  bool operator==(const PendingSwap&) const = default;
};

struct PageState {
  std::optional<std::uint32_t> page_reg_a;
  std::optional<std::uint32_t> page_reg_b;
  std::optional<PendingSwap> pending;

  bool resident(std::uint32_t page) const { return page_reg_a == page || page_reg_b == page; }
  /// Throws InvalidConfig if both registers hold the same page or a swap targets region A.
  void validate() const;
  bool operator==(const PageState&) const = default;
};

struct Hit {
  Region region;
  std::uint64_t offset;  // byte offset inside the page
  bool operator==(const Hit&) const = default;
};

struct Miss {
  std::uint32_t page;
  bool operator==(const Miss&) const = default;
};

using Mapping = std::variant<Hit, Miss>;

inline std::uint32_t page_of(std::uint64_t addr) { return static_cast<std::uint32_t>(addr / kPageBytes); }

/// Throws AddressOutOfRange when addr is outside [0, weight_space).
Mapping map_address(std::uint64_t addr, const PageState& st, std::uint64_t weight_space);

struct MissOutcome {
  PageState state;           // registers after the stalled request resumes
  std::uint64_t stall_begin = 0;
  std::uint64_t stall_end = 0;
  bool started_swap = false;
  std::uint64_t stall() const { return stall_end - stall_begin; }
};

/// Stalls the request on `addr` until its page sits in region B.
/// `swap_cycles` covers the miss service plus the 4 MiB transfer.
/// Throws SwapInProgress when another page is already being swapped in.
MissOutcome handle_miss(const PageState& st, std::uint64_t addr, std::uint64_t now, std::uint64_t swap_cycles,
                        std::uint64_t weight_space);

/// Applies a pending swap whose completion time has passed.
PageState retire_swap(PageState st, std::uint64_t now);

}  // namespace nemsim::paging
