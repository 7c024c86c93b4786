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
#include <string>
#include <string_view>

namespace nemsim::mem {

enum class LevelId { L1_TCDM, MRAM_WEIGHT, TILE_SRAM, L2, L3_FLASH };

std::string_view to_string(LevelId id);

struct MemoryLevel {
  LevelId id = LevelId::L1_TCDM;
  std::uint64_t capacity = 0;      // bytes
  double port_width = 0.0;         // bits per cluster cycle
  int banks = 1;
  double clock_divider = 1.0;      // memory clock = cluster clock / divider
  std::uint32_t read_latency = 0;  // cluster cycles
  bool writable_at_runtime = true;
  double read_energy = 0.0;   // J/bit
  double write_energy = 0.0;  // J/bit

  std::string name() const { return std::string(to_string(id)); }
};

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * 1024;

/// Built-in description of a level; energies are left at zero (they come from calibration).
MemoryLevel default_level(LevelId id);

/// read_latency + ceil(bytes * 8 / port_width).
std::uint64_t port_cycles(const MemoryLevel& level, std::uint64_t bytes);

/// Peak bandwidth of a level in bit/s at a given cluster clock.
double peak_bandwidth(const MemoryLevel& level, double cluster_freq);

/// Aggregate L1 bandwidth with every bank granting a 32-bit word each cycle.
double tcdm_aggregate_bandwidth(double cluster_freq);

}  // namespace nemsim::mem
