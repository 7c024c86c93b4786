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

#include "nemsim/memory_level.hpp"

#include <cmath>

#include "nemsim/error.hpp"

namespace nemsim::mem {

std::string_view to_string(LevelId id) {
  switch (id) {
    case LevelId::L1_TCDM:
      return "L1_TCDM";
    case LevelId::MRAM_WEIGHT:
      return "MRAM_WEIGHT";
    case LevelId::TILE_SRAM:
      return "TILE_SRAM";
    case LevelId::L2:
      return "L2";
    case LevelId::L3_FLASH:
      return "L3_FLASH";
  }
  return "?";
}

MemoryLevel default_level(LevelId id) {
  MemoryLevel m;
  m.id = id;
  switch (id) {
    case LevelId::L1_TCDM:
      // 288-bit shallow window, 16 word-interleaved banks
      m.capacity = 256 * kKiB;
      m.port_width = 288;
      m.banks = 16;
      m.read_latency = 1;
      break;
    case LevelId::MRAM_WEIGHT:
      m.capacity = 4 * kMiB;
      m.port_width = 256;
      m.banks = 4;
      m.clock_divider = 2;
      m.read_latency = 9;
      m.writable_at_runtime = false;
      break;
    case LevelId::TILE_SRAM:
      m.capacity = 4 * kMiB;
      m.port_width = 256;
      m.banks = 4;
      m.read_latency = 2;
      break;
    case LevelId::L2:
      m.capacity = 2 * kMiB;
      m.port_width = 64;
      m.banks = 4;
      m.read_latency = 10;
      break;
    case LevelId::L3_FLASH:
      // 8-bit DDR HyperBus at 200 MHz seen from a 360 MHz cluster clock
      m.capacity = 64 * kMiB;
      m.port_width = 3.2e9 / 360e6;
      m.read_latency = 100;
      m.writable_at_runtime = false;
      break;
  }
  return m;
}

std::uint64_t port_cycles(const MemoryLevel& level, std::uint64_t bytes) {
  if (level.port_width <= 0) throw InvalidConfig("memory level " + level.name() + " has no port width");
  const double beats = std::ceil(static_cast<double>(bytes) * 8.0 / level.port_width - 1e-9);
  return level.read_latency + static_cast<std::uint64_t>(beats < 0 ? 0 : beats);
}

double peak_bandwidth(const MemoryLevel& level, double cluster_freq) { return level.port_width * cluster_freq; }

double tcdm_aggregate_bandwidth(double cluster_freq) { return 16.0 * 32.0 * cluster_freq; }

}  // namespace nemsim::mem
