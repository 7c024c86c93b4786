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
#include <map>
#include <string>
#include <vector>

#include "nemsim/memory_level.hpp"
#include "nemsim/operating_point.hpp"

namespace nemsim::xfer {

struct Link {
  std::string name;
  mem::LevelId source = mem::LevelId::L2;
  mem::LevelId destination = mem::LevelId::L1_TCDM;
  double sustained_bw = 0.0;         // bit/s at reference_freq
  double reference_freq = 360e6;     // Hz
  bool scales_with_cluster = true;   // off-chip links keep their bandwidth
  std::uint32_t setup_cycles = 50;   // cluster cycles per transfer
  double energy_per_bit = 0.0;       // J/bit

  /// Throws InvalidConfig for non-positive bandwidth.
  void validate() const;
  /// Bandwidth at the operating point's cluster clock.
  double bandwidth(const OperatingPoint& opp) const;
  bool operator==(const Link&) const = default;
};

/// setup / f_cluster + bytes * 8 / bandwidth.
double transfer_time(const Link& link, std::uint64_t bytes, const OperatingPoint& opp);
/// bytes * 8 * energy_per_bit.
double transfer_energy(const Link& link, std::uint64_t bytes);

/// Named links; lookups of unknown names throw UnknownLink.
class LinkTable {
 public:
  void add(Link link);
  const Link& get(const std::string& name) const;
  Link& get(const std::string& name);
  bool contains(const std::string& name) const { return links_.count(name) != 0; }
  std::vector<std::string> names() const;

  double transfer_time(const std::string& name, std::uint64_t bytes, const OperatingPoint& opp) const;
  double transfer_energy(const std::string& name, std::uint64_t bytes) const;

  /// The built-in link set: cluster_dma, hyperbus, l3mram, axi_swap, mram_port.
  static LinkTable defaults();

  bool operator==(const LinkTable&) const = default;

 private:
  std::map<std::string, Link> links_;
};

namespace links {
inline constexpr const char* kClusterDma = "cluster_dma";
inline constexpr const char* kHyperbus = "hyperbus";
inline constexpr const char* kL3Mram = "l3mram";
inline constexpr const char* kAxiSwap = "axi_swap";
inline constexpr const char* kMramPort = "mram_port";
}  // namespace links

}  // namespace nemsim::xfer
