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

#include "nemsim/link.hpp"

#include "nemsim/error.hpp"

namespace nemsim::xfer {

void Link::validate() const {
  if (!(sustained_bw > 0)) throw InvalidConfig("link '" + name + "' needs a positive bandwidth");
  if (!(reference_freq > 0)) throw InvalidConfig("link '" + name + "' needs a positive reference clock");
  if (energy_per_bit < 0) throw InvalidConfig("link '" + name + "' has negative energy");
}

double Link::bandwidth(const OperatingPoint& opp) const {
  return scales_with_cluster ? sustained_bw * opp.cluster_freq / reference_freq : sustained_bw;
}

double transfer_time(const Link& link, std::uint64_t bytes, const OperatingPoint& opp) {
  return static_cast<double>(link.setup_cycles) / opp.cluster_freq + static_cast<double>(bytes) * 8.0 / link.bandwidth(opp);
}

double transfer_energy(const Link& link, std::uint64_t bytes) { return static_cast<double>(bytes) * 8.0 * link.energy_per_bit; }

void LinkTable::add(Link link) {
  link.validate();
  const std::string key = link.name;
  links_[key] = std::move(link);
}

const Link& LinkTable::get(const std::string& name) const {
  auto it = links_.find(name);
  if (it == links_.end()) throw UnknownLink("unknown link '" + name + "'");
  return it->second;
}

Link& LinkTable::get(const std::string& name) {
  auto it = links_.find(name);
  if (it == links_.end()) throw UnknownLink("unknown link '" + name + "'");
  return it->second;
}

std::vector<std::string> LinkTable::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : links_) out.push_back(k);
  return out;
}

double LinkTable::transfer_time(const std::string& name, std::uint64_t bytes, const OperatingPoint& opp) const {
  return xfer::transfer_time(get(name), bytes, opp);
}

double LinkTable::transfer_energy(const std::string& name, std::uint64_t bytes) const {
  return xfer::transfer_energy(get(name), bytes);
}

LinkTable LinkTable::defaults() {
  using mem::LevelId;
  LinkTable t;
  // 64-bit AXI into the cluster at 360 MHz
  t.add({links::kClusterDma, LevelId::L2, LevelId::L1_TCDM, 23.04e9, 360e6, true, 50, 1e-12});
  // 8-bit DDR HyperBus at 200 MHz, independent of the cluster clock
  t.add({links::kHyperbus, LevelId::L3_FLASH, LevelId::L2, 3.2e9, 360e6, false, 50, 75e-12});
  t.add({links::kL3Mram, LevelId::MRAM_WEIGHT, LevelId::L2, 11.52e9, 360e6, true, 50, 5e-12});
  // 32-bit AXI clock-domain crossing used for page swaps
  t.add({links::kAxiSwap, LevelId::L2, LevelId::TILE_SRAM, 11.52e9, 360e6, true, 50, 1e-12});
  // 256 bit per cluster cycle; energy = 69 mW / 92.16 Gbit/s
  t.add({links::kMramPort, LevelId::MRAM_WEIGHT, LevelId::L1_TCDM, 92.16e9, 360e6, true, 0, 0.069 / 92.16e9});
  return t;
}

}  // namespace nemsim::xfer
