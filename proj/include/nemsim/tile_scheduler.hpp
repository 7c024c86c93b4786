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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nemsim/calibration.hpp"
#include "nemsim/layer_spec.hpp"
#include "nemsim/neureka_timing.hpp"
#include "nemsim/operating_point.hpp"
#include "nemsim/pipeline_replay.hpp"
#include "nemsim/scenario.hpp"

namespace nemsim::sched {

/// Output channels are tiled in steps of one accelerator output group.
inline constexpr int kChannelStep = 32;

/// A convolution layer with its input feature-map size.
struct LayerShape {
  std::string name;
  qnn::LayerSpec spec;
  int in_h = 0;
  int in_w = 0;

  int out_h() const { return spec.output_extent(in_h); }
  int out_w() const { return spec.output_extent(in_w); }
};

/// Output-tile extent; c_in is the input depth the tile reads.
struct TileDims {
  int h = 0;
  int w = 0;
  int c_in = 0;
  int c_out = 0;

  bool operator==(const TileDims&) const = default;
};

struct Tile {
  int row0 = 0;  // output coordinates of the tile origin
  int col0 = 0;
  int c0 = 0;
  TileDims dims;
  std::uint64_t input_bytes = 0;     // L2 -> L1, halo clipped to the feature map
  std::uint64_t output_bytes = 0;    // L1 -> L2
  std::uint64_t weight_bytes = 0;    // weights of this tile's output channels
  std::uint64_t weight_l1_bytes = 0; // weights moved L2 -> L1
  std::uint64_t staging_bytes = 0;   // weights moved store -> L2
  std::uint64_t stream_bytes = 0;    // weights read by the accelerator, summed over jobs
  int jobs = 0;
  timing::CycleBreakdown compute;

  std::uint64_t dma_bytes() const { return input_bytes + output_bytes + weight_l1_bytes; }
};

struct TileSchedule {
  std::string layer;
  qnn::LayerSpec spec;
  ScenarioId scenario = ScenarioId::L3Flash;
  int in_h = 0;
  int in_w = 0;
  int out_h = 0;
  int out_w = 0;
  TileDims tile;
  int count_h = 0;
  int count_w = 0;
  int count_c = 0;
  std::uint64_t l1_footprint = 0;  // double-buffered bytes of the largest tile
  std::vector<Tile> tiles;

  std::uint64_t total_cycles() const;
};

/// Chooses full-depth tiles of the largest output area that fit L1 twice over.
/// Throws Unschedulable when even a one-job tile does not fit.
TileSchedule plan_tiles(const LayerShape& layer, const ScenarioConfig& sc, const CalibrationSet& cal);

/// Input bytes a tile must read: its receptive field clipped to the feature map.
std::uint64_t halo_input_bytes(const LayerShape& layer, int row0, int col0, int h, int w, int c_in);

enum class Regime { WellBalanced, ComputeDominated, WeightMemoryBound };

std::string_view to_string(Regime r);

struct EnergyParts {
  double compute = 0.0;
  double l1_traffic = 0.0;
  double l2_l1 = 0.0;
  double l3_l2 = 0.0;
  double off_chip = 0.0;
  double mram_read = 0.0;
  double idle = 0.0;

  double total() const { return compute + l1_traffic + l2_l1 + l3_l2 + off_chip + mram_read + idle; }
  EnergyParts& operator+=(const EnergyParts& o);
  bool operator==(const EnergyParts&) const = default;
};

struct LayerReport {
  std::string layer;
  qnn::ConvMode mode = qnn::ConvMode::Dense3x3;
  timing::CycleBreakdown cycles;
  std::map<std::string, std::uint64_t> link_bytes;
  std::map<std::string, double> link_time;  // busy seconds on links outside the accelerator
  double latency = 0.0;
  double compute_time = 0.0;
  double weight_link_time = 0.0;
  EnergyParts energy;
  Regime regime = Regime::WellBalanced;

  /// Accumulates another report; the regime is left for the caller to reclassify.
  LayerReport& operator+=(const LayerReport& o);
  bool operator==(const LayerReport&) const = default;
};

/// Per-tile stage durations of a schedule.
std::vector<StageTimes> stage_times(const TileSchedule& ts, const ScenarioConfig& sc, const OperatingPoint& opp,
                                    const CalibrationSet& cal);

LayerReport layer_timeline(const TileSchedule& ts, const ScenarioConfig& sc, const OperatingPoint& opp,
                           const CalibrationSet& cal);

Regime classify_regime(const LayerReport& report, double threshold = 1.2);

/// One row per layer: tile dims, counts, bytes per link and cycles.
void write_schedule_csv(std::ostream& os, const std::vector<TileSchedule>& schedules);

}  // namespace nemsim::sched
