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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nemsim/calibration.hpp"
#include "nemsim/network.hpp"
#include "nemsim/scenario.hpp"
#include "nemsim/tile_scheduler.hpp"

namespace nemsim {

struct InferenceReport {
  std::string network;
  ScenarioId scenario = ScenarioId::L3Flash;
  std::string opp;
  std::vector<sched::LayerReport> layers;  // markers are omitted
  double latency = 0.0;                    // s
  double energy = 0.0;                     // J
  double sleep_power = 0.0;                // W, between frames

  double fps() const { return latency > 0.0 ? 1.0 / latency : 0.0; }
  double millijoules() const { return energy * 1e3; }
  /// Energy per frame at the target rate plus sleep power for the rest of each period.
  double average_power(double target_fps = 30.0) const;
  /// Sum of all layer reports with the regime reclassified.
  sched::LayerReport total(double threshold = 1.2) const;

  bool operator==(const InferenceReport&) const = default;
};

/// Runs every accelerator layer through the tile scheduler. Throws Unschedulable for the first
/// layer that does not fit, and when the network's weights exceed the store without paging.
InferenceReport run_network(const NetworkDesc& net, const ScenarioConfig& sc, const OperatingPoint& opp,
                            const CalibrationSet& cal);

/// Tile schedules of every accelerator layer.
std::vector<sched::TileSchedule> plan_network(const NetworkDesc& net, const ScenarioConfig& sc,
                                              const CalibrationSet& cal);

/// Reports of all layers whose group is `group`, summed and reclassified.
sched::LayerReport group_report(const InferenceReport& r, const std::string& group, double threshold = 1.2);

struct ComparisonRow {
  ScenarioId scenario = ScenarioId::L3Flash;
  double latency = 0.0;
  double energy = 0.0;
  double latency_gain = 1.0;  // baseline latency / latency
  double energy_gain = 1.0;
};

/// All four scenarios, with gains against `baseline`.
std::vector<ComparisonRow> compare_scenarios(const NetworkDesc& net, const OperatingPoint& opp,
                                             const CalibrationSet& cal,
                                             ScenarioId baseline = ScenarioId::L3Flash);

/// Improvement of `better` over `worse` as the relative excess cost of `worse`: worse / better - 1.
inline double improvement(double better, double worse) { return better > 0.0 ? worse / better - 1.0 : 0.0; }

/// CSV with one row per layer; comment lines carry the run metadata.
void emit_report(std::ostream& os, const InferenceReport& r);
void emit_report(const std::filesystem::path& path, const InferenceReport& r);
InferenceReport load_report(std::istream& is, const std::string& source = "<stream>");
InferenceReport load_report(const std::filesystem::path& path);

void emit_comparison(std::ostream& os, const std::vector<ComparisonRow>& rows);

}  // namespace nemsim
