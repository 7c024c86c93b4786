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
#include <string>
#include <vector>

#include "nemsim/calibration.hpp"
#include "nemsim/network.hpp"

namespace nemsim {

/// Published aggregates the calibration is fitted against.
struct FitTargets {
  double dense8_throughput = 698e9;      // Op/s, dense 3x3 8-bit, MRAM weights, nominal
  double dense2_throughput = 1947e9;     // Op/s, same kernel with 2-bit weights
  double dense8_efficiency = 2.68e12;    // Op/J at low power, checked only
  double dense2_efficiency = 8.84e12;    // Op/J at low power, sets the 2-bit power factor
  double pointwise_efficiency = 2.4e12;  // Op/J at low power, sets the pointwise power factor
  double l3flash_latency = 12.6e-3;      // s
  double l3flash_energy = 3.8e-3;        // J
  double offchip_share = 0.55;           // of the L3Flash energy
  double l1mram_latency = 7.3e-3;
  double l1mram_energy = 1.4e-3;
  double l3mram_energy_gain = 0.0;    // optional, L3Flash / L3MRAM energy
  double l2mram_latency_ratio = 0.0;  // optional, L2MRAM / L1MRAM
  double l2mram_energy_ratio = 0.0;   // optional
  std::vector<std::string> free_params{"link.hyperbus.bandwidth", "link.cluster_dma.energy",
                                       "energy.l1_weight_read"};
  std::filesystem::path network;  // relative paths resolve against the targets file
  double tolerance = 0.25;        // largest relative error accepted on any target
};

/// Reads a JSON targets file. Throws ParseError.
FitTargets load_targets(const std::filesystem::path& path);

struct TargetError {
  std::string name;
  double target = 0.0;
  double model = 0.0;
  double relative_error = 0.0;
};

struct FitResult {
  CalibrationSet cal;
  std::uint32_t overhead_k = 0;  // fixed cycles per dense benchmark task
  std::vector<TargetError> errors;
  int evaluations = 0;
};

/// Closed forms for the per-task overhead, the kernel power factors and the off-chip energy, then
/// coordinate descent in log space over the free parameters. Throws FitDiverged when any target misses by more than the tolerance.
FitResult fit_calibration(const FitTargets& targets, const NetworkDesc& net, CalibrationSet start = {});

/// Model values for every target under a calibration.
std::vector<TargetError> evaluate_targets(const FitTargets& targets, const NetworkDesc& net,
                                          const CalibrationSet& cal);

}  // namespace nemsim
