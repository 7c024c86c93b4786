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

#include <string>

namespace nemsim {

/// A voltage/frequency/power corner of the cluster.
struct OperatingPoint {
  std::string name;
  double voltage = 0.0;             // V
  double cluster_freq = 0.0;        // Hz
  double mram_freq = 0.0;           // Hz
  double cluster_power_peak = 0.0;  // W, MRAM included
  double mram_power = 0.0;          // W

  /// Throws InvalidConfig unless mram_freq is half the cluster clock and all values are positive.
  void validate() const;

  static OperatingPoint nominal();
  static OperatingPoint low_power();
  /// Looks up "nominal" or "low_power"; throws InvalidConfig otherwise.
  static OperatingPoint by_name(const std::string& name);

  bool operator==(const OperatingPoint&) const = default;
};

}  // namespace nemsim
