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

#include "nemsim/operating_point.hpp"

#include <cmath>

#include "nemsim/error.hpp"

namespace nemsim {

void OperatingPoint::validate() const {
  if (voltage <= 0 || cluster_freq <= 0 || mram_freq <= 0 || cluster_power_peak <= 0 || mram_power < 0)
    throw InvalidConfig("operating point '" + name + "' has non-positive values");
  if (std::abs(mram_freq * 2.0 - cluster_freq) > 1e-6 * cluster_freq)
    throw InvalidConfig("operating point '" + name + "': MRAM clock must be half the cluster clock");
  if (mram_power >= cluster_power_peak) throw InvalidConfig("operating point '" + name + "': MRAM power exceeds cluster power");
}

OperatingPoint OperatingPoint::nominal() { return {"nominal", 0.80, 360e6, 180e6, 0.332, 0.069}; }

OperatingPoint OperatingPoint::low_power() { return {"low_power", 0.65, 210e6, 105e6, 0.151, 0.040}; }

OperatingPoint OperatingPoint::by_name(const std::string& name) {
  if (name == "nominal") return nominal();
  if (name == "low_power") return low_power();
  throw InvalidConfig("unknown operating point '" + name + "'");
}

}  // namespace nemsim
