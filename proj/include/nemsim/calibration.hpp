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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nemsim/link.hpp"
#include "nemsim/neureka_timing.hpp"
#include "nemsim/operating_point.hpp"
#include "nemsim/tcdm_arbiter.hpp"

namespace nemsim {

enum class Provenance { Paper, DerivedFit, Default };

std::string_view to_string(Provenance p);

/// Tags of the built-in values: published figures are `paper`, the rest `default`.
std::map<std::string, Provenance> builtin_provenance();

/// Every tunable constant of the model.
struct CalibrationSet {
  OperatingPoint nominal = OperatingPoint::nominal();
  OperatingPoint low_power = OperatingPoint::low_power();
  xfer::LinkTable links = xfer::LinkTable::defaults();
  timing::NeurekaParams neureka;
  timing::KernelPower power;
  mem::ArbiterConfig arbiter;

  double l1_weight_read_energy = 0.3e-12;  // J/bit, accelerator reading weights from L1
  double mram_l2_read_energy = 2.0e-12;    // J/bit, MRAM read through the narrow L2 port
  double idle_fraction = 0.3;              // of peak power while waiting on transfers
  double sleep_power = 0.015;              // W, between frames
  std::uint64_t miss_service_cycles = 200;
  std::uint64_t l1_capacity = 256 * 1024;  // bytes
  double regime_threshold = 1.2;

  /// Provenance of every key.
  std::map<std::string, Provenance> provenance = builtin_provenance();

  const OperatingPoint& opp(const std::string& name) const;
  Provenance provenance_of(const std::string& key) const;
  /// Throws InvalidConfig on unknown keys.
  void set_provenance(const std::string& key, Provenance p);

  bool operator==(const CalibrationSet&) const = default;
};

/// Keys accepted in calibration files, in emission order.
const std::vector<std::string>& calibration_keys();

/// Parses `key = value unit # provenance` lines. Throws ParseError.
CalibrationSet load_calibration(std::istream& is, const std::string& source = "<stream>");
CalibrationSet load_calibration(const std::filesystem::path& path);

void emit_calibration(std::ostream& os, const CalibrationSet& cal);
void emit_calibration(const std::filesystem::path& path, const CalibrationSet& cal);

/// Value of a key as text (17 significant digits for reals).
std::string calibration_value(const CalibrationSet& cal, const std::string& key);
/// Sets a key from text. Throws InvalidConfig on unknown keys or bad values.
void set_calibration_value(CalibrationSet& cal, const std::string& key, const std::string& value);

}  // namespace nemsim
