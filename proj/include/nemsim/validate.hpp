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
#include <vector>

#include "nemsim/calibration.hpp"
#include "nemsim/tcdm_arbiter.hpp"

namespace nemsim::validate {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// conv_neureka against the reference convolution plus requantization on random layers
/// covering every mode, qw in {2, 3, 4, 8}, strides 1 and 2, with and without padding.
CheckResult conv_equivalence(std::uint64_t seed, int cases);

/// Closed-form pipeline latency against the event replay on tile schedules of random layers,
/// scenarios and operating points.
CheckResult pipeline_replay(std::uint64_t seed, int schedules, const CalibrationSet& cal);

/// Every bank pattern of `length` words for two logarithmic masters and one shallow master
/// on two banks. Checks completion, a bounded wait and the per-bank share of contended cycles.
CheckResult arbiter_exhaustive(const mem::ArbiterConfig& cfg, int length = 8);

/// Random page schedules: no wrong-page read, and proactive never stalls longer than reactive.
CheckResult paging_schedules(std::uint64_t seed, int schedules);

struct PagedNetworkResult {
  bool outputs_match = false;
  std::uint64_t swaps = 0;
  std::uint64_t stall = 0;
};

/// Three 2048->2048 8-bit pointwise layers (4 MiB of weights each) on a 1x1 input.
/// Weights sit in pages 1, 0 and 2 and are read block by block through the paging unit.
PagedNetworkResult run_paged_network(std::uint64_t seed, std::uint64_t swap_cycles, bool proactive);

CheckResult paged_network(std::uint64_t seed);

struct Options {
  std::uint64_t seed = 1;
  int conv_cases = 1000;
  int replay_schedules = 200;
  int paging_schedules = 10000;
  bool exhaustive_arbiter = true;
};

std::vector<CheckResult> run_all(const Options& opt, const CalibrationSet& cal);

}  // namespace nemsim::validate
