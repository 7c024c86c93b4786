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

#include <vector>

namespace nemsim::sched {

/// Durations (seconds) of the four stages one tile passes through.
struct StageTimes {
  double staging = 0.0;  // weight store -> L2
  double load = 0.0;     // L2 -> L1, inputs and weights
  double compute = 0.0;
  double store = 0.0;  // L1 -> L2, outputs
};

/// Pipeline fill plus the slowest stage of every step plus the final drain.
/// Step i computes tile i while the links move tile i+1 in and tile i-1 out.
double analytic_latency(const std::vector<StageTimes>& steps);

/// Discrete-event replay with two buffers at every level and one shared DMA engine.
double event_latency(const std::vector<StageTimes>& steps);

/// Longest single-tile traversal of the pipeline.
double fill_period(const std::vector<StageTimes>& steps);

}  // namespace nemsim::sched
