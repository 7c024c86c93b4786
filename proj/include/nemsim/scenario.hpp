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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nemsim/memory_level.hpp"
#include "nemsim/neureka_timing.hpp"

namespace nemsim {

enum class ScenarioId { L3Flash, L3MRAM, L2MRAM, L1MRAM };

inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::L3Flash, ScenarioId::L3MRAM, ScenarioId::L2MRAM,
                                               ScenarioId::L1MRAM};

std::string_view to_string(ScenarioId id);
/// Accepts the CLI spellings (l3flash, ...) and the display names (L3Flash, ...).
std::optional<ScenarioId> parse_scenario(std::string_view text);

/// Where the weights live and which links carry them to the accelerator.
struct ScenarioConfig {
  ScenarioId id = ScenarioId::L3Flash;
  mem::MemoryLevel weight_store;
  std::vector<std::string> weight_path;      // ordered, store side first
  std::vector<std::string> activation_path;  // L2 <-> L1
  bool paging = false;

  static ScenarioConfig make(ScenarioId id);

  /// Accelerator weight source: the wide port for L1MRAM, the L1 copy otherwise.
  timing::WeightSource weight_source() const;
  /// Link that stages weights into L2 once per layer, if any.
  std::optional<std::string> staging_link() const;
  /// Whether weights cross the cluster DMA into L1.
  bool weights_through_l1() const { return weight_source() == timing::WeightSource::L1; }
};

}  // namespace nemsim
