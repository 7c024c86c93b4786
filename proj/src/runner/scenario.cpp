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

#include "nemsim/scenario.hpp"

#include <algorithm>
#include <cctype>

#include "nemsim/error.hpp"
#include "nemsim/link.hpp"

namespace nemsim {

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::L3Flash: return "L3Flash";
    case ScenarioId::L3MRAM: return "L3MRAM";
    case ScenarioId::L2MRAM: return "L2MRAM";
    case ScenarioId::L1MRAM: return "L1MRAM";
  }
  return "?";
}

std::optional<ScenarioId> parse_scenario(std::string_view text) {
  std::string low(text);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  for (ScenarioId id : kAllScenarios) {
    std::string name(to_string(id));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (name == low) return id;
  }
  return std::nullopt;
}

ScenarioConfig ScenarioConfig::make(ScenarioId id) {
  using namespace xfer::links;
  ScenarioConfig sc;
  sc.id = id;
  sc.activation_path = {kClusterDma};
  switch (id) {
    case ScenarioId::L3Flash:
      sc.weight_store = mem::default_level(mem::LevelId::L3_FLASH);
      sc.weight_path = {kHyperbus, kClusterDma};
      break;
    case ScenarioId::L3MRAM:
      sc.weight_store = mem::default_level(mem::LevelId::MRAM_WEIGHT);
      sc.weight_path = {kL3Mram, kClusterDma};
      break;
    case ScenarioId::L2MRAM:
      sc.weight_store = mem::default_level(mem::LevelId::MRAM_WEIGHT);
      sc.weight_path = {kClusterDma};
      break;
    case ScenarioId::L1MRAM:
      sc.weight_store = mem::default_level(mem::LevelId::MRAM_WEIGHT);
      sc.weight_path = {kMramPort};
      break;
  }
  return sc;
}

timing::WeightSource ScenarioConfig::weight_source() const {
  return weight_path.size() == 1 && weight_path.front() == xfer::links::kMramPort ? timing::WeightSource::Mram
                                                                                    : timing::WeightSource::L1;
}

std::optional<std::string> ScenarioConfig::staging_link() const {
  if (weight_path.size() < 2) return std::nullopt;
  return weight_path.front();
}

}  // namespace nemsim
