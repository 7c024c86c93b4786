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

#include "nemsim/pipeline_replay.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "nemsim/error.hpp"

namespace nemsim::sched {

double analytic_latency(const std::vector<StageTimes>& steps) {
  if (steps.empty()) return 0.0;
  // While tile i computes, the DMA brings in tile i+1 and drains tile i-1.
  const std::size_t n = steps.size();
  double t = steps.front().staging + steps.front().load;
  for (std::size_t i = 0; i < n; ++i) {
    const double next_load = i + 1 < n ? steps[i + 1].load : 0.0;
    const double next_staging = i + 1 < n ? steps[i + 1].staging : 0.0;
    const double prev_store = i > 0 ? steps[i - 1].store : 0.0;
    t += std::max({steps[i].compute, next_load + prev_store, next_staging});
  }
  return t + steps.back().store;
}

double fill_period(const std::vector<StageTimes>& steps) {
  double m = 0.0;
  for (const StageTimes& s : steps) m = std::max(m, s.staging + s.load + s.compute + s.store);
  return m;
}

double event_latency(const std::vector<StageTimes>& steps) {
  const std::size_t n = steps.size();
  if (n == 0) return 0.0;
  using Slot = std::optional<double>;
  std::vector<Slot> staged(n), loaded(n), computed(n), stored(n);
  std::size_t next_stage = 0, next_load = 0, next_compute = 0, next_store = 0;
  double link_free = 0.0, dma_free = 0.0, pe_free = 0.0;

  // Buffer i%2 at a level is reusable once tile i-2 has left it.
  auto freed = [](const std::vector<Slot>& v, std::size_t i) -> Slot {
    if (i < 2) return 0.0;
    return v[i - 2];
  };

  while (next_store < n) {
    if (next_stage < n) {
      if (Slot f = freed(loaded, next_stage)) {
        double start = std::max(link_free, *f);
        staged[next_stage] = link_free = start + steps[next_stage].staging;
        ++next_stage;
        continue;
      }
    }
    if (next_compute < n && loaded[next_compute]) {
      if (Slot f = freed(stored, next_compute)) {
        double start = std::max({pe_free, *loaded[next_compute], *f});
        computed[next_compute] = pe_free = start + steps[next_compute].compute;
        ++next_compute;
        continue;
      }
    }
    // DMA: the transfer that can start first wins; among equal starts the older request
    // goes first, and a load beats a store requested at the same instant.
    Slot load_ready, store_ready;
    if (next_load < n && staged[next_load]) {
      if (Slot f = freed(computed, next_load)) load_ready = std::max(*staged[next_load], *f);
    }
    if (next_store < next_compute) store_ready = *computed[next_store];
    if (!load_ready && !store_ready) throw Error("event replay deadlocked");
    bool take_store = store_ready && !load_ready;
    if (store_ready && load_ready) {
      const double s_start = std::max(*store_ready, dma_free), l_start = std::max(*load_ready, dma_free);
      take_store = s_start < l_start || (s_start == l_start && *store_ready < *load_ready);
    }
    if (take_store) {
      double start = std::max(dma_free, *store_ready);
      stored[next_store] = dma_free = start + steps[next_store].store;
      ++next_store;
    } else {
      double start = std::max(dma_free, *load_ready);
      loaded[next_load] = dma_free = start + steps[next_load].load;
      ++next_load;
    }
  }
  double end = 0.0;
  for (const Slot& s : stored) end = std::max(end, *s);
  return end;
}

}  // namespace nemsim::sched
