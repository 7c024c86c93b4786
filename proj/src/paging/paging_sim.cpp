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

#include "nemsim/paging_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>

#include "nemsim/error.hpp"

namespace nemsim::paging {
namespace {

constexpr std::uint32_t kInFlux = UINT32_MAX;

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Hit:
      return "hit";
    case EventKind::Miss:
      return "miss";
    case EventKind::SwapStart:
      return "swap_start";
    case EventKind::SwapDone:
      return "swap_done";
  }
  return "?";
}

PageState boot_state(std::uint64_t weight_space) {
  PageState st;
  if (weight_space > 0) st.page_reg_a = 0;
  if (weight_space > kPageBytes) st.page_reg_b = 1;
  return st;
}

std::uint64_t swap_cycles(const xfer::Link& link, const OperatingPoint& opp, std::uint64_t service_cycles) {
  const double t = xfer::transfer_time(link, kPageBytes, opp);
  return service_cycles + static_cast<std::uint64_t>(std::ceil(t * opp.cluster_freq - 1e-6));
}

std::optional<std::uint32_t> proactive_choice(std::span<const std::uint32_t> pages, std::size_t i, const PageState& st) {
  if (st.pending || i >= pages.size()) return std::nullopt;
  const std::uint32_t cur = pages[i];
  if (!st.resident(cur)) return std::nullopt;  // the miss path loads it
  if (st.page_reg_b == cur) return std::nullopt;
  std::size_t j = i + 1;
  while (j < pages.size() && st.resident(pages[j])) ++j;
  if (j == pages.size()) return std::nullopt;
  if (st.page_reg_b)
    for (std::size_t k = i + 1; k < j; ++k)
      if (pages[k] == *st.page_reg_b) return std::nullopt;
  return pages[j];
}

std::vector<PlannedSwap> proactive_swap(std::span<const std::uint32_t> pages, const PageState& initial) {
  std::vector<PlannedSwap> plan;
  PageState st = initial;
  st.pending.reset();
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (!st.resident(pages[i])) st.page_reg_b = pages[i];
    if (i == 0 || pages[i] != pages[i - 1]) {
      if (auto c = proactive_choice(pages, i, st)) {
        plan.push_back({i, *c});
        st.page_reg_b = *c;
      }
    }
  }
  return plan;
}

PagingRun simulate_paging(std::span<const ScheduleEntry> schedule, Policy policy, const PagingConfig& cfg) {
  PagingRun run;
  PageState st = boot_state(cfg.weight_space);
  // Physical contents tracked independently of the registers.
  std::uint32_t content_a = st.page_reg_a.value_or(kInFlux);
  std::uint32_t content_b = st.page_reg_b.value_or(kInFlux);
  std::vector<std::uint32_t> pages;
  pages.reserve(schedule.size());
  for (const auto& e : schedule) pages.push_back(e.page);

  std::uint64_t t = 0;
  auto land = [&](std::uint64_t now) {
    if (st.pending && st.pending->completion <= now) {
      content_b = st.pending->page;
      run.trace.push_back({st.pending->completion, EventKind::SwapDone, st.pending->page});
      st = retire_swap(st, now);
    }
  };
  auto start_swap = [&](std::uint32_t page, std::uint64_t now) {
    st.page_reg_b.reset();
    st.pending = PendingSwap{Region::B, page, now + cfg.swap_cycles};
    content_b = kInFlux;
    run.trace.push_back({now, EventKind::SwapStart, page});
    ++run.swaps;
  };

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& e = schedule[i];
    const std::uint64_t addr = std::uint64_t{e.page} * kPageBytes;
    land(t);
    if (policy == Policy::Proactive && (i == 0 || e.page != schedule[i - 1].page))
      if (auto c = proactive_choice(pages, i, st)) start_swap(*c, t);

    Mapping m = map_address(addr, st, cfg.weight_space);
    if (std::holds_alternative<Miss>(m)) {
      run.trace.push_back({t, EventKind::Miss, e.page});
      const std::uint64_t stall_from = t;
      if (st.pending && st.pending->page != e.page) {
        t = st.pending->completion;
        land(t);
      }
      MissOutcome out = handle_miss(st, addr, t, cfg.swap_cycles, cfg.weight_space);
      if (out.started_swap) start_swap(e.page, t);
      t = out.stall_end;
      land(t);
      run.total_stall += t - stall_from;
      run.max_single_stall = std::max(run.max_single_stall, t - stall_from);
      m = map_address(addr, st, cfg.weight_space);
    }
    const Hit h = std::get<Hit>(m);
    const std::uint32_t physical = h.region == Region::A ? content_a : content_b;
    if (physical != e.page) ++run.wrong_page_reads;
    run.trace.push_back({t, EventKind::Hit, e.page});
    t += e.read_cycles;
  }
  land(t);
  run.finish_cycle = t;
  std::stable_sort(run.trace.begin(), run.trace.end(), [](const TraceEvent& a, const TraceEvent& b) { return a.cycle < b.cycle; });
  return run;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceEvent>& trace) {
  os << "cycle,event,page\n";
  for (const auto& e : trace) os << e.cycle << ',' << to_string(e.kind) << ',' << e.page << '\n';
}

PagedWeightStore::PagedWeightStore(std::vector<std::uint8_t> image, std::uint64_t swap_cycles)
    : image_(std::move(image)), swap_cycles_(swap_cycles) {
  st_ = boot_state(image_.size());
  auto page_copy = [&](std::uint32_t page) {
    std::vector<std::uint8_t> r(kPageBytes, 0);
    const std::uint64_t begin = std::uint64_t{page} * kPageBytes;
    const std::uint64_t n = std::min<std::uint64_t>(kPageBytes, image_.size() - begin);
    std::memcpy(r.data(), image_.data() + begin, n);
    return r;
  };
  if (st_.page_reg_a) region_a_ = page_copy(0);
  region_b_.assign(kPageBytes, 0);
  if (st_.page_reg_b) {
    region_b_ = page_copy(1);
    region_b_content_ = 1;
  }
}

void PagedWeightStore::land(std::uint64_t now) {
  if (!st_.pending || st_.pending->completion > now) return;
  const std::uint32_t page = st_.pending->page;
  const std::uint64_t begin = std::uint64_t{page} * kPageBytes;
  const std::uint64_t n = std::min<std::uint64_t>(kPageBytes, image_.size() - begin);
  std::fill(region_b_.begin(), region_b_.end(), std::uint8_t{0});
  std::memcpy(region_b_.data(), image_.data() + begin, n);
  region_b_content_ = page;
  st_ = retire_swap(st_, now);
}

bool PagedWeightStore::prefetch(std::uint32_t page, std::uint64_t now) {
  land(now);
  if (st_.pending || st_.resident(page)) return false;
  if (std::uint64_t{page} * kPageBytes >= image_.size()) throw AddressOutOfRange("prefetch beyond the weight space");
  st_.page_reg_b.reset();
  region_b_content_ = kInFlux;
  st_.pending = PendingSwap{Region::B, page, now + swap_cycles_};
  ++swaps_;
  return true;
}

std::uint64_t PagedWeightStore::read(std::uint64_t addr, std::span<std::uint8_t> out, std::uint64_t now) {
  if (out.empty()) return now;
  if (page_of(addr) != page_of(addr + out.size() - 1)) throw AddressOutOfRange("weight read straddles a page boundary");
  land(now);
  Mapping m = map_address(addr + out.size() - 1, st_, image_.size());
  if (std::holds_alternative<Miss>(m)) {
    if (st_.pending && st_.pending->page != page_of(addr)) {
      stall_ += st_.pending->completion - now;
      now = st_.pending->completion;
      land(now);
    }
    MissOutcome r = handle_miss(st_, addr, now, swap_cycles_, image_.size());
    if (r.started_swap) ++swaps_;
    stall_ += r.stall();
    st_.page_reg_b.reset();
    region_b_content_ = kInFlux;
    st_.pending = PendingSwap{Region::B, page_of(addr), r.stall_end};
    now = r.stall_end;
    land(now);
  }
  m = map_address(addr, st_, image_.size());
  const Hit h = std::get<Hit>(m);
  const std::vector<std::uint8_t>& region = h.region == Region::A ? region_a_ : region_b_;
  if (h.region == Region::B && region_b_content_ != page_of(addr)) throw Error("paging unit served a stale region");
  std::memcpy(out.data(), region.data() + h.offset, out.size());
  return now;
}

}  // namespace nemsim::paging
