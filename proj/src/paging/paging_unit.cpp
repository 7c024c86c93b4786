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

#include "nemsim/paging_unit.hpp"

#include <string>

#include "nemsim/error.hpp"

namespace nemsim::paging {

void PageState::validate() const {
  if (page_reg_a && page_reg_b && *page_reg_a == *page_reg_b) throw InvalidConfig("both page registers hold the same page");
  if (pending && pending->target != Region::B) throw InvalidConfig("only the tile SRAM region may be swapped at runtime");
}

Mapping map_address(std::uint64_t addr, const PageState& st, std::uint64_t weight_space) {
  if (addr >= weight_space)
    throw AddressOutOfRange("weight address " + std::to_string(addr) + " beyond the " + std::to_string(weight_space) +
                            "-byte weight space");
  const std::uint32_t page = page_of(addr);
  const std::uint64_t offset = addr % kPageBytes;
  if (st.page_reg_a == page) return Hit{Region::A, offset};
  if (st.page_reg_b == page) return Hit{Region::B, offset};
  return Miss{page};
}

PageState retire_swap(PageState st, std::uint64_t now) {
  if (st.pending && st.pending->completion <= now) {
    st.page_reg_b = st.pending->page;
    st.pending.reset();
  }
  return st;
}

MissOutcome handle_miss(const PageState& st, std::uint64_t addr, std::uint64_t now, std::uint64_t swap_cycles,
                        std::uint64_t weight_space) {
  const Mapping m = map_address(addr, st, weight_space);
  if (std::holds_alternative<Hit>(m)) throw InvalidConfig("handle_miss called for a resident page");
  const std::uint32_t page = std::get<Miss>(m).page;
  MissOutcome out;
  out.stall_begin = now;
  PageState next = st;
  if (st.pending) {
    if (st.pending->page != page)
      throw SwapInProgress("page " + std::to_string(page) + " missed while page " + std::to_string(st.pending->page) +
                           " is being swapped in");
    out.stall_end = std::max(now, st.pending->completion);
  } else {
    next.page_reg_b.reset();
    next.pending = PendingSwap{Region::B, page, now + swap_cycles};
    out.stall_end = now + swap_cycles;
    out.started_swap = true;
  }
  out.state = retire_swap(next, out.stall_end);
  return out;
}

}  // namespace nemsim::paging
