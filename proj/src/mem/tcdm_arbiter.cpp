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

#include "nemsim/tcdm_arbiter.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "nemsim/error.hpp"

namespace nemsim::mem {
namespace {

constexpr std::int64_t kQuantum = 1'000'000;

}  // namespace

void ArbiterConfig::validate() const {
  if (min_share_log < 0 || min_share_shallow < 0) throw InvalidConfig("arbiter shares must be non-negative");
  if (min_share_log + min_share_shallow > 1.0 + 1e-12)
    throw InvalidConfig("arbiter shares sum to " + std::to_string(min_share_log + min_share_shallow) + ", above 1");
}

std::vector<std::uint64_t> AccessTrace::word_addresses() const {
  const std::uint64_t n = std::uint64_t{pattern[0].count} * pattern[1].count * pattern[2].count;
  if (length != 4 * n) throw InvalidConfig("trace " + std::to_string(stream_id) + ": length does not match its pattern");
  std::vector<std::uint64_t> out;
  out.reserve(n);
  std::set<std::uint64_t> seen;
  for (std::uint32_t k = 0; k < pattern[2].count; ++k)
    for (std::uint32_t j = 0; j < pattern[1].count; ++j)
      for (std::uint32_t i = 0; i < pattern[0].count; ++i) {
        const std::int64_t a = static_cast<std::int64_t>(start_address) + i * pattern[0].stride + j * pattern[1].stride +
                               k * pattern[2].stride;
        if (a < 0 || a % 4) throw InvalidConfig("trace " + std::to_string(stream_id) + ": unaligned or negative address");
        if (!seen.insert(static_cast<std::uint64_t>(a)).second)
          throw InvalidConfig("trace " + std::to_string(stream_id) + ": pattern revisits a word");
        out.push_back(static_cast<std::uint64_t>(a));
      }
  return out;
}

TcdmSimulator::TcdmSimulator(const ArbiterConfig& cfg, int banks, int shallow_window_words)
    : cfg_(cfg), banks_(banks), window_words_(shallow_window_words) {
  cfg_.validate();
  if (banks_ <= 0 || window_words_ <= 0) throw InvalidConfig("arbiter needs at least one bank and one window word");
}

int TcdmSimulator::add_master(int stream_id, Branch branch, std::vector<std::uint64_t> words, std::uint64_t issue_cycle) {
  Master m{stream_id, branch, std::move(words), issue_cycle, 0, {}, {}, {}};
  masters_.push_back(std::move(m));
  return static_cast<int>(masters_.size()) - 1;
}

void TcdmSimulator::open_window(Master& m, std::uint64_t cycle) const {
  m.window.clear();
  m.since.clear();
  m.granted.clear();
  if (m.next >= m.words.size()) return;
  const int limit = m.branch == Branch::Logarithmic ? 1 : std::min(window_words_, banks_);
  std::vector<bool> used(static_cast<std::size_t>(banks_), false);
  while (m.next < m.words.size() && static_cast<int>(m.window.size()) < limit) {
    if (!m.window.empty() && m.words[m.next] != m.words[m.window.back()] + 4) break;
    const int b = bank_of(m.words[m.next], banks_);
    if (used[static_cast<std::size_t>(b)]) break;
    used[static_cast<std::size_t>(b)] = true;
    m.window.push_back(m.next);
    m.since.push_back(cycle);
    m.granted.push_back(false);
    ++m.next;
  }
}

ContentionResult TcdmSimulator::run(std::uint64_t horizon) {
  ContentionResult res;
  const std::size_t nm = masters_.size();
  res.streams.resize(nm);
  res.banks.resize(static_cast<std::size_t>(banks_));
  for (std::size_t i = 0; i < nm; ++i) res.streams[i].stream_id = masters_[i].stream_id;

  const auto nb = static_cast<std::size_t>(banks_);
  std::vector<std::array<std::size_t, 2>> rr(nb, {0, 0});  // next master to favour, per branch
  std::vector<std::array<std::int64_t, 2>> deficit(nb, {0, 0});
  const std::array<std::int64_t, 2> share{static_cast<std::int64_t>(std::llround(cfg_.min_share_log * kQuantum)),
                                          static_cast<std::int64_t>(std::llround(cfg_.min_share_shallow * kQuantum))};
  const int prio = cfg_.priority == Branch::Shallow ? 1 : 0;

  std::vector<bool> started(nm, false);
  // requests[bank][branch] = list of (master, window slot)
  std::vector<std::array<std::vector<std::pair<std::size_t, std::size_t>>, 2>> req(nb);
  std::vector<std::uint32_t> grants_now(nm);

  std::uint64_t cycle = 0;
  for (; cycle < horizon; ++cycle) {
    bool active = false;
    for (auto& r : req) r[0].clear(), r[1].clear();
    for (std::size_t i = 0; i < nm; ++i) {
      Master& m = masters_[i];
      if (m.words.empty() || cycle < m.issue_cycle) {
        if (!m.words.empty()) active = true;
        continue;
      }
      if (!started[i]) {
        started[i] = true;
        open_window(m, cycle);
      }
      if (m.window.empty()) continue;
      active = true;
      for (std::size_t s = 0; s < m.window.size(); ++s)
        if (!m.granted[s]) {
          const int b = bank_of(m.words[m.window[s]], banks_);
          req[static_cast<std::size_t>(b)][m.branch == Branch::Shallow ? 1 : 0].emplace_back(i, s);
        }
    }
    if (!active) break;

    std::fill(grants_now.begin(), grants_now.end(), 0);
    std::array<std::uint16_t, 2> branch_grants{0, 0};
    for (std::size_t b = 0; b < nb; ++b) {
      auto& r = req[b];
      if (r[0].empty() && r[1].empty()) continue;
      int winner;
      if (r[0].empty() || r[1].empty()) {
        winner = r[0].empty() ? 1 : 0;
      } else {
        res.banks[b].cycles += 1;
        auto& d = deficit[b];
        d[0] += share[0];
        d[1] += share[1];
        const bool owed0 = d[0] >= kQuantum, owed1 = d[1] >= kQuantum;
        if (owed0 && owed1)
          winner = d[0] == d[1] ? prio : (d[0] > d[1] ? 0 : 1);
        else if (owed0 || owed1)
          winner = owed0 ? 0 : 1;
        else
          winner = prio;
        d[static_cast<std::size_t>(winner)] = std::max<std::int64_t>(d[static_cast<std::size_t>(winner)] - kQuantum, 0);
        res.banks[b].grants[static_cast<std::size_t>(winner)] += 1;
      }
      // Round-robin among the winning branch's masters.
      auto& cands = r[static_cast<std::size_t>(winner)];
      auto& ptr = rr[b][static_cast<std::size_t>(winner)];
      const auto* pick = &cands.front();
      std::size_t best = nm;
      for (const auto& c : cands) {
        const std::size_t dist = (c.first + nm - ptr) % nm;
        if (dist < best) best = dist, pick = &c;
      }
      Master& m = masters_[pick->first];
      m.granted[pick->second] = true;
      auto& st = res.streams[pick->first];
      st.served_words += 1;
      st.max_wait = std::max(st.max_wait, cycle - m.since[pick->second]);
      grants_now[pick->first] += 1;
      ptr = (pick->first + 1) % nm;
      branch_grants[static_cast<std::size_t>(winner)] += 1;
    }
    if (record_) res.grants_per_cycle.push_back(branch_grants);

    for (std::size_t i = 0; i < nm; ++i) {
      Master& m = masters_[i];
      if (!started[i] || m.window.empty()) continue;
      auto& st = res.streams[i];
      st.max_words_per_cycle = std::max(st.max_words_per_cycle, grants_now[i]);
      if (std::all_of(m.granted.begin(), m.granted.end(), [](bool g) { return g; })) {
        open_window(m, cycle + 1);
        if (m.window.empty()) {
          st.finished = true;
          st.finish_cycle = cycle + 1;
        }
      } else {
        st.stall_cycles += 1;
      }
    }
  }
  res.cycles = cycle;
  return res;
}

ContentionResult tcdm_contention(std::span<const AccessTrace> traces, const ArbiterConfig& cfg, std::uint64_t horizon, int banks) {
  TcdmSimulator sim(cfg, banks);
  for (const auto& t : traces) sim.add_master(t.stream_id, t.branch, t.word_addresses(), t.issue_cycle);
  return sim.run(horizon);
}

}  // namespace nemsim::mem
