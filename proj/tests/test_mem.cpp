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

#include <doctest.h>

#include <random>

#include "nemsim/error.hpp"
#include "nemsim/memory_level.hpp"
#include "nemsim/mram_port.hpp"
#include "nemsim/tcdm_arbiter.hpp"

using namespace nemsim;
using namespace nemsim::mem;

namespace {

std::vector<std::uint64_t> same_bank_words(int n, int bank, int banks, std::uint64_t base) {
  std::vector<std::uint64_t> w;
  for (int i = 0; i < n; ++i) w.push_back(base + (static_cast<std::uint64_t>(i) * banks + bank) * 4);
  return w;
}

}  // namespace

TEST_SUITE("mem") {
  TEST_CASE("port cycles") {
    CHECK(port_cycles(default_level(LevelId::L1_TCDM), 0) == 1);
    CHECK(port_cycles(default_level(LevelId::L1_TCDM), 36) == 2);
    CHECK(port_cycles(default_level(LevelId::L1_TCDM), 37) == 3);
    CHECK(port_cycles(default_level(LevelId::MRAM_WEIGHT), 1024) == 9 + 32);
    CHECK(default_level(LevelId::L1_TCDM).banks == 16);
    CHECK_FALSE(default_level(LevelId::MRAM_WEIGHT).writable_at_runtime);
    CHECK(default_level(LevelId::MRAM_WEIGHT).read_latency == 9);
  }

  TEST_CASE("MRAM streams") {
    CHECK(mram_stream(32).total_cycles == 10);
    CHECK(mram_stream(580608 / 8).total_cycles == 9 + 2268);
    CHECK(mram_stream(1).total_cycles == 10);
    CHECK(mram_stream(33).total_cycles == 11);
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> split{{0, 64}, {64, 64}, {1024, 32}};
    CHECK(mram_access_cycles(split) == (9 + 4) + (9 + 1));
  }

  TEST_CASE("cycle-stepped MRAM port agrees with the closed form") {
    const MramPortModel model;
    for (std::uint64_t n : {1u, 2u, 3u, 7u, 64u, 2268u}) {
      std::vector<std::uint64_t> a;
      for (std::uint64_t i = 0; i < n; ++i) a.push_back(4096 + 32 * i);
      auto arr = model.run(a);
      CHECK(arr.front() == 9);
      for (std::size_t i = 1; i < arr.size(); ++i) REQUIRE(arr[i] == arr[i - 1] + 1);
      CHECK(model.total_cycles(a) == mram_stream(n * 32).total_cycles);
    }
    std::mt19937 rng(4);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> ext;
      std::vector<std::uint64_t> words;
      std::uint64_t addr = 0;
      const int pieces = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int p = 0; p < pieces; ++p) {
        if (std::uniform_int_distribution<int>(0, 1)(rng)) addr += 32 * std::uniform_int_distribution<int>(1, 50)(rng);
        const int n = std::uniform_int_distribution<int>(1, 40)(rng);
        ext.emplace_back(addr, 32u * n);
        for (int i = 0; i < n; ++i) words.push_back(addr + 32u * i);
        addr += 32u * n;
      }
      REQUIRE(model.total_cycles(words) == mram_access_cycles(ext));
    }
    std::vector<std::uint64_t> bad{3};
    CHECK_THROWS_AS(model.run(bad), InvalidConfig);
  }

  TEST_CASE("bandwidth identities at 360 MHz") {
    CHECK(peak_bandwidth(default_level(LevelId::MRAM_WEIGHT), 360e6) == doctest::Approx(92.16e9));
    CHECK(tcdm_aggregate_bandwidth(360e6) == doctest::Approx(184.32e9));
  }

  TEST_CASE("arbiter configuration") {
    ArbiterConfig c;
    CHECK_NOTHROW(c.validate());
    c.min_share_log = 0.3;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    CHECK_THROWS_AS(TcdmSimulator{c}, InvalidConfig);
    AccessTrace t{1, Branch::Logarithmic, 0, 12, {StridedDim{4, 4}, StridedDim{}, StridedDim{}}, 0};
    CHECK_THROWS_AS(t.word_addresses(), InvalidConfig);
    t.pattern[0].stride = 0;
    t.length = 16;
    CHECK_THROWS_AS(t.word_addresses(), InvalidConfig);
  }

  TEST_CASE("a lone stream never stalls") {
    std::mt19937 rng(2);
    for (int i = 0; i < 50; ++i) {
      AccessTrace t;
      t.branch = i % 2 ? Branch::Shallow : Branch::Logarithmic;
      t.start_address = 4 * std::uniform_int_distribution<std::uint64_t>(0, 100)(rng);
      t.pattern[0] = {std::uniform_int_distribution<std::uint32_t>(1, 20)(rng), 4};
      t.pattern[1] = {std::uniform_int_distribution<std::uint32_t>(1, 4)(rng), 4096};
      t.pattern[2] = {2, 65536};
      t.length = 4ull * t.pattern[0].count * t.pattern[1].count * t.pattern[2].count;
      std::vector<AccessTrace> v{t};
      auto r = tcdm_contention(v, ArbiterConfig{}, 100000);
      REQUIRE(r.streams[0].finished);
      REQUIRE(r.streams[0].stall_cycles == 0);
      REQUIRE(r.streams[0].served_words == t.length / 4);
      REQUIRE(r.streams[0].max_words_per_cycle <= (t.branch == Branch::Shallow ? 9u : 1u));
    }
  }

  TEST_CASE("eight cores on one bank rotate round-robin") {
    TcdmSimulator sim(ArbiterConfig{});
    for (int i = 0; i < 8; ++i) sim.add_master(i, Branch::Logarithmic, same_bank_words(20, 0, 16, 0x10000u * i));
    sim.record_grants(true);
    auto r = sim.run(1000);
    for (const auto& s : r.streams) {
      CHECK(s.served_words == 20);
      CHECK(s.max_wait == 7);
    }
    // master i is granted in cycles i, i+8, i+16, ...
    CHECK(r.streams[3].finish_cycle == 3 + 19 * 8 + 1);
  }

  TEST_CASE("every busy bank grants exactly once per cycle") {
    std::mt19937 rng(6);
    for (int t = 0; t < 100; ++t) {
      TcdmSimulator sim(ArbiterConfig{}, 4, 4);
      int words = 0;
      for (int m = 0; m < 4; ++m) {
        std::vector<std::uint64_t> w;
        const int n = std::uniform_int_distribution<int>(1, 30)(rng);
        for (int i = 0; i < n; ++i) w.push_back(0x1000u * m + 4u * i);
        words += n;
        sim.add_master(m, m % 2 ? Branch::Shallow : Branch::Logarithmic, w);
      }
      sim.record_grants(true);
      auto r = sim.run(10000);
      int granted = 0;
      for (auto g : r.grants_per_cycle) {
        REQUIRE(g[0] + g[1] >= 1);
        REQUIRE(g[0] + g[1] <= 4);
        granted += g[0] + g[1];
      }
      REQUIRE(granted == words);
    }
  }

  TEST_CASE("saturated branches receive their shares") {
    for (double log_share : {0.1, 0.25, 0.5}) {
      ArbiterConfig cfg{1.0 - log_share, log_share, Branch::Shallow};
      TcdmSimulator sim(cfg, 1, 1);
      sim.add_master(0, Branch::Logarithmic, same_bank_words(3000, 0, 1, 0));
      sim.add_master(1, Branch::Shallow, same_bank_words(3000, 0, 1, 0x100000));
      sim.record_grants(true);
      auto r = sim.run(2000);
      const auto& g = r.grants_per_cycle;
      for (std::size_t w : {100u, 137u, 500u}) {
        for (std::size_t s = 0; s + w <= g.size(); s += 7) {
          int lg = 0, sh = 0;
          for (std::size_t c = s; c < s + w; ++c) lg += g[c][0], sh += g[c][1];
          REQUIRE(lg >= static_cast<int>(std::floor(log_share * static_cast<double>(w))) - 1);
          REQUIRE(sh >= static_cast<int>(std::floor((1.0 - log_share) * static_cast<double>(w))) - 1);
        }
      }
    }
  }

  TEST_CASE("sampled starvation bound on two banks") {
    std::mt19937 rng(10);
    const ArbiterConfig cfg;
    for (int t = 0; t < 20000; ++t) {
      TcdmSimulator sim(cfg, 2, 9);
      for (int m = 0; m < 3; ++m) {
        std::vector<std::uint64_t> w;
        for (int i = 0; i < 8; ++i) w.push_back(0x1000u * m + (2u * i + (rng() & 1)) * 4);
        sim.add_master(m, m < 2 ? Branch::Logarithmic : Branch::Shallow, w);
      }
      auto r = sim.run(1000);
      for (int m = 0; m < 3; ++m) REQUIRE(r.streams[static_cast<std::size_t>(m)].finished);
      REQUIRE(r.streams[0].max_wait < 12);
      REQUIRE(r.streams[1].max_wait < 12);
      REQUIRE(r.streams[2].max_wait < 6);
    }
  }
}
