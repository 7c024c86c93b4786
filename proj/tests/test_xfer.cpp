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

#include "nemsim/error.hpp"
#include "nemsim/link.hpp"

using namespace nemsim;
using namespace nemsim::xfer;

TEST_SUITE("xfer") {
  TEST_CASE("cluster DMA examples") {
    const auto t = LinkTable::defaults();
    const auto nom = OperatingPoint::nominal();
    const Link& dma = t.get(links::kClusterDma);
    CHECK(dma.bandwidth(nom) == doctest::Approx(64 * 360e6));
    CHECK(dma.bandwidth(nom) == doctest::Approx(23.04e9));
    const double setup = 50 / 360e6;
    CHECK(transfer_time(dma, 1u << 20, nom) == doctest::Approx(setup + 8388608.0 / 23.04e9));
    CHECK(transfer_time(dma, 0, nom) == doctest::Approx(setup));
    CHECK(transfer_energy(dma, 0) == 0.0);
  }

  TEST_CASE("off-chip and MRAM energies") {
    auto t = LinkTable::defaults();
    // 3,469,760 one-byte weights
    CHECK(t.transfer_energy(links::kHyperbus, 3469760) == doctest::Approx(2.08e-3).epsilon(0.01));
    CHECK(t.get(links::kMramPort).energy_per_bit == doctest::Approx(0.75e-12).epsilon(0.01));
    CHECK(t.get(links::kMramPort).bandwidth(OperatingPoint::nominal()) == doctest::Approx(92.16e9));
  }

  TEST_CASE("unknown links") {
    auto t = LinkTable::defaults();
    CHECK_THROWS_AS(t.get("warp"), UnknownLink);
    CHECK_THROWS_AS(t.transfer_time("warp", 1, OperatingPoint::nominal()), UnknownLink);
    CHECK_THROWS_AS(t.transfer_energy("warp", 1), UnknownLink);
    Link bad{"x"};
    CHECK_THROWS_AS(t.add(bad), InvalidConfig);
  }

  TEST_CASE("additivity, linearity and clock scaling") {
    const auto t = LinkTable::defaults();
    const auto nom = OperatingPoint::nominal();
    auto half = nom;
    half.cluster_freq /= 2;
    half.mram_freq /= 2;
    for (const auto& name : t.names()) {
      const Link& l = t.get(name);
      for (std::uint64_t a : {0ull, 1ull, 4096ull, 123457ull}) {
        for (std::uint64_t b : {0ull, 77ull, 1ull << 22}) {
          REQUIRE(transfer_energy(l, a + b) == doctest::Approx(transfer_energy(l, a) + transfer_energy(l, b)));
        }
        const std::uint64_t n = a + 1000;
        REQUIRE(transfer_time(l, 2 * n, nom) - transfer_time(l, n, nom) == doctest::Approx(n * 8.0 / l.bandwidth(nom)));
      }
      const std::uint64_t big = 1ull << 24;
      const double t_nom = transfer_time(l, big, nom) - l.setup_cycles / nom.cluster_freq;
      const double t_half = transfer_time(l, big, half) - l.setup_cycles / half.cluster_freq;
      if (l.scales_with_cluster)
        REQUIRE(t_half == doctest::Approx(2 * t_nom));
      else
        REQUIRE(t_half == doctest::Approx(t_nom));
    }
  }
}
