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

#include "nemsim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nemsim/conv.hpp"
#include "nemsim/paging_sim.hpp"
#include "nemsim/error.hpp"
#include "nemsim/pipeline_replay.hpp"
#include "nemsim/tile_scheduler.hpp"
#include "nemsim/weight_packing.hpp"

namespace nemsim::validate {

namespace {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

qnn::QTensor random_tensor(Rng& rng, int h, int w, int c) {
  qnn::QTensor t(h, w, c);
  for (auto& v : t.data) v = static_cast<std::uint8_t>(uniform(rng, 0, 255));
  return t;
}

std::vector<std::int8_t> random_weights(Rng& rng, const qnn::LayerSpec& s) {
  std::vector<std::int8_t> w(s.weight_count());
  for (auto& v : w) v = static_cast<std::int8_t>(uniform(rng, s.weight_min(), s.weight_max()));
  return w;
}

qnn::RequantParams random_requant(Rng& rng, int c) {
  qnn::RequantParams p;
  for (int i = 0; i < c; ++i) {
    p.scale.push_back(static_cast<std::uint32_t>(uniform(rng, 1, 300)));
    p.bias.push_back(uniform(rng, -50000, 50000));
    p.shift.push_back(static_cast<std::uint8_t>(uniform(rng, 0, 20)));
  }
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CheckResult conv_equivalence(std::uint64_t seed, int cases) {
  Rng rng(seed);
  const qnn::ConvMode modes[] = {qnn::ConvMode::Dense3x3, qnn::ConvMode::Depthwise3x3, qnn::ConvMode::Pointwise1x1};
  const int qws[] = {2, 3, 4, 8};
  int mismatches = 0;
  std::string first;
  for (int i = 0; i < cases; ++i) {
    qnn::LayerSpec s;
    s.mode = modes[i % 3];
    s.qw = qws[(i / 3) % 4];
    s.stride = 1 + (i / 12) % 2;
    s.padding = s.mode == qnn::ConvMode::Pointwise1x1 ? 0 : uniform(rng, 0, 1);
    s.c_in = uniform(rng, 1, 70);
    s.c_out = s.mode == qnn::ConvMode::Depthwise3x3 ? s.c_in : uniform(rng, 1, 70);
    s.raw_output = uniform(rng, 0, 9) == 0;
    if (!s.raw_output) s.requant = random_requant(rng, s.c_out);
    const int k = s.kernel_size();
    const int h = uniform(rng, std::max(1, k - 2 * s.padding), 13);
    const int w = uniform(rng, std::max(1, k - 2 * s.padding), 13);
    const qnn::QTensor x = random_tensor(rng, h, w, s.c_in);
    const auto raw = random_weights(rng, s);
    const qnn::ConvOutput got = qnn::conv_neureka(x, qnn::pack_weights(raw, s), s);
    const qnn::ConvOutput want = qnn::conv_ref_output(x, raw, s);
    if (got != want) {
      if (mismatches++ == 0)
        first = "case " + std::to_string(i) + " (" + std::string(qnn::to_string(s.mode)) + ", qw " +
                std::to_string(s.qw) + ", stride " + std::to_string(s.stride) + ")";
    }
  }
  CheckResult r{"conv bit-exactness", mismatches == 0,
                std::to_string(cases - mismatches) + "/" + std::to_string(cases) + " cases identical"};
  if (mismatches) r.detail += "; first mismatch " + first;
  return r;
}

CheckResult pipeline_replay(std::uint64_t seed, int schedules, const CalibrationSet& cal) {
  Rng rng(seed);
  const qnn::ConvMode modes[] = {qnn::ConvMode::Dense3x3, qnn::ConvMode::Depthwise3x3, qnn::ConvMode::Pointwise1x1};
  const int extents[] = {7, 14, 19, 28, 56, 112};
  int bad = 0, done = 0;
  double worst = 0.0;
  while (done < schedules) {
    sched::LayerShape layer;
    layer.name = "random" + std::to_string(done);
    layer.spec.mode = modes[uniform(rng, 0, 2)];
    layer.spec.qw = uniform(rng, 2, 8);
    layer.spec.stride = uniform(rng, 1, 2);
    layer.spec.padding = layer.spec.mode == qnn::ConvMode::Pointwise1x1 ? 0 : 1;
    layer.spec.c_in = uniform(rng, 3, 640);
    layer.spec.c_out = layer.spec.mode == qnn::ConvMode::Depthwise3x3 ? layer.spec.c_in : uniform(rng, 8, 640);
    layer.spec.raw_output = uniform(rng, 0, 9) == 0;
    layer.in_h = extents[uniform(rng, 0, 5)];
    layer.in_w = extents[uniform(rng, 0, 5)];
    const ScenarioConfig sc = ScenarioConfig::make(kAllScenarios[uniform(rng, 0, 3)]);
    const OperatingPoint& opp = uniform(rng, 0, 1) ? cal.nominal : cal.low_power;
    sched::TileSchedule ts;
    try {
      ts = sched::plan_tiles(layer, sc, cal);
    } catch (const Unschedulable&) {
      continue;
    }
    ++done;
    const auto steps = sched::stage_times(ts, sc, opp, cal);
    const double a = sched::analytic_latency(steps);
    const double e = sched::event_latency(steps);
    const double fill = sched::fill_period(steps);
    worst = std::max(worst, std::abs(a - e) / fill);
    if (std::abs(a - e) > fill * (1.0 + 1e-12)) ++bad;
  }
  return {"analytic/event equivalence", bad == 0,
          std::to_string(schedules - bad) + "/" + std::to_string(schedules) +
              " layer schedules within one fill period; worst gap " + fmt(worst) + " fill periods"};
}

CheckResult arbiter_exhaustive(const mem::ArbiterConfig& cfg, int length) {
  const std::uint64_t masters = 3;
  const std::uint64_t bits = masters * static_cast<std::uint64_t>(length);
  // Swapping the two banks maps patterns onto each other, so the first word stays on bank 0.
  const std::uint64_t patterns = std::uint64_t{1} << (bits - 1);
  const auto len = static_cast<std::uint64_t>(length);
  const double shares[2] = {cfg.min_share_log, cfg.min_share_shallow};
  std::uint64_t failures = 0, worst_log = 0, worst_shallow = 0;
  std::string first;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    mem::TcdmSimulator sim(cfg, 2, 9);
    for (std::uint64_t m = 0; m < masters; ++m) {
      std::vector<std::uint64_t> words;
      for (std::uint64_t i = 0; i < len; ++i) {
        const std::uint64_t bank = ((p << 1) >> (m * len + i)) & 1u;
        words.push_back(0x1000u * m + (2u * i + bank) * 4u);
      }
      sim.add_master(static_cast<int>(m), m < 2 ? mem::Branch::Logarithmic : mem::Branch::Shallow, std::move(words));
    }
    const auto r = sim.run(1000);
    bool ok = true;
    for (const auto& s : r.streams) ok = ok && s.finished;
    worst_log = std::max({worst_log, r.streams[0].max_wait, r.streams[1].max_wait});
    worst_shallow = std::max(worst_shallow, r.streams[2].max_wait);
    for (const auto& b : r.banks)
      for (int br = 0; br < 2; ++br)
        if (static_cast<double>(b.grants[static_cast<std::size_t>(br)]) <
            std::floor(shares[br] * static_cast<double>(b.cycles)) - 1.0)
          ok = false;
    if (!ok && failures++ == 0) first = std::to_string(p);
  }
  // Each branch is served within ceil(1 / share) rounds of every master.
  auto bound = [masters](double share) {
    return share > 0.0 ? static_cast<std::uint64_t>(std::ceil(1.0 / share)) * masters : ~std::uint64_t{0};
  };
  const bool bounded = worst_log <= bound(cfg.min_share_log) && worst_shallow <= bound(cfg.min_share_shallow);
  CheckResult r{"arbiter share and starvation", failures == 0 && bounded,
                std::to_string(patterns) + " patterns; worst wait " + std::to_string(worst_log) + " (log) / " +
                    std::to_string(worst_shallow) + " (shallow) cycles"};
  if (failures) r.detail += "; " + std::to_string(failures) + " violations, first pattern " + first;
  return r;
}

CheckResult paging_schedules(std::uint64_t seed, int schedules) {
  Rng rng(seed);
  int unsafe = 0, worse = 0;
  std::uint64_t saved = 0;
  for (int t = 0; t < schedules; ++t) {
    const int pages = uniform(rng, 1, 6);
    paging::PagingConfig cfg{static_cast<std::uint64_t>(pages) * paging::kPageBytes,
                             std::uniform_int_distribution<std::uint64_t>(1, 5000)(rng)};
    std::vector<paging::ScheduleEntry> s(static_cast<std::size_t>(uniform(rng, 1, 30)));
    for (auto& e : s) {
      e.page = static_cast<std::uint32_t>(uniform(rng, 0, pages - 1));
      e.read_cycles = std::uniform_int_distribution<std::uint64_t>(0, 6000)(rng);
    }
    const auto re = paging::simulate_paging(s, paging::Policy::Reactive, cfg);
    const auto pro = paging::simulate_paging(s, paging::Policy::Proactive, cfg);
    if (re.wrong_page_reads || pro.wrong_page_reads) ++unsafe;
    if (pro.total_stall > re.total_stall) ++worse;
    else saved += re.total_stall - pro.total_stall;
  }
  return {"paging safety and proactive stall", unsafe == 0 && worse == 0,
          std::to_string(schedules) + " schedules; " + std::to_string(unsafe) + " unsafe, " + std::to_string(worse) +
              " where proactive lost; " + std::to_string(saved) + " stall cycles saved"};
}

PagedNetworkResult run_paged_network(std::uint64_t seed, std::uint64_t swap_cycles, bool proactive) {
  Rng rng(seed);
  constexpr int kC = 2048;
  const std::uint32_t page_of_layer[3] = {1, 0, 2};
  std::vector<qnn::LayerSpec> specs(3);
  std::vector<std::vector<std::int8_t>> raw(3);
  std::vector<std::uint8_t> image(3 * paging::kPageBytes, 0);
  for (std::size_t l = 0; l < 3; ++l) {
    auto& s = specs[l];
    s.mode = qnn::ConvMode::Pointwise1x1;
    s.c_in = kC;
    s.c_out = kC;
    s.qw = 8;
    qnn::RequantParams p;
    for (int c = 0; c < kC; ++c) {
      p.scale.push_back(1);
      p.bias.push_back(uniform(rng, -2000, 2000));
      p.shift.push_back(10);
    }
    s.requant = p;
    raw[l] = random_weights(rng, s);
    const auto ws = qnn::pack_weights(raw[l], s);
    if (ws.blocks.size() * sizeof(qnn::WeightBlock) != paging::kPageBytes) return {};
    std::uint8_t* dst = image.data() + std::uint64_t{page_of_layer[l]} * paging::kPageBytes;
    for (const auto& b : ws.blocks)
      for (auto word : b)
        for (int k = 0; k < 8; ++k) *dst++ = static_cast<std::uint8_t>(word >> (8 * k));
  }

  paging::PagedWeightStore store(std::move(image), swap_cycles);
  const qnn::QTensor input = random_tensor(rng, 1, 1, kC);
  qnn::QTensor x = input, ref = input;
  std::uint64_t now = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    if (proactive && l == 1) store.prefetch(page_of_layer[2], now);
    qnn::WeightStream ws;
    ws.layout = {qnn::ConvMode::Pointwise1x1, kC, kC, 8};
    ws.blocks.resize(paging::kPageBytes / sizeof(qnn::WeightBlock));
    ws.bit_count = ws.blocks.size() * qnn::kBlockBits;
    const std::uint64_t base = std::uint64_t{page_of_layer[l]} * paging::kPageBytes;
    std::uint8_t buf[32];
    for (std::size_t b = 0; b < ws.blocks.size(); ++b) {
      now = store.read(base + 32 * b, buf, now) + 1;
      for (std::size_t w = 0; w < 4; ++w) {
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < 8; ++k) v |= std::uint64_t{buf[w * 8 + k]} << (8 * k);
        ws.blocks[b][w] = v;
      }
    }
    x = std::get<qnn::QTensor>(qnn::conv_neureka(x, ws, specs[l]));
    ref = std::get<qnn::QTensor>(qnn::conv_ref_output(ref, raw[l], specs[l]));
  }
  return {x == ref, store.swaps(), store.stall()};
}

CheckResult paged_network(std::uint64_t seed) {
  const auto fast = run_paged_network(seed, 100000, true);
  const auto slow = run_paged_network(seed + 1, 400000, false);
  const bool ok = fast.outputs_match && slow.outputs_match && fast.swaps == 1 && slow.swaps == 1;
  return {"12 MiB paged network", ok,
          std::string("outputs ") + (fast.outputs_match && slow.outputs_match ? "match" : "differ") +
              "; proactive stall " + std::to_string(fast.stall) + ", reactive stall " + std::to_string(slow.stall) +
              " cycles"};
}

std::vector<CheckResult> run_all(const Options& opt, const CalibrationSet& cal) {
  std::vector<CheckResult> out;
  out.push_back(conv_equivalence(opt.seed, opt.conv_cases));
  out.push_back(pipeline_replay(opt.seed + 1, opt.replay_schedules, cal));
  if (opt.exhaustive_arbiter) out.push_back(arbiter_exhaustive(cal.arbiter));
  out.push_back(paging_schedules(opt.seed + 2, opt.paging_schedules));
  out.push_back(paged_network(opt.seed + 3));
  return out;
}

}  // namespace nemsim::validate
