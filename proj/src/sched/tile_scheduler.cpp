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

#include "nemsim/tile_scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <tuple>

#include "nemsim/error.hpp"
#include "nemsim/link.hpp"

namespace nemsim::sched {

using qnn::ConvMode;

namespace {

std::uint64_t u64(long v) { return static_cast<std::uint64_t>(v); }

std::uint64_t weight_bytes_for(const qnn::LayerSpec& spec, int c_out) {
  const long k = spec.kernel_size();
  const std::uint64_t bits = u64(c_out) * u64(spec.channels_per_filter()) * u64(k * k) * u64(spec.qw);
  return (bits + 7) / 8;
}

int output_element_bytes(const qnn::LayerSpec& spec) { return spec.raw_output ? 4 : 1; }

// Tile extents along one axis: the full extent, then multiples of the job size.
std::vector<int> extent_candidates(int full, int step) {
  std::vector<int> c{full};
  for (int v = (full - 1) / step * step; v > 0; v -= step) c.push_back(v);
  return c;
}

int strided_job(const qnn::LayerSpec& spec) {
  const int ext = timing::job_extent(spec.mode);
  return spec.stride > 1 ? std::max(1, ext / spec.stride) : ext;
}

// Receptive field of `n` outputs starting at `o`, clipped to [0, in).
int clipped_span(int o, int n, int in, const qnn::LayerSpec& spec) {
  const int lo = o * spec.stride - spec.padding;
  const int hi = (o + n - 1) * spec.stride - spec.padding + spec.kernel_size();
  return std::max(0, std::min(hi, in) - std::max(lo, 0));
}

double busy(const xfer::Link& link, std::uint64_t bytes, const OperatingPoint& opp) {
  return bytes == 0 ? 0.0 : xfer::transfer_time(link, bytes, opp);
}

}  // namespace

std::uint64_t TileSchedule::total_cycles() const {
  std::uint64_t c = 0;
  for (const Tile& t : tiles) c += t.compute.total;
  return c;
}

std::uint64_t halo_input_bytes(const LayerShape& layer, int row0, int col0, int h, int w, int c_in) {
  return u64(clipped_span(row0, h, layer.in_h, layer.spec)) * u64(clipped_span(col0, w, layer.in_w, layer.spec)) *
         u64(c_in);
}

TileSchedule plan_tiles(const LayerShape& layer, const ScenarioConfig& sc, const CalibrationSet& cal) {
  const qnn::LayerSpec& spec = layer.spec;
  spec.validate();
  const int oh = layer.out_h();
  const int ow = layer.out_w();
  if (oh <= 0 || ow <= 0) throw Unschedulable(layer.name, "empty output feature map");
  const bool dw = spec.mode == ConvMode::Depthwise3x3;
  const bool l1_weights = sc.weights_through_l1();
  const int k = spec.kernel_size();
  const int job = strided_job(spec);
  const int out_bytes = output_element_bytes(spec);

  std::vector<int> c_cands{spec.c_out};
  for (int c = (spec.c_out - 1) / kChannelStep * kChannelStep; c > 0; c -= kChannelStep) c_cands.push_back(c);

  auto footprint = [&](int h, int w, int c) {
    const std::uint64_t in = u64((h - 1) * spec.stride + k) * u64((w - 1) * spec.stride + k) * u64(dw ? c : spec.c_in);
    const std::uint64_t out = u64(h) * u64(w) * u64(c) * u64(out_bytes);
    const std::uint64_t wt = l1_weights ? weight_bytes_for(spec, c) : 0;
    return 2 * (in + out + wt);
  };

  // Largest area first, then taller, then more output channels.
  std::tuple<long, int, int> best{-1, 0, 0};
  TileDims dims;
  for (int h : extent_candidates(oh, job)) {
    for (int w : extent_candidates(ow, job)) {
      for (int c : c_cands) {
        if (footprint(h, w, c) > cal.l1_capacity) continue;
        std::tuple<long, int, int> key{static_cast<long>(h) * w, h, c};
        if (key > best) {
          best = key;
          dims = {h, w, dw ? c : spec.c_in, c};
        }
        break;
      }
    }
  }
  if (std::get<0>(best) < 0) {
    const int h = std::min(job, oh), w = std::min(job, ow), c = std::min(kChannelStep, spec.c_out);
    throw Unschedulable(layer.name, "smallest tile needs " + std::to_string(footprint(h, w, c)) + " bytes of L1, " +
                                        std::to_string(cal.l1_capacity) + " available");
  }

  const bool staged = sc.staging_link().has_value();
  const timing::WeightSource src = sc.weight_source();
  auto build = [&](TileDims dims) {
    TileSchedule ts;
    ts.layer = layer.name;
    ts.spec = spec;
    ts.scenario = sc.id;
    ts.in_h = layer.in_h;
    ts.in_w = layer.in_w;
    ts.out_h = oh;
    ts.out_w = ow;
    ts.tile = dims;
    ts.count_h = (oh + dims.h - 1) / dims.h;
    ts.count_w = (ow + dims.w - 1) / dims.w;
    ts.count_c = (spec.c_out + dims.c_out - 1) / dims.c_out;
    ts.l1_footprint = footprint(dims.h, dims.w, dims.c_out);

    for (int y = 0; y < oh; y += dims.h) {
      for (int x = 0; x < ow; x += dims.w) {
        for (int c = 0; c < spec.c_out; c += dims.c_out) {
          Tile t;
          t.row0 = y;
          t.col0 = x;
          t.c0 = c;
          t.dims.h = std::min(dims.h, oh - y);
          t.dims.w = std::min(dims.w, ow - x);
          t.dims.c_out = std::min(dims.c_out, spec.c_out - c);
          t.dims.c_in = dw ? t.dims.c_out : spec.c_in;
          // Dense and pointwise tiles at one position share their input.
          if (dw || c == 0) t.input_bytes = halo_input_bytes(layer, y, x, t.dims.h, t.dims.w, t.dims.c_in);
          t.output_bytes = u64(t.dims.h) * u64(t.dims.w) * u64(t.dims.c_out) * u64(out_bytes);
          t.weight_bytes = weight_bytes_for(spec, t.dims.c_out);
          if (l1_weights) t.weight_l1_bytes = t.weight_bytes;
          if (staged && y == 0 && x == 0) t.staging_bytes = t.weight_bytes;

          // The accelerator works on the stride-1 grid and keeps every stride-th output.
          timing::TaskDims task{(t.dims.h - 1) * spec.stride + 1, (t.dims.w - 1) * spec.stride + 1, t.dims.c_in,
                                t.dims.c_out};
          t.compute = timing::layer_cycles(spec, task, src, cal.neureka);
          const int ext = timing::job_extent(spec.mode);
          t.jobs = ((task.out_h + ext - 1) / ext) * ((task.out_w + ext - 1) / ext);
          t.stream_bytes = u64(t.jobs) * t.weight_bytes;
          ts.tiles.push_back(t);
        }
      }
    }
    return ts;
  };

  // Output channels are split into n even tiles. The fewest tiles that fit is not always the
  // fastest, since the first load and the last store do not overlap compute.
  const int n_min = (spec.c_out + dims.c_out - 1) / dims.c_out;
  TileSchedule best_ts;
  double best_latency = 0.0;
  int last_c = 0;
  for (int n = n_min; n <= n_min + 4; ++n) {
    const int even = (spec.c_out + n - 1) / n;
    const int c = std::min(spec.c_out, (even + kChannelStep - 1) / kChannelStep * kChannelStep);
    if (c == last_c) continue;
    last_c = c;
    TileDims d = dims;
    d.c_out = c;
    if (dw) d.c_in = c;
    TileSchedule ts = build(d);
    const double lat = analytic_latency(stage_times(ts, sc, cal.nominal, cal));
    if (best_ts.tiles.empty() || lat < best_latency) {
      best_latency = lat;
      best_ts = std::move(ts);
    }
    if (c <= kChannelStep) break;
  }
  return best_ts;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::WellBalanced: return "WellBalanced";
    case Regime::ComputeDominated: return "ComputeDominated";
    case Regime::WeightMemoryBound: return "WeightMemoryBound";
  }
  return "?";
}

EnergyParts& EnergyParts::operator+=(const EnergyParts& o) {
  compute += o.compute;
  l1_traffic += o.l1_traffic;
  l2_l1 += o.l2_l1;
  l3_l2 += o.l3_l2;
  off_chip += o.off_chip;
  mram_read += o.mram_read;
  idle += o.idle;
  return *this;
}

LayerReport& LayerReport::operator+=(const LayerReport& o) {
  cycles += o.cycles;
  for (const auto& [k, v] : o.link_bytes) link_bytes[k] += v;
  for (const auto& [k, v] : o.link_time) link_time[k] += v;
  latency += o.latency;
  compute_time += o.compute_time;
  weight_link_time += o.weight_link_time;
  energy += o.energy;
  return *this;
}

std::vector<StageTimes> stage_times(const TileSchedule& ts, const ScenarioConfig& sc, const OperatingPoint& opp,
                                    const CalibrationSet& cal) {
  const xfer::Link& dma = cal.links.get(xfer::links::kClusterDma);
  const auto staging = sc.staging_link();
  std::vector<StageTimes> steps;
  steps.reserve(ts.tiles.size());
  for (const Tile& t : ts.tiles) {
    StageTimes s;
    s.compute = static_cast<double>(t.compute.total) / opp.cluster_freq;
    s.load = busy(dma, t.input_bytes + t.weight_l1_bytes, opp);
    s.store = busy(dma, t.output_bytes, opp);
    if (staging) s.staging = busy(cal.links.get(*staging), t.staging_bytes, opp);
    steps.push_back(s);
  }
  return steps;
}

LayerReport layer_timeline(const TileSchedule& ts, const ScenarioConfig& sc, const OperatingPoint& opp,
                           const CalibrationSet& cal) {
  LayerReport r;
  r.layer = ts.layer;
  r.mode = ts.spec.mode;
  const std::vector<StageTimes> steps = stage_times(ts, sc, opp, cal);
  r.latency = analytic_latency(steps);

  const xfer::Link& dma = cal.links.get(xfer::links::kClusterDma);
  const auto staging = sc.staging_link();
  const bool l1_weights = sc.weights_through_l1();
  std::uint64_t dma_bytes = 0, staging_bytes = 0, weight_l1 = 0, stream = 0;
  double dma_time = 0.0, staging_time = 0.0;
  for (std::size_t i = 0; i < ts.tiles.size(); ++i) {
    const Tile& t = ts.tiles[i];
    r.cycles += t.compute;
    r.compute_time += steps[i].compute;
    dma_time += steps[i].load + steps[i].store;
    staging_time += steps[i].staging;
    dma_bytes += t.dma_bytes();
    staging_bytes += t.staging_bytes;
    weight_l1 += t.weight_l1_bytes;
    stream += t.stream_bytes;
  }
  // Only links that carried data appear in the maps.
  auto note = [&r](const std::string& link, std::uint64_t bytes, double time) {
    if (bytes == 0) return;
    r.link_bytes[link] = bytes;
    if (time > 0.0) r.link_time[link] = time;
  };
  note(xfer::links::kClusterDma, dma_bytes, dma_time);
  if (staging) note(*staging, staging_bytes, staging_time);
  if (!l1_weights) note(xfer::links::kMramPort, stream, 0.0);

  // Weight-carrying time outside the accelerator: the staging link plus the weight share of the DMA.
  r.weight_link_time = staging_time + (weight_l1 ? static_cast<double>(weight_l1) * 8.0 / dma.bandwidth(opp) : 0.0);

  EnergyParts& e = r.energy;
  const double dyn_power = opp.cluster_power_peak - opp.mram_power;
  e.compute = r.compute_time * cal.power.factor(ts.spec.mode, ts.spec.qw) * dyn_power;
  e.l2_l1 = xfer::transfer_energy(dma, dma_bytes);
  if (staging) {
    const xfer::Link& link = cal.links.get(*staging);
    const double j = xfer::transfer_energy(link, staging_bytes);
    (link.source == mem::LevelId::L3_FLASH ? e.off_chip : e.l3_l2) += j;
  }
  if (l1_weights) {
    e.l1_traffic = static_cast<double>(stream) * 8.0 * cal.l1_weight_read_energy;
    if (sc.weight_store.id == mem::LevelId::MRAM_WEIGHT && !staging)
      e.mram_read = static_cast<double>(weight_l1) * 8.0 * cal.mram_l2_read_energy;
  } else {
    e.mram_read = xfer::transfer_energy(cal.links.get(xfer::links::kMramPort), stream);
  }
  e.idle = std::max(0.0, r.latency - r.compute_time) * cal.idle_fraction * opp.cluster_power_peak;
  r.regime = classify_regime(r, cal.regime_threshold);
  return r;
}

Regime classify_regime(const LayerReport& r, double threshold) {
  if (r.weight_link_time > threshold * r.compute_time) return Regime::WeightMemoryBound;
  double worst = 0.0;
  for (const auto& [name, t] : r.link_time) worst = std::max(worst, t);
  if (r.compute_time > threshold * worst) return Regime::ComputeDominated;
  return Regime::WellBalanced;
}

void write_schedule_csv(std::ostream& os, const std::vector<TileSchedule>& schedules) {
  os << "layer,mode,tile_h,tile_w,tile_c_in,tile_c_out,count_h,count_w,count_c,tiles,l1_footprint,"
        "input_bytes,output_bytes,weight_l1_bytes,staging_bytes,stream_bytes,cycles\n";
  for (const TileSchedule& ts : schedules) {
    std::uint64_t in = 0, out = 0, wl1 = 0, stg = 0, stream = 0;
    for (const Tile& t : ts.tiles) {
      in += t.input_bytes;
      out += t.output_bytes;
      wl1 += t.weight_l1_bytes;
      stg += t.staging_bytes;
      stream += t.stream_bytes;
    }
    os << ts.layer << ',' << qnn::to_string(ts.spec.mode) << ',' << ts.tile.h << ',' << ts.tile.w << ','
       << ts.tile.c_in << ',' << ts.tile.c_out << ',' << ts.count_h << ',' << ts.count_w << ',' << ts.count_c << ','
       << ts.tiles.size() << ',' << ts.l1_footprint << ',' << in << ',' << out << ',' << wl1 << ',' << stg << ','
       << stream << ',' << ts.total_cycles() << '\n';
  }
}

}  // namespace nemsim::sched
