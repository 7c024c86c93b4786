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

#include "nemsim/neureka_timing.hpp"

#include <algorithm>
#include <string>

#include "nemsim/error.hpp"

namespace nemsim::timing {
namespace {

using qnn::ConvMode;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Outputs of [start, start + len) that land on the stride grid.
std::uint64_t strided_count(int start, int len, int stride) {
  if (len <= 0) return 0;
  const int first = (start + stride - 1) / stride;
  const int last = (start + len - 1) / stride;
  return static_cast<std::uint64_t>(std::max(0, last - first + 1));
}

}  // namespace

CycleBreakdown& CycleBreakdown::operator+=(const CycleBreakdown& o) {
  launch += o.launch;
  prefetch += o.prefetch;
  execute += o.execute;
  weight_traffic += o.weight_traffic;
  normquant += o.normquant;
  streamout += o.streamout;
  total += o.total;
  return *this;
}

int job_extent(ConvMode mode) { return mode == ConvMode::Pointwise1x1 ? 8 : 6; }
int input_chunk(ConvMode mode) { return mode == ConvMode::Pointwise1x1 ? 32 : 28; }
int resident_outputs(ConvMode mode) { return mode == ConvMode::Depthwise3x3 ? 28 : 32; }

CycleBreakdown job_cycles(const qnn::LayerSpec& spec, const JobDims& d, WeightSource src, const NeurekaParams& p,
                          const JobContext& ctx) {
  const int ext = job_extent(spec.mode);
  if (d.out_h <= 0 || d.out_w <= 0 || d.out_h > ext || d.out_w > ext)
    throw GeometryViolation("job output block " + std::to_string(d.out_h) + "x" + std::to_string(d.out_w) +
                            " exceeds the " + std::to_string(ext) + "x" + std::to_string(ext) + " job");
  if (d.c_in <= 0 || d.c_out <= 0 || d.c_out > resident_outputs(spec.mode))
    throw GeometryViolation("job needs 1.." + std::to_string(resident_outputs(spec.mode)) + " resident output channels");
  if (spec.mode == ConvMode::Depthwise3x3 && d.c_in != d.c_out)
    throw GeometryViolation("depthwise job needs matching input and output channels");

  const auto qw = static_cast<std::uint64_t>(spec.qw);
  const auto c_out = static_cast<std::uint64_t>(d.c_out);
  const std::uint64_t chunks =
      spec.mode == ConvMode::Depthwise3x3 ? 1 : ceil_div(static_cast<std::uint64_t>(d.c_in), static_cast<std::uint64_t>(input_chunk(spec.mode)));
  const std::uint64_t pf = p.prefetch_cycles_per_chunk;

  CycleBreakdown c;
  switch (spec.mode) {
    case ConvMode::Dense3x3:
      c.execute = chunks * c_out * qw;
      break;
    case ConvMode::Pointwise1x1:
      c.execute = chunks * c_out;
      break;
    case ConvMode::Depthwise3x3:
      c.execute = qw;
      break;
  }
  // One 256-bit block feeds one execute cycle.
  c.weight_traffic = c.execute;
  c.prefetch = chunks * pf;
  c.launch = (ctx.pay_launch && !p.zero_launch) ? p.launch_cycles : 0;
  c.normquant = static_cast<std::uint64_t>(p.nq_cycles_per_channel) * c_out;
  const std::uint64_t out_bytes = spec.raw_output ? 4 : 1;
  const std::uint64_t stored = strided_count(d.row0, d.out_h, spec.stride) * strided_count(d.col0, d.out_w, spec.stride);
  c.streamout = ceil_div(stored * c_out * out_bytes, p.streamout_bytes_per_cycle);

  const std::uint64_t exposed = ctx.first_prefetch_exposed ? pf : 0;
  std::uint64_t traffic = (chunks - 1) * pf + (ctx.next_prefetch_hidden ? pf : 0);
  if (src == WeightSource::L1) traffic += c.weight_traffic;
  c.total = c.launch + exposed + std::max(c.execute, traffic) + c.normquant + c.streamout;
  return c;
}

CycleBreakdown layer_cycles(const qnn::LayerSpec& spec, const TaskDims& d, WeightSource src, const NeurekaParams& p) {
  CycleBreakdown sum;
  if (d.out_h <= 0 || d.out_w <= 0 || d.c_out <= 0) return sum;
  const int ext = job_extent(spec.mode);
  const int group = resident_outputs(spec.mode);
  const bool mram = src == WeightSource::Mram;
  const int n_rows = (d.out_h + ext - 1) / ext;
  const int n_cols = (d.out_w + ext - 1) / ext;
  const int n_groups = (d.c_out + group - 1) / group;
  const long total_jobs = static_cast<long>(n_rows) * n_cols * n_groups;
  long index = 0;
  for (int r = 0; r < n_rows; ++r) {
    for (int q = 0; q < n_cols; ++q) {
      for (int g = 0; g < n_groups; ++g, ++index) {
        JobDims j;
        j.row0 = r * ext;
        j.col0 = q * ext;
        j.out_h = std::min(ext, d.out_h - j.row0);
        j.out_w = std::min(ext, d.out_w - j.col0);
        j.c_out = std::min(group, d.c_out - g * group);
        j.c_in = spec.mode == qnn::ConvMode::Depthwise3x3 ? j.c_out : d.c_in;
        JobContext ctx;
        ctx.pay_launch = index == 0;
        // With MRAM weights the next job's first chunk streams in under the current one.
        // With L1 weights the shared port only allows that inside one spatial position.
        if (mram) {
          ctx.first_prefetch_exposed = index == 0;
          ctx.next_prefetch_hidden = index + 1 < total_jobs;
        } else {
          ctx.first_prefetch_exposed = g == 0;
          ctx.next_prefetch_hidden = g + 1 < n_groups;
        }
        sum += job_cycles(spec, j, src, p, ctx);
      }
    }
  }
  return sum;
}

TaskDims whole_layer(const qnn::LayerSpec& spec, int in_h, int in_w) {
  return {spec.dense_extent(in_h), spec.dense_extent(in_w), spec.c_in, spec.c_out};
}

std::uint64_t task_macs(const qnn::LayerSpec& spec, const TaskDims& d) {
  const std::uint64_t outs = strided_count(0, d.out_h, spec.stride) * strided_count(0, d.out_w, spec.stride);
  const auto k2 = static_cast<std::uint64_t>(spec.kernel_size() * spec.kernel_size());
  const std::uint64_t per_out = spec.mode == ConvMode::Depthwise3x3 ? k2 : k2 * static_cast<std::uint64_t>(d.c_in);
  return outs * static_cast<std::uint64_t>(d.c_out) * per_out;
}

double KernelPower::factor(ConvMode mode, int qw) const {
  switch (mode) {
    case ConvMode::Dense3x3:
      return dense2 + (dense8 - dense2) * (qw - 2) / 6.0;
    case ConvMode::Pointwise1x1:
      return pointwise;
    case ConvMode::Depthwise3x3:
      return depthwise;
  }
  return 1.0;
}

BenchmarkKernel benchmark_kernel(ConvMode mode, int qw) {
  BenchmarkKernel b;
  b.spec.mode = mode;
  b.spec.qw = qw;
  switch (mode) {
    case ConvMode::Dense3x3:
      b.spec.c_in = 252;
      b.spec.c_out = 32;
      break;
    case ConvMode::Pointwise1x1:
      b.spec.c_in = 224;
      b.spec.c_out = 32;
      break;
    case ConvMode::Depthwise3x3:
      b.spec.c_in = 224;
      b.spec.c_out = 224;
      break;
  }
  b.spec.validate();
  b.dims = {6, 6, b.spec.c_in, b.spec.c_out};
  return b;
}

KernelRate kernel_rate(const qnn::LayerSpec& spec, const TaskDims& dims, WeightSource src, const OperatingPoint& opp,
                       const NeurekaParams& p, const KernelPower& power) {
  KernelRate r;
  r.cycles = layer_cycles(spec, dims, src, p).total;
  const double ops = 2.0 * static_cast<double>(task_macs(spec, dims));
  r.throughput = ops / (static_cast<double>(r.cycles) / opp.cluster_freq);
  r.power = power.factor(spec.mode, spec.qw) * opp.cluster_power_peak;
  r.efficiency = r.throughput / r.power;
  return r;
}

double ideal_throughput(const qnn::LayerSpec& spec, const TaskDims& dims, const OperatingPoint& opp) {
  const auto exec = layer_cycles(spec, dims, WeightSource::Mram, NeurekaParams{}).execute;
  return 2.0 * static_cast<double>(task_macs(spec, dims)) / (static_cast<double>(exec) / opp.cluster_freq);
}

}  // namespace nemsim::timing
