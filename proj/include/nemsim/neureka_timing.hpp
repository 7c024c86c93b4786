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

#pragma once

#include <cstdint>

#include "nemsim/layer_spec.hpp"
#include "nemsim/operating_point.hpp"

namespace nemsim::timing {

enum class WeightSource { Mram, L1 };

/// Per-job fixed costs of the accelerator FSM.
struct NeurekaParams {
  std::uint32_t launch_cycles = 258;  // once per task
  std::uint32_t prefetch_cycles_per_chunk = 64;
  std::uint32_t nq_cycles_per_channel = 1;
  std::uint32_t streamout_bytes_per_cycle = 32;
  bool zero_launch = false;

  bool operator==(const NeurekaParams&) const = default;
};

struct CycleBreakdown {
  std::uint64_t launch = 0;
  std::uint64_t prefetch = 0;
  std::uint64_t execute = 0;
  std::uint64_t weight_traffic = 0;
  std::uint64_t normquant = 0;
  std::uint64_t streamout = 0;
  std::uint64_t total = 0;

  CycleBreakdown& operator+=(const CycleBreakdown& o);
  bool operator==(const CycleBreakdown&) const = default;
};

/// One accelerator job: a spatial block of stride-1 outputs and one resident output group.
/// row0/col0 place the block on the stride-1 grid so strided outputs can be counted.
struct JobDims {
  int out_h = 0;
  int out_w = 0;
  int c_in = 0;
  int c_out = 0;
  int row0 = 0;
  int col0 = 0;
};

/// Pipeline position of a job inside its task.
struct JobContext {
  bool first_prefetch_exposed = true;
  bool pay_launch = true;
  bool next_prefetch_hidden = false;
};

/// A task: a region of stride-1 outputs processed by one accelerator launch.
struct TaskDims {
  int out_h = 0;
  int out_w = 0;
  int c_in = 0;
  int c_out = 0;
};

int job_extent(qnn::ConvMode mode);
int input_chunk(qnn::ConvMode mode);
int resident_outputs(qnn::ConvMode mode);

/// Throws GeometryViolation when the job exceeds the buffer geometry.
CycleBreakdown job_cycles(const qnn::LayerSpec& spec, const JobDims& dims, WeightSource src, const NeurekaParams& p,
                          const JobContext& ctx = {});

/// Sums jobs over the spatial grid and output groups of a task.
CycleBreakdown layer_cycles(const qnn::LayerSpec& spec, const TaskDims& dims, WeightSource src, const NeurekaParams& p);

/// Task covering a whole layer for an input of in_h x in_w.
TaskDims whole_layer(const qnn::LayerSpec& spec, int in_h, int in_w);

/// Multiply-accumulates of a task (strided outputs only).
std::uint64_t task_macs(const qnn::LayerSpec& spec, const TaskDims& dims);

/// Relative compute power per mode, as a fraction of the cluster's peak power.
struct KernelPower {
  double dense8 = 1.0;
  double dense2 = 0.851;
  double pointwise = 0.386;
  double depthwise = 0.5;

  bool operator==(const KernelPower&) const = default;

  /// Dense factors interpolate linearly in qw between the 2-bit and 8-bit points.
  double factor(qnn::ConvMode mode, int qw) const;
};

struct KernelRate {
  std::uint64_t cycles = 0;
  double throughput = 0.0;  // Op/s, 1 MAC = 2 Op
  double power = 0.0;       // W
  double efficiency = 0.0;  // Op/J
};

struct BenchmarkKernel {
  qnn::LayerSpec spec;
  TaskDims dims;
};

/// 6x6 output benchmark kernels: dense 252->32, pointwise 224->32, depthwise 224.
BenchmarkKernel benchmark_kernel(qnn::ConvMode mode, int qw);

KernelRate kernel_rate(const qnn::LayerSpec& spec, const TaskDims& dims, WeightSource src, const OperatingPoint& opp,
                       const NeurekaParams& p, const KernelPower& power);

/// Execute-only throughput of a task, ignoring every overhead.
double ideal_throughput(const qnn::LayerSpec& spec, const TaskDims& dims, const OperatingPoint& opp);

}  // namespace nemsim::timing
