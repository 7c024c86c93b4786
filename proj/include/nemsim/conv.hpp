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
#include <span>
#include <variant>

#include "nemsim/layer_spec.hpp"
#include "nemsim/tensor.hpp"
#include "nemsim/weight_packing.hpp"

namespace nemsim::qnn {

/// Direct convolution with 64-bit accumulation, truncated to int32. Zero padding of spec.padding pixels on each side.
AccTensor conv_ref(const QTensor& input, std::span<const std::int8_t> raw, const LayerSpec& spec);

/// Requantized output, or the raw accumulators when the layer has no requant stage.
using ConvOutput = std::variant<QTensor, AccTensor>;

/// Runs the accelerator's job loop on a packed weight stream.
///
/// 3x3 modes use 6x6 output jobs over an 8x8 input window, pointwise uses 8x8 jobs.
/// Accumulators are 32-bit and wrap. Stride-2 outputs subsample the stride-1 grid.
ConvOutput conv_neureka(const QTensor& input, const WeightStream& ws, const LayerSpec& spec);

/// conv_ref followed by requantization (if configured).
ConvOutput conv_ref_output(const QTensor& input, std::span<const std::int8_t> raw, const LayerSpec& spec);

}  // namespace nemsim::qnn
