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

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nemsim/layer_spec.hpp"

namespace nemsim::qnn {

inline constexpr int kBlockBits = 256;
/// Input channels consumed per chunk by the 3x3 datapath (the buffer holds 32, 4 lanes idle).
inline constexpr int kChunk3x3 = 28;
/// Input channels consumed per chunk by the 1x1 datapath.
inline constexpr int kChunk1x1 = 32;
/// Output channels resident in the accumulators.
inline constexpr int kOutputGroup = 32;
inline constexpr int kTaps3x3 = 9;

using WeightBlock = std::array<std::uint64_t, 4>;

inline bool block_bit(const WeightBlock& b, int i) { return (b[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1U; }
inline void set_block_bit(WeightBlock& b, int i) { b[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63); }

struct WeightLayout {
  ConvMode mode = ConvMode::Dense3x3;
  int c_in = 0;
  int c_out = 0;
  int qw = 8;
  bool operator==(const WeightLayout&) const = default;
};

/// Weights in accelerator fetch order.
///
/// Dense3x3: output group of 32 -> 28-channel chunk -> output channel -> bit-plane;
///   bit ch*9 + tap carries plane b of weight (o, chunk*28 + ch, tap).
/// Depthwise3x3: 28-channel chunk -> bit-plane; bit ch*9 + tap.
/// Pointwise1x1: output group of 32 -> 32-channel chunk -> output channel;
///   bit ch*qw + b carries plane b of weight (o, chunk*32 + ch).
struct WeightStream {
  std::vector<WeightBlock> blocks;
  WeightLayout layout;
  std::size_t bit_count = 0;
};

/// Offset-binary code of a signed weight: w + 2^(qw-1). Throws PrecisionOverflow.
std::uint8_t encode_weight(int w, int qw);
inline int decode_weight(std::uint32_t code, int qw) { return static_cast<int>(code) - (1 << (qw - 1)); }

/// raw layout: [c_out][channels_per_filter][ky][kx].
WeightStream pack_weights(std::span<const std::int8_t> raw, const LayerSpec& spec);
std::vector<std::int8_t> unpack_weights(const WeightStream& ws);

std::size_t expected_block_count(const WeightLayout& layout);

/// Bit-plane b of up to 256 weights (entry j -> bit j), in offset-binary encoding.
std::bitset<kBlockBits> extract_bitplane(std::span<const std::int8_t> chunk, int qw, int b);

}  // namespace nemsim::qnn
