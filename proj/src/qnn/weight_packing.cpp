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

#include "nemsim/weight_packing.hpp"

#include <algorithm>
#include <string>

#include "nemsim/error.hpp"

namespace nemsim::qnn {
namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void check_layout(const WeightLayout& l) {
  if (l.c_in <= 0 || l.c_out <= 0) throw ShapeMismatch("weight layout needs positive channel counts");
  if (l.qw < 2 || l.qw > 8) throw InvalidSpec("weight precision must be in [2,8]");
  if (l.mode == ConvMode::Depthwise3x3 && l.c_in != l.c_out) throw ShapeMismatch("depthwise needs c_out == c_in");
}

// Index of weight (o, ci, tap) in the raw array.
std::size_t raw_index(const WeightLayout& l, int o, int ci, int tap) {
  switch (l.mode) {
    case ConvMode::Dense3x3:
      return (static_cast<std::size_t>(o) * static_cast<std::size_t>(l.c_in) + static_cast<std::size_t>(ci)) * kTaps3x3 +
             static_cast<std::size_t>(tap);
    case ConvMode::Depthwise3x3:
      return static_cast<std::size_t>(o) * kTaps3x3 + static_cast<std::size_t>(tap);
    case ConvMode::Pointwise1x1:
      return static_cast<std::size_t>(o) * static_cast<std::size_t>(l.c_in) + static_cast<std::size_t>(ci);
  }
  return 0;
}

std::size_t raw_count(const WeightLayout& l) {
  const auto co = static_cast<std::size_t>(l.c_out);
  switch (l.mode) {
    case ConvMode::Dense3x3:
      return co * static_cast<std::size_t>(l.c_in) * kTaps3x3;
    case ConvMode::Depthwise3x3:
      return co * kTaps3x3;
    case ConvMode::Pointwise1x1:
      return co * static_cast<std::size_t>(l.c_in);
  }
  return 0;
}

// Walks the fetch order. visit(block, bit, raw_index, plane) is called for every payload bit.
template <typename Visit, typename NewBlock>
void walk(const WeightLayout& l, NewBlock new_block, Visit visit) {
  std::size_t block = 0;
  switch (l.mode) {
    case ConvMode::Dense3x3:
      for (int g = 0; g < l.c_out; g += kOutputGroup) {
        const int g_end = std::min(l.c_out, g + kOutputGroup);
        for (int c0 = 0; c0 < l.c_in; c0 += kChunk3x3) {
          const int width = std::min(kChunk3x3, l.c_in - c0);
          for (int o = g; o < g_end; ++o) {
            for (int b = 0; b < l.qw; ++b, ++block) {
              new_block(block, width * kTaps3x3);
              for (int ch = 0; ch < width; ++ch)
                for (int tap = 0; tap < kTaps3x3; ++tap)
                  visit(block, ch * kTaps3x3 + tap, raw_index(l, o, c0 + ch, tap), b);
            }
          }
        }
      }
      break;
    case ConvMode::Depthwise3x3:
      for (int c0 = 0; c0 < l.c_in; c0 += kChunk3x3) {
        const int width = std::min(kChunk3x3, l.c_in - c0);
        for (int b = 0; b < l.qw; ++b, ++block) {
          new_block(block, width * kTaps3x3);
          for (int ch = 0; ch < width; ++ch)
            for (int tap = 0; tap < kTaps3x3; ++tap)
              visit(block, ch * kTaps3x3 + tap, raw_index(l, c0 + ch, 0, tap), b);
        }
      }
      break;
    case ConvMode::Pointwise1x1:
      for (int g = 0; g < l.c_out; g += kOutputGroup) {
        const int g_end = std::min(l.c_out, g + kOutputGroup);
        for (int c0 = 0; c0 < l.c_in; c0 += kChunk1x1) {
          const int width = std::min(kChunk1x1, l.c_in - c0);
          for (int o = g; o < g_end; ++o, ++block) {
            new_block(block, width * l.qw);
            for (int ch = 0; ch < width; ++ch)
              for (int b = 0; b < l.qw; ++b) visit(block, ch * l.qw + b, raw_index(l, o, c0 + ch, 0), b);
          }
        }
      }
      break;
  }
}

}  // namespace

std::uint8_t encode_weight(int w, int qw) {
  const int lo = -(1 << (qw - 1));
  const int hi = (1 << (qw - 1)) - 1;
  if (w < lo || w > hi)
    throw PrecisionOverflow("weight " + std::to_string(w) + " not representable in " + std::to_string(qw) + " bits");
  return static_cast<std::uint8_t>(w - lo);
}

std::size_t expected_block_count(const WeightLayout& l) {
  check_layout(l);
  switch (l.mode) {
    case ConvMode::Dense3x3:
      return static_cast<std::size_t>(ceil_div(l.c_in, kChunk3x3)) * static_cast<std::size_t>(l.c_out) *
             static_cast<std::size_t>(l.qw);
    case ConvMode::Depthwise3x3:
      return static_cast<std::size_t>(ceil_div(l.c_in, kChunk3x3)) * static_cast<std::size_t>(l.qw);
    case ConvMode::Pointwise1x1:
      return static_cast<std::size_t>(ceil_div(l.c_in, kChunk1x1)) * static_cast<std::size_t>(l.c_out);
  }
  return 0;
}

WeightStream pack_weights(std::span<const std::int8_t> raw, const LayerSpec& spec) {
  spec.validate();
  WeightStream ws;
  ws.layout = {spec.mode, spec.c_in, spec.c_out, spec.qw};
  check_layout(ws.layout);
  if (raw.size() != raw_count(ws.layout))
    throw ShapeMismatch("raw weight array has " + std::to_string(raw.size()) + " entries, expected " +
                        std::to_string(raw_count(ws.layout)));
  std::vector<std::uint8_t> codes(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) codes[i] = encode_weight(raw[i], spec.qw);

  ws.blocks.resize(expected_block_count(ws.layout));
  walk(
      ws.layout, [&](std::size_t, int payload) { ws.bit_count += static_cast<std::size_t>(payload); },
      [&](std::size_t block, int bit, std::size_t idx, int plane) {
        if ((codes[idx] >> plane) & 1U) set_block_bit(ws.blocks[block], bit);
      });
  return ws;
}

std::vector<std::int8_t> unpack_weights(const WeightStream& ws) {
  check_layout(ws.layout);
  if (ws.blocks.size() != expected_block_count(ws.layout)) throw ShapeMismatch("weight stream block count mismatch");
  std::vector<std::uint32_t> codes(raw_count(ws.layout), 0);
  walk(
      ws.layout, [](std::size_t, int) {},
      [&](std::size_t block, int bit, std::size_t idx, int plane) {
        if (block_bit(ws.blocks[block], bit)) codes[idx] |= 1U << plane;
      });
  std::vector<std::int8_t> raw(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) raw[i] = static_cast<std::int8_t>(decode_weight(codes[i], ws.layout.qw));
  return raw;
}

std::bitset<kBlockBits> extract_bitplane(std::span<const std::int8_t> chunk, int qw, int b) {
  if (qw < 2 || qw > 8) throw InvalidSpec("weight precision must be in [2,8]");
  if (b < 0 || b >= qw) throw IndexOutOfRange("bit-plane index " + std::to_string(b) + " outside [0," + std::to_string(qw) + ")");
  if (chunk.size() > kBlockBits) throw ShapeMismatch("a bit-plane holds at most 256 weights");
  std::bitset<kBlockBits> plane;
  for (std::size_t j = 0; j < chunk.size(); ++j)
    if ((encode_weight(chunk[j], qw) >> b) & 1U) plane.set(j);
  return plane;
}

}  // namespace nemsim::qnn
