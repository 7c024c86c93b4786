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

#include "nemsim/conv.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "nemsim/error.hpp"
#include "nemsim/requant.hpp"

namespace nemsim::qnn {
namespace {

void check_input(const QTensor& in, const LayerSpec& spec) {
  spec.validate();
  if (in.channels != spec.c_in)
    throw ShapeMismatch("input has " + std::to_string(in.channels) + " channels, layer expects " + std::to_string(spec.c_in));
  if (in.data.size() != in.element_count()) throw ShapeMismatch("input tensor data length mismatch");
  if (spec.dense_extent(in.height) <= 0 || spec.dense_extent(in.width) <= 0)
    throw ShapeMismatch("input smaller than the kernel");
}

ConvOutput finish(AccTensor acc, const LayerSpec& spec) {
  if (spec.requant) return requantize(acc, *spec.requant);
  return acc;
}

}  // namespace

AccTensor conv_ref(const QTensor& in, std::span<const std::int8_t> raw, const LayerSpec& spec) {
  check_input(in, spec);
  if (raw.size() != spec.weight_count()) throw ShapeMismatch("raw weight array size does not match the layer");
  const int k = spec.kernel_size();
  const int oh = spec.output_extent(in.height);
  const int ow = spec.output_extent(in.width);
  const int cpf = spec.channels_per_filter();
  AccTensor out(oh, ow, spec.c_out);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int o = 0; o < spec.c_out; ++o) {
        std::int64_t acc = 0;
        for (int j = 0; j < cpf; ++j) {
          const int ci = spec.mode == ConvMode::Depthwise3x3 ? o : j;
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * spec.stride + ky - spec.padding;
            if (iy < 0 || iy >= in.height) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * spec.stride + kx - spec.padding;
              if (ix < 0 || ix >= in.width) continue;
              const std::size_t widx = ((static_cast<std::size_t>(o) * static_cast<std::size_t>(cpf) + static_cast<std::size_t>(j)) *
                                            static_cast<std::size_t>(k) + static_cast<std::size_t>(ky)) *
                                           static_cast<std::size_t>(k) +
                                       static_cast<std::size_t>(kx);
              acc += static_cast<std::int64_t>(raw[widx]) * in.at(iy, ix, ci);
            }
          }
        }
        out.at(oy, ox, o) = static_cast<std::int32_t>(static_cast<std::uint32_t>(static_cast<std::uint64_t>(acc)));
      }
    }
  }
  return out;
}

ConvOutput conv_ref_output(const QTensor& input, std::span<const std::int8_t> raw, const LayerSpec& spec) {
  return finish(conv_ref(input, raw, spec), spec);
}

ConvOutput conv_neureka(const QTensor& in, const WeightStream& ws, const LayerSpec& spec) {
  check_input(in, spec);
  const WeightLayout want{spec.mode, spec.c_in, spec.c_out, spec.qw};
  if (!(ws.layout == want)) throw ShapeMismatch("weight stream was packed for a different layer");
  if (ws.blocks.size() != expected_block_count(want)) throw ShapeMismatch("weight stream block count mismatch");

  const int k = spec.kernel_size();
  const int job = spec.mode == ConvMode::Pointwise1x1 ? 8 : 6;
  const int win = job + k - 1;
  const int lanes = spec.mode == ConvMode::Pointwise1x1 ? kChunk1x1 : kChunk3x3;
  const int h1 = spec.dense_extent(in.height);
  const int w1 = spec.dense_extent(in.width);
  const int qw = spec.qw;

  // Stride-1 accumulators for the whole layer; strided outputs are picked afterwards.
  std::vector<std::uint32_t> acc1(static_cast<std::size_t>(h1) * static_cast<std::size_t>(w1) *
                                  static_cast<std::size_t>(spec.c_out));
  auto acc_at = [&](int y, int x, int o) -> std::uint32_t& {
    return acc1[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w1) + static_cast<std::size_t>(x)) *
                    static_cast<std::size_t>(spec.c_out) +
                static_cast<std::size_t>(o)];
  };

  // Input buffer: win x win pixels x 32 lanes.
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(win * win * 32));
  auto load_chunk = [&](int jy, int jx, int c0) {
    for (int dy = 0; dy < win; ++dy) {
      for (int dx = 0; dx < win; ++dx) {
        const int iy = jy + dy - spec.padding;
        const int ix = jx + dx - spec.padding;
        for (int lane = 0; lane < 32; ++lane) {
          const int c = c0 + lane;
          std::uint8_t v = 0;
          if (iy >= 0 && iy < in.height && ix >= 0 && ix < in.width && c < spec.c_in) v = in.at(iy, ix, c);
          buf[static_cast<std::size_t>((dy * win + dx) * 32 + lane)] = v;
        }
      }
    }
  };
  auto pix = [&](int y, int x, int lane) -> std::uint32_t {
    return buf[static_cast<std::size_t>((y * win + x) * 32 + lane)];
  };

  std::array<std::uint32_t, 64 * 32> acc{};  // job pixels x resident output channels
  std::array<std::uint32_t, 64 * 32> asum{};  // activation sums for the offset compensation

  for (int jy = 0; jy < h1; jy += job) {
    for (int jx = 0; jx < w1; jx += job) {
      const int jh = std::min(job, h1 - jy);
      const int jw = std::min(job, w1 - jx);
      std::size_t block = 0;
      auto commit = [&](int o_base, int count) {
        for (int p = 0; p < jh * jw; ++p)
          for (int o = 0; o < count; ++o)
            acc_at(jy + p / jw, jx + p % jw, o_base + o) =
                acc[static_cast<std::size_t>(p * 32 + o)] - (asum[static_cast<std::size_t>(p * 32 + o)] << (qw - 1));
      };

      if (spec.mode == ConvMode::Depthwise3x3) {
        for (int c0 = 0; c0 < spec.c_in; c0 += lanes) {
          const int width = std::min(lanes, spec.c_in - c0);
          acc.fill(0);
          asum.fill(0);
          load_chunk(jy, jx, c0);
          for (int p = 0; p < jh * jw; ++p) {
            const int py = p / jw, px = p % jw;
            for (int ch = 0; ch < width; ++ch) {
              std::uint32_t s = 0;
              for (int tap = 0; tap < kTaps3x3; ++tap) s += pix(py + tap / 3, px + tap % 3, ch);
              asum[static_cast<std::size_t>(p * 32 + ch)] = s;
            }
          }
          for (int b = 0; b < qw; ++b) {
            const WeightBlock& wb = ws.blocks[block++];
            for (int p = 0; p < jh * jw; ++p) {
              const int py = p / jw, px = p % jw;
              for (int ch = 0; ch < width; ++ch) {
                std::uint32_t partial = 0;
                for (int tap = 0; tap < kTaps3x3; ++tap)
                  if (block_bit(wb, ch * kTaps3x3 + tap)) partial += pix(py + tap / 3, px + tap % 3, ch);
                acc[static_cast<std::size_t>(p * 32 + ch)] += partial << b;
              }
            }
          }
          commit(c0, width);
        }
        continue;
      }

      for (int g = 0; g < spec.c_out; g += kOutputGroup) {
        const int count = std::min(kOutputGroup, spec.c_out - g);
        acc.fill(0);
        std::array<std::uint32_t, 64> wsum{};
        for (int c0 = 0; c0 < spec.c_in; c0 += lanes) {
          const int width = std::min(lanes, spec.c_in - c0);
          load_chunk(jy, jx, c0);
          for (int p = 0; p < jh * jw; ++p) {
            const int py = p / jw, px = p % jw;
            std::uint32_t s = 0;
            for (int ch = 0; ch < width; ++ch)
              for (int tap = 0; tap < k * k; ++tap) s += pix(py + tap / k, px + tap % k, ch);
            wsum[static_cast<std::size_t>(p)] += s;
          }
          for (int o = 0; o < count; ++o) {
            if (spec.mode == ConvMode::Dense3x3) {
              for (int b = 0; b < qw; ++b) {
                const WeightBlock& wb = ws.blocks[block++];
                for (int p = 0; p < jh * jw; ++p) {
                  const int py = p / jw, px = p % jw;
                  std::uint32_t partial = 0;
                  for (int ch = 0; ch < width; ++ch)
                    for (int tap = 0; tap < kTaps3x3; ++tap)
                      if (block_bit(wb, ch * kTaps3x3 + tap)) partial += pix(py + tap / 3, px + tap % 3, ch);
                  acc[static_cast<std::size_t>(p * 32 + o)] += partial << b;
                }
              }
            } else {
              const WeightBlock& wb = ws.blocks[block++];
              for (int b = 0; b < qw; ++b) {
                for (int p = 0; p < jh * jw; ++p) {
                  const int py = p / jw, px = p % jw;
                  std::uint32_t partial = 0;
                  for (int ch = 0; ch < width; ++ch)
                    if (block_bit(wb, ch * qw + b)) partial += pix(py, px, ch);
                  acc[static_cast<std::size_t>(p * 32 + o)] += partial << b;
                }
              }
            }
          }
        }
        for (int p = 0; p < jh * jw; ++p)
          for (int o = 0; o < count; ++o) asum[static_cast<std::size_t>(p * 32 + o)] = wsum[static_cast<std::size_t>(p)];
        commit(g, count);
      }
    }
  }

  const int oh = spec.output_extent(in.height);
  const int ow = spec.output_extent(in.width);
  AccTensor out(oh, ow, spec.c_out);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox)
      for (int o = 0; o < spec.c_out; ++o)
        out.at(oy, ox, o) = static_cast<std::int32_t>(acc_at(oy * spec.stride, ox * spec.stride, o));
  return finish(std::move(out), spec);
}

}  // namespace nemsim::qnn
