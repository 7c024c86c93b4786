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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nemsim/layer_spec.hpp"
#include "nemsim/tile_scheduler.hpp"

namespace nemsim {

enum class LayerKind {
  Conv,            // runs on the accelerator
  FullyConnected,  // runs on the accelerator as a 1x1 convolution over a 1x1 map
  Add,             // residual add, zero cost
  AvgPool,         // global average pool, zero cost
};

struct NetworkLayer {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  qnn::LayerSpec spec;  // for markers only the channel counts are meaningful
  int in_h = 0;
  int in_w = 0;

  bool is_marker() const { return kind == LayerKind::Add || kind == LayerKind::AvgPool; }
  int out_h() const;
  int out_w() const;
  /// Text before the first '_' of the name, e.g. "bn3" for "bn3_2_dw".
  std::string group() const;
  sched::LayerShape shape() const { return {name, spec, in_h, in_w}; }
};

struct NetworkDesc {
  std::string name;
  std::vector<NetworkLayer> layers;

  /// Layers with kind Conv.
  std::size_t conv_layer_count() const;
  std::uint64_t total_weights() const;
  /// Packed weight bytes of every layer that runs on the accelerator.
  std::uint64_t total_weight_bytes() const;
  /// Distinct groups in order of first appearance.
  std::vector<std::string> groups() const;
};

/// `name mode h w c_in c_out stride qw` per line; mode is dense3x3, dw3x3, pw1x1, fc, add or avgpool.
/// Consecutive layers must compose. Throws ParseError naming the offending line.
NetworkDesc load_network(std::istream& is, const std::string& source = "<stream>");
NetworkDesc load_network(const std::filesystem::path& path);
void emit_network(std::ostream& os, const NetworkDesc& net);

}  // namespace nemsim
