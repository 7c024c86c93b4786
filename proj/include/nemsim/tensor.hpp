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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nemsim/error.hpp"

namespace nemsim::qnn {

/// Height-width-channel tensor. Element (y, x, c) lives at (y * width + x) * channels + c.
template <typename T>
struct HwcTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<T> data;

  HwcTensor() = default;
  HwcTensor(int h, int w, int c) : height(h), width(w), channels(c) {
    if (h < 0 || w < 0 || c < 0) throw ShapeMismatch("negative tensor dimension");
    data.assign(element_count(), T{});
  }
  HwcTensor(int h, int w, int c, std::vector<T> values) : height(h), width(w), channels(c), data(std::move(values)) {
    if (h < 0 || w < 0 || c < 0) throw ShapeMismatch("negative tensor dimension");
    if (data.size() != element_count()) throw ShapeMismatch("tensor data length does not match height*width*channels");
  }

  std::size_t element_count() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  }
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  T& at(int y, int x, int c) { return data[index(y, x, c)]; }
  const T& at(int y, int x, int c) const { return data[index(y, x, c)]; }

  bool operator==(const HwcTensor&) const = default;
};

/// Unsigned 8-bit activations.
using QTensor = HwcTensor<std::uint8_t>;
/// Raw 32-bit accumulator outputs.
using AccTensor = HwcTensor<std::int32_t>;

}  // namespace nemsim::qnn
