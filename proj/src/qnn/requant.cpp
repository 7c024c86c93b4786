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

#include "nemsim/requant.hpp"

#include <algorithm>

#include "nemsim/error.hpp"

namespace nemsim::qnn {

std::uint8_t requantize(std::int32_t acc, std::uint32_t scale, std::int32_t bias, unsigned shift) {
  const std::int64_t v = (static_cast<std::int64_t>(acc) * static_cast<std::int64_t>(scale) + bias) >> (shift & 31U);
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255));
}

QTensor requantize(const AccTensor& acc, const RequantParams& p) {
  p.validate(acc.channels);
  QTensor out(acc.height, acc.width, acc.channels);
  const auto c = static_cast<std::size_t>(acc.channels);
  for (std::size_t i = 0; i < acc.data.size(); ++i) {
    const std::size_t ch = i % c;
    out.data[i] = requantize(acc.data[i], p.scale[ch], p.bias[ch], p.shift[ch]);
  }
  return out;
}

}  // namespace nemsim::qnn
