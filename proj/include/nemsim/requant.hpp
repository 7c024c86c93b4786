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
#include "nemsim/tensor.hpp"

namespace nemsim::qnn {

/// clamp(((acc * scale) + bias) >> shift, 0, 255), 64-bit product, arithmetic shift.
std::uint8_t requantize(std::int32_t acc, std::uint32_t scale, std::int32_t bias, unsigned shift);

/// Per-channel requantization of a whole accumulator tensor.
QTensor requantize(const AccTensor& acc, const RequantParams& p);

}  // namespace nemsim::qnn
