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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nemsim/tensor.hpp"

namespace nemsim::qnn {

/// Element type tag stored in a tensor file header.
enum class DType : std::uint8_t { U8 = 0, I8 = 1, I32 = 2 };

/// Generic view of a test-vector file: header dims plus little-endian payload bytes.
/// See docs/tensor-format.md for the byte layout.
struct TensorFile {
  DType dtype = DType::U8;
  std::array<std::uint32_t, 3> dims{};
  std::vector<std::uint8_t> payload;
};

inline constexpr std::size_t kTensorHeaderBytes = 16;

void write_tensor_file(std::ostream& os, const TensorFile& f);
TensorFile read_tensor_file(std::istream& is);

void save_tensor(const std::filesystem::path& path, const QTensor& t);
void save_tensor(const std::filesystem::path& path, const AccTensor& t);
/// Raw weights as (c_out, channels_per_filter, k*k).
void save_weights(const std::filesystem::path& path, const std::vector<std::int8_t>& w, std::array<std::uint32_t, 3> dims);

QTensor load_qtensor(const std::filesystem::path& path);
AccTensor load_acctensor(const std::filesystem::path& path);
std::vector<std::int8_t> load_weights(const std::filesystem::path& path, std::array<std::uint32_t, 3>* dims = nullptr);

}  // namespace nemsim::qnn
