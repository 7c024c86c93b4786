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

#include "nemsim/tensor_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "nemsim/error.hpp"

namespace nemsim::qnn {
namespace {

constexpr std::uint8_t kMagic0 = 'N';
constexpr std::uint8_t kMagic1 = 'Q';
constexpr std::uint8_t kVersion = 1;

std::size_t element_bytes(DType t) { return t == DType::I32 ? 4 : 1; }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 | static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

std::size_t volume(const std::array<std::uint32_t, 3>& d) {
  return static_cast<std::size_t>(d[0]) * static_cast<std::size_t>(d[1]) * static_cast<std::size_t>(d[2]);
}

void save(const std::filesystem::path& path, const TensorFile& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  write_tensor_file(os, f);
}

TensorFile load(const std::filesystem::path& path, DType want) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  TensorFile f = read_tensor_file(is);
  if (f.dtype != want) throw ShapeMismatch("'" + path.string() + "' holds a different element type");
  return f;
}

std::array<std::uint32_t, 3> hwc_dims(int h, int w, int c) {
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(c)};
}

}  // namespace

void write_tensor_file(std::ostream& os, const TensorFile& f) {
  if (f.payload.size() != volume(f.dims) * element_bytes(f.dtype)) throw ShapeMismatch("payload size does not match dims");
  std::vector<std::uint8_t> header{kMagic0, kMagic1, static_cast<std::uint8_t>(f.dtype), kVersion};
  for (auto d : f.dims) put_u32(header, d);
  os.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  os.write(reinterpret_cast<const char*>(f.payload.data()), static_cast<std::streamsize>(f.payload.size()));
  if (!os) throw Error("tensor write failed");
}

TensorFile read_tensor_file(std::istream& is) {
  std::uint8_t header[kTensorHeaderBytes];
  if (!is.read(reinterpret_cast<char*>(header), kTensorHeaderBytes)) throw ShapeMismatch("truncated tensor header");
  if (header[0] != kMagic0 || header[1] != kMagic1) throw ShapeMismatch("bad tensor magic");
  if (header[2] > 2) throw ShapeMismatch("unknown tensor dtype " + std::to_string(header[2]));
  if (header[3] != kVersion) throw ShapeMismatch("unsupported tensor file version " + std::to_string(header[3]));
  TensorFile f;
  f.dtype = static_cast<DType>(header[2]);
  for (int i = 0; i < 3; ++i) f.dims[static_cast<std::size_t>(i)] = get_u32(header + 4 + 4 * i);
  f.payload.resize(volume(f.dims) * element_bytes(f.dtype));
  if (!is.read(reinterpret_cast<char*>(f.payload.data()), static_cast<std::streamsize>(f.payload.size())))
    throw ShapeMismatch("truncated tensor payload");
  return f;
}

void save_tensor(const std::filesystem::path& path, const QTensor& t) {
  save(path, TensorFile{DType::U8, hwc_dims(t.height, t.width, t.channels), t.data});
}

void save_tensor(const std::filesystem::path& path, const AccTensor& t) {
  TensorFile f{DType::I32, hwc_dims(t.height, t.width, t.channels), {}};
  for (auto v : t.data) put_u32(f.payload, static_cast<std::uint32_t>(v));
  save(path, f);
}

void save_weights(const std::filesystem::path& path, const std::vector<std::int8_t>& w, std::array<std::uint32_t, 3> dims) {
  TensorFile f{DType::I8, dims, {}};
  f.payload.reserve(w.size());
  for (auto v : w) f.payload.push_back(static_cast<std::uint8_t>(v));
  save(path, f);
}

QTensor load_qtensor(const std::filesystem::path& path) {
  TensorFile f = load(path, DType::U8);
  return QTensor(static_cast<int>(f.dims[0]), static_cast<int>(f.dims[1]), static_cast<int>(f.dims[2]), std::move(f.payload));
}

AccTensor load_acctensor(const std::filesystem::path& path) {
  TensorFile f = load(path, DType::I32);
  std::vector<std::int32_t> v(volume(f.dims));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int32_t>(get_u32(f.payload.data() + 4 * i));
  return AccTensor(static_cast<int>(f.dims[0]), static_cast<int>(f.dims[1]), static_cast<int>(f.dims[2]), std::move(v));
}

std::vector<std::int8_t> load_weights(const std::filesystem::path& path, std::array<std::uint32_t, 3>* dims) {
  TensorFile f = load(path, DType::I8);
  if (dims) *dims = f.dims;
  std::vector<std::int8_t> w(f.payload.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<std::int8_t>(f.payload[i]);
  return w;
}

}  // namespace nemsim::qnn
