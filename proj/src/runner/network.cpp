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

#include "nemsim/network.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nemsim/error.hpp"

namespace nemsim {

namespace {

std::string_view kind_name(const NetworkLayer& l) {
  switch (l.kind) {
    case LayerKind::Conv: return qnn::to_string(l.spec.mode);
    case LayerKind::FullyConnected: return "fc";
    case LayerKind::Add: return "add";
    case LayerKind::AvgPool: return "avgpool";
  }
  return "?";
}

std::uint64_t packed_bytes(const qnn::LayerSpec& s) {
  return (static_cast<std::uint64_t>(s.weight_count()) * static_cast<std::uint64_t>(s.qw) + 7) / 8;
}

int parse_int(const std::string& text, const std::string& source, std::size_t line, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParseError(source, line, std::string("bad ") + what + " '" + text + "'");
  return v;
}

}  // namespace

int NetworkLayer::out_h() const {
  if (kind == LayerKind::AvgPool) return 1;
  if (kind == LayerKind::Add) return in_h;
  return spec.output_extent(in_h);
}

int NetworkLayer::out_w() const {
  if (kind == LayerKind::AvgPool) return 1;
  if (kind == LayerKind::Add) return in_w;
  return spec.output_extent(in_w);
}

std::string NetworkLayer::group() const { return name.substr(0, name.find('_')); }

std::size_t NetworkDesc::conv_layer_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.kind == LayerKind::Conv;
  return n;
}

std::uint64_t NetworkDesc::total_weights() const {
  std::uint64_t n = 0;
  for (const auto& l : layers)
    if (!l.is_marker()) n += l.spec.weight_count();
  return n;
}

std::uint64_t NetworkDesc::total_weight_bytes() const {
  std::uint64_t n = 0;
  for (const auto& l : layers)
    if (!l.is_marker()) n += packed_bytes(l.spec);
  return n;
}

std::vector<std::string> NetworkDesc::groups() const {
  std::vector<std::string> g;
  for (const auto& l : layers)
    if (g.empty() || g.back() != l.group()) {
      if (std::find(g.begin(), g.end(), l.group()) == g.end()) g.push_back(l.group());
    }
  return g;
}

NetworkDesc load_network(std::istream& is, const std::string& source) {
  NetworkDesc net;
  net.name = source;
  std::string raw;
  std::size_t line_no = 0;
  const NetworkLayer* prev = nullptr;
  while (std::getline(is, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ss(raw);
    std::vector<std::string> f;
    for (std::string tok; ss >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    if (f.size() != 8) throw ParseError(source, line_no, "expected 8 fields 'name mode h w c_in c_out stride qw', got " + std::to_string(f.size()));

    NetworkLayer l;
    l.name = f[0];
    const std::string& mode = f[1];
    if (mode == "fc") {
      l.kind = LayerKind::FullyConnected;
      l.spec.mode = qnn::ConvMode::Pointwise1x1;
    } else if (mode == "add") {
      l.kind = LayerKind::Add;
    } else if (mode == "avgpool") {
      l.kind = LayerKind::AvgPool;
    } else if (auto m = qnn::parse_conv_mode(mode)) {
      l.spec.mode = *m;
    } else {
      throw ParseError(source, line_no, "unknown mode '" + mode + "'");
    }
    l.in_h = parse_int(f[2], source, line_no, "height");
    l.in_w = parse_int(f[3], source, line_no, "width");
    l.spec.c_in = parse_int(f[4], source, line_no, "c_in");
    l.spec.c_out = parse_int(f[5], source, line_no, "c_out");
    l.spec.stride = parse_int(f[6], source, line_no, "stride");
    l.spec.qw = parse_int(f[7], source, line_no, "qw");
    l.spec.padding = l.spec.kernel_size() / 2;
    if (l.in_h <= 0 || l.in_w <= 0) throw ParseError(source, line_no, "feature map must be non-empty");
    if (l.is_marker()) {
      if (l.spec.c_in != l.spec.c_out) throw ParseError(source, line_no, "markers keep the channel count");
    } else {
      if (l.kind == LayerKind::FullyConnected && (l.in_h != 1 || l.in_w != 1))
        throw ParseError(source, line_no, "fc layers take a 1x1 input");
      try {
        l.spec.validate();
      } catch (const Error& e) {
        throw ParseError(source, line_no, e.what());
      }
      if (l.out_h() <= 0 || l.out_w() <= 0) throw ParseError(source, line_no, "output feature map is empty");
    }
    if (prev && (prev->out_h() != l.in_h || prev->out_w() != l.in_w || prev->spec.c_out != l.spec.c_in))
      throw ParseError(source, line_no,
                       "input " + std::to_string(l.in_h) + "x" + std::to_string(l.in_w) + "x" +
                           std::to_string(l.spec.c_in) + " does not match the previous output " +
                           std::to_string(prev->out_h()) + "x" + std::to_string(prev->out_w()) + "x" +
                           std::to_string(prev->spec.c_out));
    net.layers.push_back(l);
    prev = &net.layers.back();
  }
  return net;
}

NetworkDesc load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  NetworkDesc net = load_network(in, path.string());
  net.name = path.stem().string();
  return net;
}

void emit_network(std::ostream& os, const NetworkDesc& net) {
  os << "# name mode h w c_in c_out stride qw\n";
  for (const auto& l : net.layers)
    os << l.name << ' ' << kind_name(l) << ' ' << l.in_h << ' ' << l.in_w << ' ' << l.spec.c_in << ' '
       << l.spec.c_out << ' ' << l.spec.stride << ' ' << l.spec.qw << '\n';
}

}  // namespace nemsim
