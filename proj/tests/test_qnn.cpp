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

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "nemsim/conv.hpp"
#include "nemsim/error.hpp"
#include "nemsim/requant.hpp"
#include "nemsim/tensor_io.hpp"
#include "nemsim/weight_packing.hpp"
#include "oracles.hpp"

using namespace nemsim;
using namespace nemsim::qnn;

namespace {

LayerSpec make_spec(ConvMode m, int ci, int co, int qw, int stride = 1, int pad = 0) {
  LayerSpec s;
  s.mode = m;
  s.c_in = ci;
  s.c_out = co;
  s.qw = qw;
  s.stride = stride;
  s.padding = pad;
  return s;
}

RequantParams random_requant(std::mt19937& rng, int c) {
  RequantParams p;
  std::uniform_int_distribution<std::uint32_t> sc(1, 300);
  std::uniform_int_distribution<std::int32_t> bi(-50000, 50000);
  std::uniform_int_distribution<int> sh(0, 20);
  for (int i = 0; i < c; ++i) {
    p.scale.push_back(sc(rng));
    p.bias.push_back(bi(rng));
    p.shift.push_back(static_cast<std::uint8_t>(sh(rng)));
  }
  return p;
}

}  // namespace

TEST_SUITE("qnn") {
  TEST_CASE("requantize scalar examples") {
    CHECK(requantize(100, 1, 0, 0) == 100);
    CHECK(requantize(-1, 1, 0, 0) == 0);
    CHECK(requantize(300, 3, 40, 2) == 235);
    CHECK(requantize(1000, 1, 0, 0) == 255);
    // arithmetic shift floors toward minus infinity
    CHECK(requantize(-5, 1, 300, 1) == 147);
  }

  TEST_CASE("requantize agrees with the scalar definition and is monotone") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::int32_t> acc(INT32_MIN, INT32_MAX);
    std::uniform_int_distribution<std::uint32_t> sc(0, UINT32_MAX);
    std::uniform_int_distribution<std::int32_t> bi(INT32_MIN, INT32_MAX);
    std::uniform_int_distribution<int> sh(0, 31);
    for (int i = 0; i < 20000; ++i) {
      const auto a = acc(rng);
      const auto s = sc(rng);
      const auto b = bi(rng);
      const int h = sh(rng);
      REQUIRE(requantize(a, s, b, static_cast<unsigned>(h)) == testing::scalar_requant(a, s, b, h));
    }
    for (int i = 0; i < 200; ++i) {
      const auto s = std::uniform_int_distribution<std::uint32_t>(1, 1000)(rng);
      const auto b = bi(rng) / 1000;
      const int h = sh(rng) % 16;
      std::uint8_t prev = 0;
      for (std::int32_t a = -70000; a <= 70000; a += 97) {
        const auto q = requantize(a, s, b, static_cast<unsigned>(h));
        REQUIRE(q >= prev);
        prev = q;
      }
    }
  }

  TEST_CASE("layer spec validation") {
    auto s = make_spec(ConvMode::Depthwise3x3, 8, 16, 8);
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = make_spec(ConvMode::Dense3x3, 8, 16, 1);
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = make_spec(ConvMode::Dense3x3, 8, 16, 8, 3);
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = make_spec(ConvMode::Pointwise1x1, 8, 2, 8);
    s.raw_output = true;
    s.requant = RequantParams{{1, 1}, {0, 0}, {0, 0}};
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s.raw_output = false;
    s.requant->shift[1] = 32;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
  }

  TEST_CASE("block counts follow the fetch order") {
    auto s = make_spec(ConvMode::Dense3x3, 252, 32, 8);
    std::vector<std::int8_t> w(s.weight_count(), 1);
    auto ws = pack_weights(w, s);
    CHECK(ws.blocks.size() == 2304);  // 9 chunks x 32 out x 8 planes
    CHECK(ws.bit_count == 2304u * 252u);

    s = make_spec(ConvMode::Pointwise1x1, 32, 1, 8);
    ws = pack_weights(std::vector<std::int8_t>(32, 0), s);
    CHECK(ws.blocks.size() == 1);
    CHECK(ws.bit_count == 256);

    // all weights at the minimum code: every payload bit clear
    s = make_spec(ConvMode::Dense3x3, 28, 1, 2);
    ws = pack_weights(std::vector<std::int8_t>(28 * 9, -2), s);
    CHECK(ws.blocks.size() == 2);
    CHECK(ws.bit_count == 2 * 252);
    for (const auto& b : ws.blocks)
      for (auto word : b) CHECK(word == 0);

    s = make_spec(ConvMode::Depthwise3x3, 60, 60, 3);
    CHECK(pack_weights(std::vector<std::int8_t>(60 * 9, 0), s).blocks.size() == 3 * 3);
    s = make_spec(ConvMode::Pointwise1x1, 70, 40, 4);
    CHECK(pack_weights(std::vector<std::int8_t>(70 * 40, 0), s).blocks.size() == 3 * 40);
  }

  TEST_CASE("pack_weights errors") {
    auto s = make_spec(ConvMode::Dense3x3, 4, 2, 4);
    std::vector<std::int8_t> w(s.weight_count(), 0);
    w[5] = 8;
    CHECK_THROWS_AS(pack_weights(w, s), PrecisionOverflow);
    w[5] = -9;
    CHECK_THROWS_AS(pack_weights(w, s), PrecisionOverflow);
    w.pop_back();
    CHECK_THROWS_AS(pack_weights(w, s), ShapeMismatch);
  }

  TEST_CASE("extract_bitplane examples") {
    // signed 1 at qw=3 has code 0b101
    std::vector<std::int8_t> one{1};
    CHECK(extract_bitplane(one, 3, 0)[0]);
    CHECK_FALSE(extract_bitplane(one, 3, 1)[0]);
    CHECK(extract_bitplane(one, 3, 2)[0]);
    CHECK_THROWS_AS(extract_bitplane(one, 3, 3), IndexOutOfRange);

    for (int qw = 2; qw <= 8; ++qw) {
      std::vector<std::int8_t> top(252, static_cast<std::int8_t>((1 << (qw - 1)) - 1));  // code 2^qw - 1
      for (int b = 0; b < qw; ++b) CHECK(extract_bitplane(top, qw, b).count() == 252);
    }
  }

  TEST_CASE("bit-planes reconstruct every weight") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::int8_t> chunk(28 * 9);
      std::uniform_int_distribution<int> d(-8, 7);
      for (auto& v : chunk) v = static_cast<std::int8_t>(d(rng));
      std::vector<int> rebuilt(chunk.size(), 0);
      for (int b = 0; b < 4; ++b) {
        auto plane = extract_bitplane(chunk, 4, b);
        for (std::size_t j = 0; j < chunk.size(); ++j) rebuilt[j] += plane[j] << b;
      }
      for (std::size_t j = 0; j < chunk.size(); ++j) REQUIRE(rebuilt[j] - 8 == chunk[j]);
    }
  }

  TEST_CASE("bit-serial products equal full products") {
    for (int qw = 2; qw <= 8; ++qw) {
      const int off = 1 << (qw - 1);
      for (int w = -off; w < off; ++w) {
        const auto code = encode_weight(w, qw);
        for (int a = 0; a < 256; ++a) {
          long sum = 0;
          for (int b = 0; b < qw; ++b) sum += (long{(code >> b) & 1} * a) << b;
          REQUIRE(sum - long{off} * a == long{w} * a);
        }
      }
    }
  }

  TEST_CASE("pack/unpack round trip") {
    std::mt19937 rng(5);
    for (auto m : {ConvMode::Dense3x3, ConvMode::Depthwise3x3, ConvMode::Pointwise1x1}) {
      for (int qw : {2, 3, 5, 8}) {
        for (int t = 0; t < 5; ++t) {
          const int ci = std::uniform_int_distribution<int>(1, 90)(rng);
          const int co = m == ConvMode::Depthwise3x3 ? ci : std::uniform_int_distribution<int>(1, 70)(rng);
          auto s = make_spec(m, ci, co, qw);
          auto w = testing::random_weights(rng, s);
          auto ws = pack_weights(w, s);
          REQUIRE(ws.blocks.size() == expected_block_count(ws.layout));
          REQUIRE(unpack_weights(ws) == w);
        }
      }
    }
  }

  TEST_CASE("conv_ref examples") {
    auto s = make_spec(ConvMode::Dense3x3, 1, 1, 2, 1, 1);
    QTensor in(1, 1, 1, {7});
    auto out = conv_ref(in, std::vector<std::int8_t>(9, 1), s);
    CHECK(out.height == 1);
    CHECK(out.data[0] == 7);

    std::mt19937 rng(9);
    auto pw = make_spec(ConvMode::Pointwise1x1, 5, 5, 2);
    std::vector<std::int8_t> eye(25, 0);
    for (int i = 0; i < 5; ++i) eye[static_cast<std::size_t>(i * 5 + i)] = 1;
    auto x = testing::random_tensor(rng, 4, 3, 5);
    auto y = conv_ref(x, eye, pw);
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == x.data[i]);

    CHECK_THROWS_AS(conv_ref(x, std::vector<std::int8_t>(24, 0), pw), ShapeMismatch);
    auto bad = make_spec(ConvMode::Pointwise1x1, 6, 5, 2);
    CHECK_THROWS_AS(conv_ref(x, std::vector<std::int8_t>(30, 0), bad), ShapeMismatch);
  }

  TEST_CASE("conv_ref matches the scatter oracle on 8x8x28 inputs") {
    for (unsigned seed : {1u, 2u, 3u}) {
      std::mt19937 rng(seed);
      for (auto m : {ConvMode::Dense3x3, ConvMode::Depthwise3x3, ConvMode::Pointwise1x1}) {
        auto s = make_spec(m, 28, m == ConvMode::Depthwise3x3 ? 28 : 16, 8, 1, m == ConvMode::Pointwise1x1 ? 0 : 1);
        auto x = testing::random_tensor(rng, 8, 8, 28);
        auto w = testing::random_weights(rng, s);
        auto got = conv_ref(x, w, s);
        auto want = testing::scatter_conv(x, w, s);
        REQUIRE(got.data.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(got.data[i] == static_cast<std::int32_t>(want[i]));
      }
    }
  }

  TEST_CASE("conv_neureka examples") {
    std::mt19937 rng(21);
    // zero input: only the bias survives
    auto s = make_spec(ConvMode::Dense3x3, 30, 40, 8, 1, 1);
    s.requant = random_requant(rng, 40);
    auto w = testing::random_weights(rng, s);
    auto out = std::get<QTensor>(conv_neureka(QTensor(7, 9, 30), pack_weights(w, s), s));
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x)
        for (int o = 0; o < 40; ++o) {
          const auto& p = *s.requant;
          REQUIRE(out.at(y, x, o) == requantize(0, p.scale[static_cast<std::size_t>(o)], p.bias[static_cast<std::size_t>(o)],
                                                p.shift[static_cast<std::size_t>(o)]));
        }

    // depthwise delta kernels reproduce the requantized input
    auto d = make_spec(ConvMode::Depthwise3x3, 33, 33, 4, 1, 1);
    d.requant = random_requant(rng, 33);
    std::vector<std::int8_t> delta(33 * 9, 0);
    for (int c = 0; c < 33; ++c) delta[static_cast<std::size_t>(c * 9 + 4)] = 1;
    auto x = testing::random_tensor(rng, 10, 7, 33);
    auto got = std::get<QTensor>(conv_neureka(x, pack_weights(delta, d), d));
    AccTensor xin(10, 7, 33);
    for (std::size_t i = 0; i < x.data.size(); ++i) xin.data[i] = x.data[i];
    CHECK(got == requantize(xin, *d.requant));

    // stream packed for another layer is rejected
    auto other = make_spec(ConvMode::Dense3x3, 30, 39, 8, 1, 1);
    CHECK_THROWS_AS(conv_neureka(QTensor(7, 9, 30), pack_weights(std::vector<std::int8_t>(other.weight_count(), 0), other), s),
                    ShapeMismatch);
  }

  TEST_CASE("conv_neureka is bit-exact against the oracle on randomized layers") {
    std::mt19937 rng(1234);
    int cases = 0;
    for (int i = 0; i < 300; ++i) {
      const auto m = static_cast<ConvMode>(i % 3);
      const int qw = std::array{2, 3, 4, 8}[static_cast<std::size_t>((i / 3) % 4)];
      const int stride = 1 + (i / 12) % 2;
      const int ci = std::uniform_int_distribution<int>(1, 70)(rng);
      const int co = m == ConvMode::Depthwise3x3 ? ci : std::uniform_int_distribution<int>(1, 70)(rng);
      const int pad = m == ConvMode::Pointwise1x1 ? 0 : std::uniform_int_distribution<int>(0, 1)(rng);
      auto s = make_spec(m, ci, co, qw, stride, pad);
      const int h = std::uniform_int_distribution<int>(3, 15)(rng);
      const int w = std::uniform_int_distribution<int>(3, 15)(rng);
      if (i % 5 == 0)
        s.raw_output = true;
      else
        s.requant = random_requant(rng, co);
      auto x = testing::random_tensor(rng, h, w, ci);
      auto wt = testing::random_weights(rng, s);
      auto got = conv_neureka(x, pack_weights(wt, s), s);
      auto want = conv_ref_output(x, wt, s);
      REQUIRE(got == want);
      ++cases;
    }
    CHECK(cases == 300);
  }

  TEST_CASE("32-bit accumulators wrap like the oracle") {
    // 8192 channels of 255 * 127 over 9 taps pushes the sum past 2^31
    auto s = make_spec(ConvMode::Dense3x3, 8192, 1, 8, 1, 0);
    s.raw_output = true;
    QTensor x(3, 3, 8192);
    std::fill(x.data.begin(), x.data.end(), 255);
    std::vector<std::int8_t> w(s.weight_count(), 127);
    auto got = std::get<AccTensor>(conv_neureka(x, pack_weights(w, s), s));
    const std::int64_t full = std::int64_t{255} * 127 * 9 * 8192;
    CHECK(full > INT32_MAX);
    CHECK(got.data[0] == static_cast<std::int32_t>(static_cast<std::uint32_t>(full)));
    CHECK(got == conv_ref(x, w, s));
  }

  TEST_CASE("permuting input channels together with weights leaves outputs unchanged") {
    std::mt19937 rng(77);
    for (auto m : {ConvMode::Dense3x3, ConvMode::Pointwise1x1}) {
      const int ci = 45, co = 20;
      auto s = make_spec(m, ci, co, 5, 1, m == ConvMode::Dense3x3 ? 1 : 0);
      s.raw_output = true;
      auto x = testing::random_tensor(rng, 9, 9, ci);
      auto w = testing::random_weights(rng, s);
      std::vector<int> perm(static_cast<std::size_t>(ci));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      QTensor xp(9, 9, ci);
      for (int y = 0; y < 9; ++y)
        for (int xx = 0; xx < 9; ++xx)
          for (int c = 0; c < ci; ++c) xp.at(y, xx, c) = x.at(y, xx, perm[static_cast<std::size_t>(c)]);
      const int kk = s.kernel_size() * s.kernel_size();
      std::vector<std::int8_t> wp(w.size());
      for (int o = 0; o < co; ++o)
        for (int c = 0; c < ci; ++c)
          for (int t = 0; t < kk; ++t)
            wp[static_cast<std::size_t>((o * ci + c) * kk + t)] = w[static_cast<std::size_t>((o * ci + perm[static_cast<std::size_t>(c)]) * kk + t)];
      CHECK(conv_neureka(x, pack_weights(w, s), s) == conv_neureka(xp, pack_weights(wp, s), s));
    }
  }

  TEST_CASE("tensor files are byte-exact and round-trip") {
    QTensor t(1, 2, 3, {1, 2, 3, 4, 5, 250});
    std::stringstream ss;
    write_tensor_file(ss, TensorFile{DType::U8, {1, 2, 3}, t.data});
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == 16 + 6);
    CHECK(bytes.substr(0, 4) == std::string("NQ\x00\x01", 4));
    CHECK(bytes.substr(4, 12) == std::string("\x01\0\0\0\x02\0\0\0\x03\0\0\0", 12));
    CHECK(static_cast<unsigned char>(bytes[21]) == 250);

    auto back = read_tensor_file(ss);
    CHECK(back.dims == std::array<std::uint32_t, 3>{1, 2, 3});
    CHECK(back.payload == t.data);

    std::stringstream bad(std::string("NX\x00\x01", 4) + std::string(12, '\0'));
    CHECK_THROWS_AS(read_tensor_file(bad), ShapeMismatch);

    const auto dir = std::filesystem::temp_directory_path();
    AccTensor a(2, 1, 2, {-1, 7, INT32_MIN, INT32_MAX});
    save_tensor(dir / "nemsim_acc.bin", a);
    CHECK(load_acctensor(dir / "nemsim_acc.bin") == a);
    save_tensor(dir / "nemsim_q.bin", t);
    CHECK(load_qtensor(dir / "nemsim_q.bin") == t);
    std::vector<std::int8_t> w{-4, 3, 0, 1};
    save_weights(dir / "nemsim_w.bin", w, {1, 1, 4});
    CHECK(load_weights(dir / "nemsim_w.bin") == w);
    CHECK_THROWS_AS(load_qtensor(dir / "nemsim_w.bin"), ShapeMismatch);
  }
}
