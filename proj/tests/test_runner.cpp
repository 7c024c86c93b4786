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

#include <cmath>
#include <fstream>
#include <sstream>

#include "nemsim/calibration.hpp"
#include "nemsim/error.hpp"
#include "nemsim/fit.hpp"
#include "nemsim/network.hpp"
#include "nemsim/runner.hpp"

using namespace nemsim;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(NEMSIM_DATA_DIR) / name; }

NetworkDesc parse_net(const std::string& text) {
  std::istringstream is(text);
  return load_network(is, "net");
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_net(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::size_t cal_error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    load_calibration(is, "cal");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("calibration files round-trip") {
    CalibrationSet cal;
    set_calibration_value(cal, "link.hyperbus.bandwidth", "4.5e9");
    set_calibration_value(cal, "arbiter.priority", "log");
    cal.set_provenance("link.hyperbus.bandwidth", Provenance::DerivedFit);
    std::stringstream ss;
    emit_calibration(ss, cal);
    const auto back = load_calibration(ss, "mem");
    CHECK(back == cal);
    CHECK(back.links.get("hyperbus").sustained_bw == 4.5e9);
    CHECK(back.provenance_of("link.hyperbus.bandwidth") == Provenance::DerivedFit);
    CHECK(back.provenance_of("opp.nominal.cluster_freq") == Provenance::Paper);
    CHECK(calibration_value(back, "opp.nominal.cluster_freq") == "360000000");
    CHECK(calibration_keys().size() > 40);
  }

  TEST_CASE("calibration errors name the line") {
    CHECK(cal_error_line("# header\nopp.nominal.voltage = 0.8 V # paper\nwarp.factor = 9 - # default\n") == 3);
    CHECK(cal_error_line("link.hyperbus.bandwidth = 3.2e9 B/s # default\n") == 1);
    CHECK(cal_error_line("\nlink.hyperbus.bandwidth = 3.2e9 bit/s # rumour\n") == 2);
    CHECK(cal_error_line("l1.capacity = lots B # paper\n") == 1);
    // Whole-file validation: the bandwidth must stay positive.
    std::istringstream bad("link.cluster_dma.bandwidth = 0 bit/s # paper\n");
    CHECK_THROWS_AS(load_calibration(bad, "cal"), Error);
    CalibrationSet cal;
    CHECK_THROWS_AS(set_calibration_value(cal, "nope", "1"), InvalidConfig);
    CHECK_THROWS_AS(load_calibration(std::filesystem::path("/nonexistent.cal")), ParseError);
  }

  TEST_CASE("the shipped calibration tags fitted values") {
    const auto cal = load_calibration(data("default.cal"));
    CHECK(cal.provenance_of("link.hyperbus.bandwidth") == Provenance::DerivedFit);
    CHECK(cal.provenance_of("neureka.launch") == Provenance::DerivedFit);
    CHECK(cal.provenance_of("link.mram_port.bandwidth") == Provenance::Paper);
    CHECK(cal.provenance_of("paging.miss_service") == Provenance::Default);
  }

  TEST_CASE("MobileNet-V2 description") {
    const auto net = load_network(data("mobilenet_v2_1.0_224.net"));
    CHECK(net.conv_layer_count() == 52);
    CHECK(net.total_weights() == 3469760);
    CHECK(net.total_weight_bytes() == 3469760);
    CHECK(net.groups() == std::vector<std::string>{"stem", "bn1", "bn2", "bn3", "bn4", "bn5", "bn6", "bn7", "head"});
    std::stringstream ss;
    emit_network(ss, net);
    const auto back = load_network(ss, "mem");
    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      CHECK(back.layers[i].name == net.layers[i].name);
      CHECK(back.layers[i].spec.c_out == net.layers[i].spec.c_out);
      CHECK(back.layers[i].in_h == net.layers[i].in_h);
    }
  }

  TEST_CASE("malformed network files") {
    const std::string ok = "a dense3x3 8 8 3 16 1 8\n";
    CHECK(parse_error_line(ok + "b pw1x1 8 8 16 32 1\n") == 2);
    CHECK(parse_error_line(ok + "# fine\nb conv5x5 8 8 16 32 1 8\n") == 3);
    CHECK(parse_error_line(ok + "b pw1x1 8 8 12 32 1 8\n") == 2);  // does not compose
    CHECK(parse_error_line(ok + "b pw1x1 8 8 16 32 1 9\n") == 2);
    CHECK(parse_error_line("a dense3x3 0 8 3 16 1 8\n") == 1);
    CHECK(parse_error_line(ok + "b fc 8 8 16 10 1 8\n") == 2);
    CHECK(parse_error_line(ok) == 0);
  }

  TEST_CASE("an empty network costs nothing") {
    const auto net = parse_net("# nothing\n\n");
    CHECK(net.layers.empty());
    CalibrationSet cal;
    for (ScenarioId id : kAllScenarios) {
      auto r = run_network(net, ScenarioConfig::make(id), cal.nominal, cal);
      CHECK(r.latency == 0.0);
      CHECK(r.energy == 0.0);
      CHECK(r.fps() == 0.0);
    }
  }

  TEST_CASE("markers are free") {
    CalibrationSet cal;
    const auto a = parse_net("a pw1x1 8 8 32 32 1 8\nb pw1x1 8 8 32 32 1 8\n");
    const auto b = parse_net("a pw1x1 8 8 32 32 1 8\nb pw1x1 8 8 32 32 1 8\nb_add add 8 8 32 32 1 8\n");
    const auto sc = ScenarioConfig::make(ScenarioId::L2MRAM);
    auto ra = run_network(a, sc, cal.nominal, cal);
    auto rb = run_network(b, sc, cal.nominal, cal);
    CHECK(ra.latency == rb.latency);
    CHECK(ra.energy == rb.energy);
    CHECK(rb.layers.size() == 2);
  }

  TEST_CASE("weights beyond the store need paging") {
    CalibrationSet cal;
    std::string text;
    for (int i = 0; i < 3; ++i) text += "p" + std::to_string(i) + " pw1x1 1 1 2048 2048 1 8\n";
    const auto net = parse_net(text);
    auto sc = ScenarioConfig::make(ScenarioId::L1MRAM);
    CHECK_THROWS_AS(run_network(net, sc, cal.nominal, cal), Unschedulable);
    sc.paging = true;
    CHECK(run_network(net, sc, cal.nominal, cal).latency > 0.0);
  }

  TEST_CASE("reports round-trip through CSV") {
    const auto cal = load_calibration(data("default.cal"));
    const auto net = load_network(data("mobilenet_v2_1.0_224.net"));
    for (ScenarioId id : kAllScenarios) {
      auto r = run_network(net, ScenarioConfig::make(id), cal.nominal, cal);
      std::stringstream ss;
      emit_report(ss, r);
      const auto back = load_report(ss, "mem");
      CHECK(back == r);
      CHECK(r.latency == doctest::Approx(r.total().latency));
      CHECK(r.energy == doctest::Approx(r.total().energy.total()));
    }
    std::istringstream bad("# network: x\nlayer,mode\nq,dense3x3\n");
    CHECK_THROWS_AS(load_report(bad, "bad"), ParseError);
  }

  TEST_CASE("scenario comparison") {
    CHECK(improvement(2.0, 2.0) == 0.0);
    CHECK(improvement(1.0, 1.27) == doctest::Approx(0.27));
    const auto cal = load_calibration(data("default.cal"));
    const auto net = load_network(data("mobilenet_v2_1.0_224.net"));
    const auto rows = compare_scenarios(net, cal.nominal, cal);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].scenario == ScenarioId::L3Flash);
    CHECK(rows[0].latency_gain == 1.0);
    CHECK(rows[0].energy_gain == 1.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].latency < rows[i - 1].latency);
      CHECK(rows[i].energy < rows[i - 1].energy);
      CHECK(rows[i].latency_gain == doctest::Approx(rows[0].latency / rows[i].latency));
    }
    const auto self = compare_scenarios(net, cal.nominal, cal, ScenarioId::L2MRAM);
    CHECK(self[2].latency_gain == 1.0);
  }

  TEST_CASE("average power at a frame rate") {
    InferenceReport r;
    r.latency = 10e-3;
    r.energy = 2e-3;
    r.sleep_power = 0.015;
    CHECK(r.average_power(30) == doctest::Approx(2e-3 * 30 + 0.015 * (1 - 0.3)));
    r.latency = 50e-3;  // cannot keep up: no sleep time left
    CHECK(r.average_power(30) == doctest::Approx(2e-3 * 30));
  }

  TEST_CASE("calibration fit") {
    const auto net = load_network(data("mobilenet_v2_1.0_224.net"));
    FitTargets t;
    const auto fit = fit_calibration(t, net);
    CHECK(fit.overhead_k == 390);
    // One off-chip read of every weight carries the off-chip share of the energy.
    const double e_off = 0.55 * 3.8e-3 / (3469760.0 * 8.0);
    CHECK(fit.cal.links.get("hyperbus").energy_per_bit == doctest::Approx(e_off).epsilon(1e-6));
    CHECK(e_off == doctest::Approx(75.3e-12).epsilon(0.01));
    CHECK(fit.cal.links.get("mram_port").energy_per_bit == doctest::Approx(0.069 / 92.16e9));
    for (const auto& e : fit.errors) CHECK(e.relative_error <= t.tolerance);
    CHECK(fit.cal.provenance_of("link.hyperbus.bandwidth") == Provenance::DerivedFit);

    FitTargets impossible = t;
    impossible.free_params.clear();
    impossible.l1mram_latency = 1e-3;
    CHECK_THROWS_AS(fit_calibration(impossible, net), FitDiverged);
  }

  TEST_CASE("target files") {
    const auto t = load_targets(data("targets.json"));
    CHECK(t.dense8_throughput == 698e9);
    CHECK(t.offchip_share == 0.55);
    CHECK(t.network.filename() == "mobilenet_v2_1.0_224.net");
    const auto tmp = std::filesystem::temp_directory_path() / "nemsim_bad_targets.json";
    std::ofstream(tmp) << "{\"dense8_throughput\": 698e9, \"warp\": 1}";
    CHECK_THROWS_AS(load_targets(tmp), ParseError);
    std::filesystem::remove(tmp);
  }
}
