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

// nemsim command-line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "nemsim/calibration.hpp"
#include "nemsim/error.hpp"
#include "nemsim/fit.hpp"
#include "nemsim/memory_level.hpp"
#include "nemsim/network.hpp"
#include "nemsim/neureka_timing.hpp"
#include "nemsim/runner.hpp"
#include "nemsim/validate.hpp"

#ifndef NEMSIM_DATA_DIR
#define NEMSIM_DATA_DIR "data"
#endif

using namespace nemsim;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitUnschedulable = 3;
constexpr int kExitFitDiverged = 4;

const std::string kDataDir = NEMSIM_DATA_DIR;

CalibrationSet calibration_from(const std::string& path) {
  return path.empty() ? CalibrationSet{} : load_calibration(std::filesystem::path(path));
}

void print_totals(const InferenceReport& r) {
  std::printf("%-8s %-9s latency %8.3f ms  energy %7.3f mJ  %6.1f fps  %6.1f mW at 30 fps\n",
              std::string(to_string(r.scenario)).c_str(), r.opp.c_str(), r.latency * 1e3, r.millijoules(), r.fps(),
              r.average_power(30.0) * 1e3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency, energy and bit-exact numerics of an at-MRAM neural accelerator cluster"};
  app.require_subcommand(1);

  std::string network = kDataDir + "/mobilenet_v2_1.0_224.net";
  std::string cal_path = kDataDir + "/default.cal";
  std::string opp_name = "nominal";

  auto* sim = app.add_subcommand("simulate", "Run one network under one scenario");
  std::string scenario = "l1mram", out, schedule_out;
  sim->add_option("--network", network, "Network description (.net)");
  sim->add_option("--scenario", scenario, "l3flash, l3mram, l2mram or l1mram");
  sim->add_option("--opp", opp_name, "nominal or low_power");
  sim->add_option("--cal", cal_path, "Calibration file (.cal)");
  sim->add_option("--out", out, "Per-layer report CSV");
  sim->add_option("--schedule", schedule_out, "Tile schedule dump CSV");

  auto* cmp = app.add_subcommand("compare", "Run all four scenarios and print gains against L3Flash");
  cmp->add_option("--network", network, "Network description (.net)");
  cmp->add_option("--cal", cal_path, "Calibration file (.cal)");
  cmp->add_option("--opp", opp_name, "nominal or low_power");

  auto* peak = app.add_subcommand("peak", "Throughput and efficiency of a 6x6 benchmark kernel");
  std::string kernel = "dense3x3", weights = "mram";
  int qw = 8;
  peak->add_option("--kernel", kernel, "dense3x3, dw3x3 or pw1x1");
  peak->add_option("--qw", qw, "Weight precision in bits")->check(CLI::Range(2, 8));
  peak->add_option("--weights", weights, "mram or l1")->check(CLI::IsMember({"mram", "l1"}));
  peak->add_option("--opp", opp_name, "nominal or low_power");
  peak->add_option("--cal", cal_path, "Calibration file (.cal)");

  auto* val = app.add_subcommand("validate", "Run the oracle-equivalence and property suites");
  validate::Options vopt;
  bool quick = false;
  val->add_option("--seed", vopt.seed, "Random seed");
  val->add_flag("--quick", quick, "Smaller case counts and no exhaustive arbiter run");
  val->add_option("--cal", cal_path, "Calibration file (.cal)");

  auto* fit = app.add_subcommand("fit", "Fit the calibration to published aggregates");
  std::string targets = kDataDir + "/targets.json", fit_out;
  fit->add_option("--targets", targets, "Targets file (JSON)");
  fit->add_option("--network", network, "Network description, overrides the targets file");
  fit->add_option("--out", fit_out, "Write the fitted calibration here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*sim) {
      const CalibrationSet cal = calibration_from(cal_path);
      const auto id = parse_scenario(scenario);
      if (!id) throw InvalidConfig("unknown scenario '" + scenario + "'");
      const NetworkDesc net = load_network(std::filesystem::path(network));
      const ScenarioConfig sc = ScenarioConfig::make(*id);
      const InferenceReport r = run_network(net, sc, cal.opp(opp_name), cal);
      print_totals(r);
      if (!out.empty()) emit_report(std::filesystem::path(out), r);
      if (!schedule_out.empty()) {
        std::ofstream os(schedule_out);
        if (!os) throw InvalidConfig("cannot write " + schedule_out);
        sched::write_schedule_csv(os, plan_network(net, sc, cal));
      }
    } else if (*cmp) {
      const CalibrationSet cal = calibration_from(cal_path);
      const NetworkDesc net = load_network(std::filesystem::path(network));
      const OperatingPoint& opp = cal.opp(opp_name);
      const auto rows = compare_scenarios(net, opp, cal);
      std::printf("%-8s %10s %10s %9s %9s\n", "scenario", "latency", "energy", "speedup", "energy");
      for (const auto& r : rows)
        std::printf("%-8s %7.3f ms %7.3f mJ %8.2fx %8.2fx\n", std::string(to_string(r.scenario)).c_str(),
                    r.latency * 1e3, r.energy * 1e3, r.latency_gain, r.energy_gain);
      const auto& m2 = rows[2];
      const auto& m1 = rows[3];
      std::printf("L1MRAM over L2MRAM: %.1f%% latency, %.1f%% energy\n", 100.0 * improvement(m1.latency, m2.latency),
                  100.0 * improvement(m1.energy, m2.energy));
    } else if (*peak) {
      const CalibrationSet cal = calibration_from(cal_path);
      const auto mode = qnn::parse_conv_mode(kernel);
      if (!mode) throw InvalidConfig("unknown kernel '" + kernel + "'");
      const auto b = timing::benchmark_kernel(*mode, qw);
      const auto src = weights == "l1" ? timing::WeightSource::L1 : timing::WeightSource::Mram;
      const OperatingPoint& opp = cal.opp(opp_name);
      const auto rate = timing::kernel_rate(b.spec, b.dims, src, opp, cal.neureka, cal.power);
      std::printf("%s qw=%d weights=%s opp=%s\n", kernel.c_str(), qw, weights.c_str(), opp.name.c_str());
      std::printf("  cycles      %llu\n", static_cast<unsigned long long>(rate.cycles));
      std::printf("  throughput  %.1f GOp/s (execute-only bound %.1f GOp/s)\n", rate.throughput * 1e-9,
                  timing::ideal_throughput(b.spec, b.dims, opp) * 1e-9);
      std::printf("  power       %.1f mW\n", rate.power * 1e3);
      std::printf("  efficiency  %.3f TOp/J\n", rate.efficiency * 1e-12);
    } else if (*val) {
      const CalibrationSet cal = calibration_from(cal_path);
      if (quick) {
        vopt.conv_cases = 200;
        vopt.paging_schedules = 1000;
        vopt.exhaustive_arbiter = false;
      }
      bool all = true;
      for (const auto& c : validate::run_all(vopt, cal)) {
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.passed;
      }
      return all ? 0 : 1;
    } else if (*fit) {
      FitTargets t = load_targets(std::filesystem::path(targets));
      if (fit->count("--network")) t.network = network;
      if (t.network.empty()) t.network = network;
      const NetworkDesc net = load_network(t.network);
      const FitResult r = fit_calibration(t, net);
      std::printf("overhead K = %u cycles, %d model evaluations\n", r.overhead_k, r.evaluations);
      for (const auto& e : r.errors)
        std::printf("  %-22s target %-12.5g model %-12.5g error %5.1f%%\n", e.name.c_str(), e.target, e.model,
                    100.0 * e.relative_error);
      if (fit_out.empty()) emit_calibration(std::cout, r.cal);
      else emit_calibration(std::filesystem::path(fit_out), r.cal);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const Unschedulable& e) {
    std::fprintf(stderr, "unschedulable: %s\n", e.what());
    return kExitUnschedulable;
  } catch (const FitDiverged& e) {
    std::fprintf(stderr, "fit diverged: %s\n", e.what());
    return kExitFitDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
