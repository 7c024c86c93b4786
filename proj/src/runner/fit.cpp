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

#include "nemsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "nemsim/error.hpp"
#include "nemsim/runner.hpp"

namespace nemsim {

namespace {

using json = nlohmann::json;

double rel(double model, double target) { return std::abs(model / target - 1.0); }

// Task cycles the dense benchmark needs to reach a throughput.
double cycles_for(double throughput, const timing::BenchmarkKernel& b, double freq) {
  return 2.0 * static_cast<double>(timing::task_macs(b.spec, b.dims)) * freq / throughput;
}

// Log-space objective over the end-to-end targets.
double objective(const std::vector<TargetError>& errs) {
  double s = 0.0;
  for (const auto& e : errs)
    if (e.name.rfind("kernel_", 0) != 0) s += std::pow(std::log(e.model / e.target), 2);
  return s;
}

double get_param(const CalibrationSet& cal, const std::string& key) { return std::stod(calibration_value(cal, key)); }

void set_param(CalibrationSet& cal, const std::string& key, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  set_calibration_value(cal, key, buf);
}

}  // namespace

FitTargets load_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  FitTargets t;
  try {
    auto num = [&j](const char* key, double& field) {
      if (j.contains(key)) field = j.at(key).get<double>();
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
      static const char* known[] = {"dense8_throughput", "dense2_throughput", "dense8_efficiency",
                                    "dense2_efficiency", "pointwise_efficiency", "l3flash_latency", "l3flash_energy",
                                    "offchip_share", "l1mram_latency", "l1mram_energy", "l3mram_energy_gain",
                                    "l2mram_latency_ratio", "l2mram_energy_ratio", "free_params", "network",
                                    "tolerance"};
      if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
        throw ParseError(path.string(), 0, "unknown target '" + it.key() + "'");
    }
    num("dense8_throughput", t.dense8_throughput);
    num("dense2_throughput", t.dense2_throughput);
    num("dense8_efficiency", t.dense8_efficiency);
    num("dense2_efficiency", t.dense2_efficiency);
    num("pointwise_efficiency", t.pointwise_efficiency);
    num("l3flash_latency", t.l3flash_latency);
    num("l3flash_energy", t.l3flash_energy);
    num("offchip_share", t.offchip_share);
    num("l1mram_latency", t.l1mram_latency);
    num("l1mram_energy", t.l1mram_energy);
    num("l3mram_energy_gain", t.l3mram_energy_gain);
    num("l2mram_latency_ratio", t.l2mram_latency_ratio);
    num("l2mram_energy_ratio", t.l2mram_energy_ratio);
    num("tolerance", t.tolerance);
    if (j.contains("free_params")) t.free_params = j.at("free_params").get<std::vector<std::string>>();
    if (j.contains("network")) t.network = j.at("network").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  if (!t.network.empty() && t.network.is_relative()) t.network = path.parent_path() / t.network;
  for (const auto& p : t.free_params) {
    try {
      calibration_value(CalibrationSet{}, p);
    } catch (const InvalidConfig& e) {
      throw ParseError(path.string(), 0, e.what());
    }
  }
  return t;
}

std::vector<TargetError> evaluate_targets(const FitTargets& t, const NetworkDesc& net, const CalibrationSet& cal) {
  std::vector<TargetError> out;
  auto add = [&out](const char* name, double target, double model) {
    if (target > 0.0) out.push_back({name, target, model, rel(model, target)});
  };
  const auto d8 = timing::benchmark_kernel(qnn::ConvMode::Dense3x3, 8);
  const auto d2 = timing::benchmark_kernel(qnn::ConvMode::Dense3x3, 2);
  const auto pw = timing::benchmark_kernel(qnn::ConvMode::Pointwise1x1, 8);
  auto rate = [&cal](const timing::BenchmarkKernel& b, const OperatingPoint& opp) {
    return timing::kernel_rate(b.spec, b.dims, timing::WeightSource::Mram, opp, cal.neureka, cal.power);
  };
  add("kernel_dense8_throughput", t.dense8_throughput, rate(d8, cal.nominal).throughput);
  add("kernel_dense2_throughput", t.dense2_throughput, rate(d2, cal.nominal).throughput);
  add("kernel_dense8_efficiency", t.dense8_efficiency, rate(d8, cal.low_power).efficiency);
  add("kernel_dense2_efficiency", t.dense2_efficiency, rate(d2, cal.low_power).efficiency);
  add("kernel_pointwise_efficiency", t.pointwise_efficiency, rate(pw, cal.low_power).efficiency);

  const auto rows = compare_scenarios(net, cal.nominal, cal);
  const auto& f = rows[0];
  const auto& m3 = rows[1];
  const auto& m2 = rows[2];
  const auto& m1 = rows[3];
  add("l3flash_latency", t.l3flash_latency, f.latency);
  add("l3flash_energy", t.l3flash_energy, f.energy);
  add("l1mram_latency", t.l1mram_latency, m1.latency);
  add("l1mram_energy", t.l1mram_energy, m1.energy);
  add("l3mram_energy_gain", t.l3mram_energy_gain, f.energy / m3.energy);
  add("l2mram_latency_ratio", t.l2mram_latency_ratio, m2.latency / m1.latency);
  add("l2mram_energy_ratio", t.l2mram_energy_ratio, m2.energy / m1.energy);
  return out;
}

FitResult fit_calibration(const FitTargets& t, const NetworkDesc& net, CalibrationSet cal) {
  FitResult res;

  // Per-task overhead: both throughput points give a cycle count whose excess over the execute
  // phase is the shared constant. Take the integer with the smaller worst-case error.
  const auto d8 = timing::benchmark_kernel(qnn::ConvMode::Dense3x3, 8);
  const auto d2 = timing::benchmark_kernel(qnn::ConvMode::Dense3x3, 2);
  timing::NeurekaParams bare = cal.neureka;
  bare.launch_cycles = 0;
  const auto c8 = timing::layer_cycles(d8.spec, d8.dims, timing::WeightSource::Mram, bare);
  const auto c2 = timing::layer_cycles(d2.spec, d2.dims, timing::WeightSource::Mram, bare);
  const double k8 = cycles_for(t.dense8_throughput, d8, cal.nominal.cluster_freq) - static_cast<double>(c8.execute);
  const double k2 = cycles_for(t.dense2_throughput, d2, cal.nominal.cluster_freq) - static_cast<double>(c2.execute);
  const double fixed = static_cast<double>(c8.total - c8.execute);
  if (std::abs(k8 - k2) > 0.1 * std::max(k8, k2))
    throw FitDiverged("throughput points disagree on the overhead: " + std::to_string(k8) + " vs " + std::to_string(k2));
  long best_k = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (long k = static_cast<long>(std::floor(std::min(k8, k2))) - 2; k <= static_cast<long>(std::ceil(std::max(k8, k2))) + 2; ++k) {
    const double e = std::max(std::abs(static_cast<double>(c8.execute + k) / (k8 + c8.execute) - 1.0),
                              std::abs(static_cast<double>(c2.execute + k) / (k2 + c2.execute) - 1.0));
    if (e < best_err) best_err = e, best_k = k;
  }
  if (best_k < fixed) throw FitDiverged("overhead " + std::to_string(best_k) + " is below the fixed job costs");
  res.overhead_k = static_cast<std::uint32_t>(best_k);
  cal.neureka.launch_cycles = static_cast<std::uint32_t>(best_k - static_cast<long>(fixed));
  cal.set_provenance("neureka.launch", Provenance::DerivedFit);

  // Power factors relative to the dense 8-bit workload, from the low-power efficiency points.
  auto factor_for = [&cal](const timing::BenchmarkKernel& b, double efficiency) {
    const auto r = timing::kernel_rate(b.spec, b.dims, timing::WeightSource::Mram, cal.low_power, cal.neureka, cal.power);
    return r.throughput / (efficiency * cal.low_power.cluster_power_peak);
  };
  if (t.dense2_efficiency > 0.0) {
    cal.power.dense2 = factor_for(d2, t.dense2_efficiency);
    cal.set_provenance("power.dense2", Provenance::DerivedFit);
  }
  if (t.pointwise_efficiency > 0.0) {
    cal.power.pointwise = factor_for(timing::benchmark_kernel(qnn::ConvMode::Pointwise1x1, 8), t.pointwise_efficiency);
    cal.set_provenance("power.pointwise", Provenance::DerivedFit);
  }

  // Off-chip energy per bit from the share of the baseline energy spent on weight fetches.
  const double weight_bits = static_cast<double>(net.total_weight_bytes()) * 8.0;
  if (weight_bits > 0.0 && t.offchip_share > 0.0) {
    cal.links.get(xfer::links::kHyperbus).energy_per_bit = t.offchip_share * t.l3flash_energy / weight_bits;
    cal.set_provenance("link.hyperbus.energy", Provenance::DerivedFit);
  }
  // Wide-port read energy from the MRAM power at full port bandwidth.
  xfer::Link& port = cal.links.get(xfer::links::kMramPort);
  port.energy_per_bit = cal.nominal.mram_power / port.bandwidth(cal.nominal);
  cal.set_provenance("link.mram_port.energy", Provenance::DerivedFit);

  auto score = [&](const CalibrationSet& c) {
    ++res.evaluations;
    return objective(evaluate_targets(t, net, c));
  };

  // Golden-section search on log(value) within a factor of 4 of the current value, a few sweeps.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double current = score(cal);
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (const auto& key : t.free_params) {
      const double v0 = get_param(cal, key);
      if (!(v0 > 0.0)) throw FitDiverged("free parameter " + key + " must start positive");
      double lo = std::log(v0 / 4.0), hi = std::log(v0 * 4.0);
      auto at = [&](double x) {
        CalibrationSet c = cal;
        set_param(c, key, std::exp(x));
        return score(c);
      };
      double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
      double fa = at(a), fb = at(b);
      for (int it = 0; it < 24; ++it) {
        if (fa < fb) {
          hi = b, b = a, fb = fa;
          a = hi - phi * (hi - lo);
          fa = at(a);
        } else {
          lo = a, a = b, fa = fb;
          b = lo + phi * (hi - lo);
          fb = at(b);
        }
      }
      const double x = fa < fb ? a : b;
      const double fx = std::min(fa, fb);
      if (fx < current) {
        set_param(cal, key, std::exp(x));
        current = fx;
      }
      cal.set_provenance(key, Provenance::DerivedFit);
    }
  }

  res.cal = cal;
  res.errors = evaluate_targets(t, net, cal);
  for (const auto& e : res.errors)
    if (e.relative_error > t.tolerance)
      throw FitDiverged(e.name + " misses its target by " + std::to_string(100.0 * e.relative_error) + "%");
  return res;
}

}  // namespace nemsim
