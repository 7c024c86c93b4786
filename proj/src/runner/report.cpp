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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nemsim/error.hpp"
#include "nemsim/link.hpp"
#include "nemsim/runner.hpp"

namespace nemsim {

double InferenceReport::average_power(double target_fps) const {
  const double busy = std::min(1.0, latency * target_fps);
  return energy * target_fps + sleep_power * (1.0 - busy);
}

sched::LayerReport InferenceReport::total(double threshold) const {
  sched::LayerReport t;
  t.layer = "total";
  for (const auto& l : layers) t += l;
  t.regime = sched::classify_regime(t, threshold);
  return t;
}

std::vector<sched::TileSchedule> plan_network(const NetworkDesc& net, const ScenarioConfig& sc,
                                              const CalibrationSet& cal) {
  std::vector<sched::TileSchedule> out;
  for (const auto& l : net.layers)
    if (!l.is_marker()) out.push_back(sched::plan_tiles(l.shape(), sc, cal));
  return out;
}

InferenceReport run_network(const NetworkDesc& net, const ScenarioConfig& sc, const OperatingPoint& opp,
                            const CalibrationSet& cal) {
  if (!sc.paging && net.total_weight_bytes() > sc.weight_store.capacity)
    throw Unschedulable(net.name, std::to_string(net.total_weight_bytes()) + " weight bytes exceed the " +
                                      sc.weight_store.name() + " capacity without paging");
  InferenceReport r;
  r.network = net.name;
  r.scenario = sc.id;
  r.opp = opp.name;
  r.sleep_power = cal.sleep_power;
  for (const auto& l : net.layers) {
    if (l.is_marker()) continue;
    const auto ts = sched::plan_tiles(l.shape(), sc, cal);
    r.layers.push_back(sched::layer_timeline(ts, sc, opp, cal));
    r.latency += r.layers.back().latency;
    r.energy += r.layers.back().energy.total();
  }
  return r;
}

sched::LayerReport group_report(const InferenceReport& r, const std::string& group, double threshold) {
  sched::LayerReport g;
  g.layer = group;
  bool any = false;
  for (const auto& l : r.layers)
    if (l.layer.substr(0, l.layer.find('_')) == group) {
      if (!any) g.mode = l.mode;
      g += l;
      any = true;
    }
  if (!any) throw InvalidConfig("no layers in group '" + group + "'");
  g.regime = sched::classify_regime(g, threshold);
  return g;
}

std::vector<ComparisonRow> compare_scenarios(const NetworkDesc& net, const OperatingPoint& opp,
                                             const CalibrationSet& cal, ScenarioId baseline) {
  std::vector<ComparisonRow> rows;
  for (ScenarioId id : kAllScenarios) {
    const auto r = run_network(net, ScenarioConfig::make(id), opp, cal);
    rows.push_back({id, r.latency, r.energy, 1.0, 1.0});
  }
  for (const auto& b : rows)
    if (b.scenario == baseline)
      for (auto& row : rows) {
        row.latency_gain = row.latency > 0.0 ? b.latency / row.latency : 1.0;
        row.energy_gain = row.energy > 0.0 ? b.energy / row.energy : 1.0;
      }
  return rows;
}

namespace {

const char* const kLinks[] = {xfer::links::kClusterDma, xfer::links::kHyperbus, xfer::links::kL3Mram,
                              xfer::links::kMramPort};
const char* const kTimedLinks[] = {xfer::links::kClusterDma, xfer::links::kHyperbus, xfer::links::kL3Mram};

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header() {
  std::string h = "layer,mode,cycles_launch,cycles_prefetch,cycles_execute,cycles_weight_traffic,cycles_nq,"
                  "cycles_streamout,cycles_total";
  for (const char* l : kLinks) h += std::string(",bytes_") + l;
  for (const char* l : kTimedLinks) h += std::string(",busy_s_") + l;
  h += ",compute_s,weight_link_s,latency_s,energy_J_compute,energy_J_l1_traffic,energy_J_l2_l1,energy_J_l3_l2,"
       "energy_J_off_chip,energy_J_mram_read,energy_J_idle,energy_J_total,regime";
  return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void emit_report(std::ostream& os, const InferenceReport& r) {
  os << "# network=" << r.network << '\n'
     << "# scenario=" << to_string(r.scenario) << '\n'
     << "# opp=" << r.opp << '\n'
     << "# sleep_power_W=" << real(r.sleep_power) << '\n'
     << "# latency_s=" << real(r.latency) << '\n'
     << "# energy_J=" << real(r.energy) << '\n'
     << "# note: residual adds and pooling are zero-cost markers and have no rows\n"
     << header() << '\n';
  for (const auto& l : r.layers) {
    const auto& c = l.cycles;
    os << l.layer << ',' << qnn::to_string(l.mode) << ',' << c.launch << ',' << c.prefetch << ',' << c.execute << ','
       << c.weight_traffic << ',' << c.normquant << ',' << c.streamout << ',' << c.total;
    for (const char* link : kLinks) {
      auto it = l.link_bytes.find(link);
      os << ',' << (it == l.link_bytes.end() ? 0 : it->second);
    }
    for (const char* link : kTimedLinks) {
      auto it = l.link_time.find(link);
      os << ',' << real(it == l.link_time.end() ? 0.0 : it->second);
    }
    const auto& e = l.energy;
    os << ',' << real(l.compute_time) << ',' << real(l.weight_link_time) << ',' << real(l.latency) << ','
       << real(e.compute) << ',' << real(e.l1_traffic) << ',' << real(e.l2_l1) << ',' << real(e.l3_l2) << ','
       << real(e.off_chip) << ',' << real(e.mram_read) << ',' << real(e.idle) << ',' << real(e.total()) << ','
       << sched::to_string(l.regime) << '\n';
  }
}

void emit_report(const std::filesystem::path& path, const InferenceReport& r) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write " + path.string());
  emit_report(out, r);
}

InferenceReport load_report(std::istream& is, const std::string& source) {
  InferenceReport r;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  const std::string expected = header();
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
      if (key == "network") r.network = value;
      else if (key == "opp") r.opp = value;
      else if (key == "scenario") {
        auto id = parse_scenario(value);
        if (!id) throw ParseError(source, line_no, "unknown scenario '" + value + "'");
        r.scenario = *id;
      } else if (key == "sleep_power_W") {
        r.sleep_power = std::stod(value);
      }
      continue;
    }
    if (!seen_header) {
      if (line != expected) throw ParseError(source, line_no, "unexpected column header");
      seen_header = true;
      continue;
    }
    const auto f = split(line, ',');
    const std::size_t want = 9 + std::size(kLinks) + std::size(kTimedLinks) + 12;
    if (f.size() != want)
      throw ParseError(source, line_no, "expected " + std::to_string(want) + " columns, got " + std::to_string(f.size()));
    try {
      sched::LayerReport l;
      std::size_t i = 0;
      l.layer = f[i++];
      auto mode = qnn::parse_conv_mode(f[i++]);
      if (!mode) throw InvalidConfig("unknown mode");
      l.mode = *mode;
      auto& c = l.cycles;
      for (std::uint64_t* v : {&c.launch, &c.prefetch, &c.execute, &c.weight_traffic, &c.normquant, &c.streamout,
                               &c.total})
        *v = std::stoull(f[i++]);
      for (const char* link : kLinks)
        if (std::uint64_t b = std::stoull(f[i++])) l.link_bytes[link] = b;
      for (const char* link : kTimedLinks)
        if (double t = std::stod(f[i++]); t > 0.0) l.link_time[link] = t;
      l.compute_time = std::stod(f[i++]);
      l.weight_link_time = std::stod(f[i++]);
      l.latency = std::stod(f[i++]);
      auto& e = l.energy;
      for (double* v : {&e.compute, &e.l1_traffic, &e.l2_l1, &e.l3_l2, &e.off_chip, &e.mram_read, &e.idle})
        *v = std::stod(f[i++]);
      ++i;  // total is derived
      const std::string& regime = f[i++];
      if (regime == "WellBalanced") l.regime = sched::Regime::WellBalanced;
      else if (regime == "ComputeDominated") l.regime = sched::Regime::ComputeDominated;
      else if (regime == "WeightMemoryBound") l.regime = sched::Regime::WeightMemoryBound;
      else throw InvalidConfig("unknown regime '" + regime + "'");
      r.layers.push_back(l);
      r.latency += l.latency;
      r.energy += l.energy.total();
    } catch (const std::logic_error& e) {
      throw ParseError(source, line_no, std::string("malformed value: ") + e.what());
    } catch (const InvalidConfig& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return r;
}

InferenceReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return load_report(in, path.string());
}

void emit_comparison(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "scenario,latency_s,energy_J,latency_gain,energy_gain\n";
  for (const auto& r : rows)
    os << to_string(r.scenario) << ',' << real(r.latency) << ',' << real(r.energy) << ',' << real(r.latency_gain)
       << ',' << real(r.energy_gain) << '\n';
}

}  // namespace nemsim
