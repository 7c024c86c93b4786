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

#include "nemsim/calibration.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "nemsim/error.hpp"

namespace nemsim {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidConfig("'" + s + "' is not a number for " + key);
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidConfig("'" + s + "' is not a non-negative integer for " + key);
  return std::stoull(s);
}

bool parse_flag(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw InvalidConfig("'" + s + "' is not a boolean for " + key);
}

struct KeyDef {
  std::string key;
  std::string unit;
  std::function<std::string(const CalibrationSet&)> get;
  std::function<void(CalibrationSet&, const std::string&)> set;
};

template <class F>
KeyDef real_key(std::string key, std::string unit, F field) {
  return {key, unit, [field](const CalibrationSet& c) { return real(field(const_cast<CalibrationSet&>(c))); },
          [field, key](CalibrationSet& c, const std::string& s) { field(c) = parse_real(key, s); }};
}

template <class F>
KeyDef count_key(std::string key, std::string unit, F field) {
  return {key, unit, [field](const CalibrationSet& c) { return std::to_string(field(const_cast<CalibrationSet&>(c))); },
          [field, key](CalibrationSet& c, const std::string& s) {
            using T = std::remove_reference_t<decltype(field(c))>;
            field(c) = static_cast<T>(parse_count(key, s));
          }};
}

template <class F>
KeyDef flag_key(std::string key, F field) {
  return {key, "-", [field](const CalibrationSet& c) { return std::string(field(const_cast<CalibrationSet&>(c)) ? "1" : "0"); },
          [field, key](CalibrationSet& c, const std::string& s) { field(c) = parse_flag(key, s); }};
}

void add_opp(std::vector<KeyDef>& d, const std::string& name, OperatingPoint CalibrationSet::*m) {
  const std::string p = "opp." + name + ".";
  d.push_back(real_key(p + "voltage", "V", [m](CalibrationSet& c) -> double& { return (c.*m).voltage; }));
  d.push_back(real_key(p + "cluster_freq", "Hz", [m](CalibrationSet& c) -> double& { return (c.*m).cluster_freq; }));
  d.push_back(real_key(p + "mram_freq", "Hz", [m](CalibrationSet& c) -> double& { return (c.*m).mram_freq; }));
  d.push_back(
      real_key(p + "cluster_power", "W", [m](CalibrationSet& c) -> double& { return (c.*m).cluster_power_peak; }));
  d.push_back(real_key(p + "mram_power", "W", [m](CalibrationSet& c) -> double& { return (c.*m).mram_power; }));
}

void add_link(std::vector<KeyDef>& d, const std::string& name) {
  const std::string p = "link." + name + ".";
  d.push_back(real_key(p + "bandwidth", "bit/s",
                       [name](CalibrationSet& c) -> double& { return c.links.get(name).sustained_bw; }));
  d.push_back(real_key(p + "reference_freq", "Hz",
                       [name](CalibrationSet& c) -> double& { return c.links.get(name).reference_freq; }));
  d.push_back(flag_key(p + "scales_with_cluster",
                       [name](CalibrationSet& c) -> bool& { return c.links.get(name).scales_with_cluster; }));
  d.push_back(count_key(p + "setup", "cycles",
                        [name](CalibrationSet& c) -> std::uint32_t& { return c.links.get(name).setup_cycles; }));
  d.push_back(real_key(p + "energy", "J/bit",
                       [name](CalibrationSet& c) -> double& { return c.links.get(name).energy_per_bit; }));
}

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = [] {
    std::vector<KeyDef> d;
    add_opp(d, "nominal", &CalibrationSet::nominal);
    add_opp(d, "low_power", &CalibrationSet::low_power);
    for (const char* l : {xfer::links::kClusterDma, xfer::links::kHyperbus, xfer::links::kL3Mram,
                          xfer::links::kAxiSwap, xfer::links::kMramPort})
      add_link(d, l);
    d.push_back(count_key("neureka.launch", "cycles",
                          [](CalibrationSet& c) -> std::uint32_t& { return c.neureka.launch_cycles; }));
    d.push_back(count_key("neureka.prefetch_per_chunk", "cycles",
                          [](CalibrationSet& c) -> std::uint32_t& { return c.neureka.prefetch_cycles_per_chunk; }));
    d.push_back(count_key("neureka.nq_per_channel", "cycles",
                          [](CalibrationSet& c) -> std::uint32_t& { return c.neureka.nq_cycles_per_channel; }));
    d.push_back(count_key("neureka.streamout_width", "B/cycle",
                          [](CalibrationSet& c) -> std::uint32_t& { return c.neureka.streamout_bytes_per_cycle; }));
    d.push_back(flag_key("neureka.zero_launch", [](CalibrationSet& c) -> bool& { return c.neureka.zero_launch; }));
    d.push_back(real_key("power.dense8", "-", [](CalibrationSet& c) -> double& { return c.power.dense8; }));
    d.push_back(real_key("power.dense2", "-", [](CalibrationSet& c) -> double& { return c.power.dense2; }));
    d.push_back(real_key("power.pointwise", "-", [](CalibrationSet& c) -> double& { return c.power.pointwise; }));
    d.push_back(real_key("power.depthwise", "-", [](CalibrationSet& c) -> double& { return c.power.depthwise; }));
    d.push_back(real_key("power.idle_fraction", "-", [](CalibrationSet& c) -> double& { return c.idle_fraction; }));
    d.push_back(real_key("power.sleep", "W", [](CalibrationSet& c) -> double& { return c.sleep_power; }));
    d.push_back(real_key("energy.l1_weight_read", "J/bit",
                         [](CalibrationSet& c) -> double& { return c.l1_weight_read_energy; }));
    d.push_back(real_key("energy.mram_l2_read", "J/bit",
                         [](CalibrationSet& c) -> double& { return c.mram_l2_read_energy; }));
    d.push_back(real_key("arbiter.min_share_shallow", "-",
                         [](CalibrationSet& c) -> double& { return c.arbiter.min_share_shallow; }));
    d.push_back(real_key("arbiter.min_share_log", "-",
                         [](CalibrationSet& c) -> double& { return c.arbiter.min_share_log; }));
    d.push_back({"arbiter.priority", "-",
                 [](const CalibrationSet& c) {
                   return std::string(c.arbiter.priority == mem::Branch::Shallow ? "shallow" : "log");
                 },
                 [](CalibrationSet& c, const std::string& s) {
                   if (s == "shallow") c.arbiter.priority = mem::Branch::Shallow;
                   else if (s == "log") c.arbiter.priority = mem::Branch::Logarithmic;
                   else throw InvalidConfig("arbiter.priority must be 'shallow' or 'log', got '" + s + "'");
                 }});
    d.push_back(count_key("paging.miss_service", "cycles",
                          [](CalibrationSet& c) -> std::uint64_t& { return c.miss_service_cycles; }));
    d.push_back(count_key("l1.capacity", "B", [](CalibrationSet& c) -> std::uint64_t& { return c.l1_capacity; }));
    d.push_back(real_key("regime.threshold", "-", [](CalibrationSet& c) -> double& { return c.regime_threshold; }));
    return d;
  }();
  return defs;
}

const KeyDef& find_key(const std::string& key) {
  for (const KeyDef& d : key_defs())
    if (d.key == key) return d;
  throw InvalidConfig("unknown calibration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<Provenance> parse_provenance(const std::string& s) {
  if (s == "paper") return Provenance::Paper;
  if (s == "derived-fit") return Provenance::DerivedFit;
  if (s == "default") return Provenance::Default;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Paper: return "paper";
    case Provenance::DerivedFit: return "derived-fit";
    case Provenance::Default: return "default";
  }
  return "?";
}

const OperatingPoint& CalibrationSet::opp(const std::string& name) const {
  if (name == nominal.name || name == "nominal") return nominal;
  if (name == low_power.name || name == "low_power") return low_power;
  throw InvalidConfig("unknown operating point '" + name + "'");
}

Provenance CalibrationSet::provenance_of(const std::string& key) const {
  auto it = provenance.find(key);
  return it == provenance.end() ? Provenance::Default : it->second;
}

void CalibrationSet::set_provenance(const std::string& key, Provenance p) {
  find_key(key);
  provenance[key] = p;
}

std::map<std::string, Provenance> builtin_provenance() {
  static const std::map<std::string, Provenance> tags = [] {
    std::map<std::string, Provenance> m;
    for (const KeyDef& d : key_defs()) m[d.key] = Provenance::Default;
    for (const char* opp : {"nominal", "low_power"})
      for (const char* f : {"voltage", "cluster_freq", "mram_freq", "cluster_power", "mram_power"})
        m[std::string("opp.") + opp + "." + f] = Provenance::Paper;
    for (const char* k : {"link.cluster_dma.bandwidth", "link.mram_port.bandwidth", "power.dense8", "l1.capacity"})
      m[k] = Provenance::Paper;
    return m;
  }();
  return tags;
}

const std::vector<std::string>& calibration_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const KeyDef& d : key_defs()) k.push_back(d.key);
    return k;
  }();
  return keys;
}

std::string calibration_value(const CalibrationSet& cal, const std::string& key) { return find_key(key).get(cal); }

void set_calibration_value(CalibrationSet& cal, const std::string& key, const std::string& value) {
  find_key(key).set(cal, value);
}

CalibrationSet load_calibration(std::istream& is, const std::string& source) {
  CalibrationSet cal;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    std::string tag;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      tag = trim(line.substr(hash + 1));
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value unit'");
    const std::string key = trim(line.substr(0, eq));
    std::istringstream rest(line.substr(eq + 1));
    std::string value, unit, extra;
    rest >> value >> unit;
    if (value.empty() || unit.empty() || (rest >> extra))
      throw ParseError(source, line_no, "expected 'key = value unit'");
    try {
      const KeyDef& def = find_key(key);
      if (unit != def.unit) throw InvalidConfig("unit of " + key + " must be '" + def.unit + "', got '" + unit + "'");
      def.set(cal, value);
      if (!tag.empty()) {
        auto p = parse_provenance(tag);
        if (!p) throw InvalidConfig("unknown provenance '" + tag + "'");
        cal.set_provenance(key, *p);
      }
    } catch (const InvalidConfig& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  try {
    cal.nominal.validate();
    cal.low_power.validate();
    for (const std::string& n : cal.links.names()) cal.links.get(n).validate();
    cal.arbiter.validate();
  } catch (const InvalidConfig& e) {
    throw ParseError(source, line_no, e.what());
  }
  return cal;
}

CalibrationSet load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return load_calibration(in, path.string());
}

void emit_calibration(std::ostream& os, const CalibrationSet& cal) {
  os << "# nemsim calibration: key = value unit # provenance\n";
  for (const KeyDef& d : key_defs())
    os << d.key << " = " << d.get(cal) << ' ' << d.unit << " # " << to_string(cal.provenance_of(d.key)) << '\n';
}

void emit_calibration(const std::filesystem::path& path, const CalibrationSet& cal) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write " + path.string());
  emit_calibration(out, cal);
}

}  // namespace nemsim
