#include "optomech/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  return d;
}

long long parse_int(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return n;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

Layer& layer_named(std::vector<Layer>& stack, const std::string& name) {
  auto it = std::find_if(stack.begin(), stack.end(),
                         [&](const Layer& l) { return l.material == name; });
  if (it != stack.end()) return *it;
  stack.push_back(Layer{name, 0.0, 0.0, 0, 0.0, 0.0});
  return stack.back();
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"cavity.length_m", [](auto& c, auto& v) { c.cavity.length_m = parse_double(v); }},
      {"cavity.finesse", [](auto& c, auto& v) { c.cavity.finesse = parse_double(v); }},
      {"cavity.wavelength_m", [](auto& c, auto& v) { c.cavity.wavelength_m = parse_double(v); }},
      {"cavity.input_reflectivity",
       [](auto& c, auto& v) { c.cavity.input_reflectivity = parse_double(v); }},
      {"cavity.end_reflectivity",
       [](auto& c, auto& v) { c.cavity.end_reflectivity = parse_double(v); }},
      {"cavity.extra_loss", [](auto& c, auto& v) { c.cavity.extra_loss = parse_double(v); }},
      {"cavity.coupling_efficiency",
       [](auto& c, auto& v) { c.cavity.coupling_efficiency = parse_double(v); }},
      {"cavity.buildup",
       [](auto& c, auto& v) {
         if (v == "2F/pi") {
           c.cavity.buildup = BuildupConvention::TwoFOverPi;
         } else if (v == "F/pi") {
           c.cavity.buildup = BuildupConvention::FOverPi;
         } else {
           throw std::invalid_argument("buildup must be 2F/pi or F/pi");
         }
       }},
      {"cavity.pdh_modulation_hz", [](auto& c, auto& v) { c.pdh_modulation_hz = parse_double(v); }},
      {"laser.power_w", [](auto& c, auto& v) { c.powers_w = parse_list(v); }},
      {"mode.frequency_hz", [](auto& c, auto& v) { c.mode_frequency_hz = parse_double(v); }},
      {"mode.q", [](auto& c, auto& v) { c.mode_q = parse_double(v); }},
      {"mode.effective_mass_kg", [](auto& c, auto& v) { c.mode_mass_kg = parse_double(v); }},
      {"mode.bath_temperature_k", [](auto& c, auto& v) { c.bath_temperature_k = parse_double(v); }},
      {"photothermal.ratio", [](auto& c, auto& v) { c.pt_ratio = parse_double(v); }},
      {"photothermal.tau_s", [](auto& c, auto& v) { c.pt_tau_s = parse_double(v); }},
      {"photothermal.enabled", [](auto& c, auto& v) { c.pt_enabled = parse_bool(v); }},
      {"beam.length_m", [](auto& c, auto& v) { c.beam.length_m = parse_double(v); }},
      {"beam.width_m", [](auto& c, auto& v) { c.beam.width_m = parse_double(v); }},
      {"beam.surface_density_kg_m2",
       [](auto& c, auto& v) { c.beam.surface_density = parse_double(v); }},
      {"beam.mode_index", [](auto& c, auto& v) { c.beam.mode_index = static_cast<int>(parse_int(v)); }},
      {"beam.family",
       [](auto& c, auto& v) {
         if (v == "string") {
           c.beam.family = LongitudinalFamily::TensionString;
         } else if (v == "clamped_clamped") {
           c.beam.family = LongitudinalFamily::ClampedClampedBeam;
         } else {
           throw std::invalid_argument("family must be string or clamped_clamped");
         }
       }},
      {"beam.transverse",
       [](auto& c, auto& v) {
         if (v == "uniform") {
           c.beam.transverse = TransverseModel::Uniform;
         } else if (v == "one_side_clamped") {
           c.beam.transverse = TransverseModel::OneSideClamped;
         } else {
           throw std::invalid_argument("transverse must be uniform or one_side_clamped");
         }
       }},
      {"beam.dead_fraction", [](auto& c, auto& v) { c.beam.dead_fraction = parse_double(v); }},
      {"probe.waist_m", [](auto& c, auto& v) { c.probe_waist_m = parse_double(v); }},
      {"probe.x_m",
       [](auto& c, auto& v) {
         c.probe_x_m = parse_double(v);
         c.probe_at_antinode = false;
       }},
      {"probe.y_m",
       [](auto& c, auto& v) {
         c.probe_y_m = parse_double(v);
         c.probe_at_antinode = false;
       }},
      {"thermal.zeta", [](auto& c, auto& v) { c.zeta = parse_double(v); }},
      {"sweep.delta_min", [](auto& c, auto& v) { c.sweep_delta_min = parse_double(v); }},
      {"sweep.delta_max", [](auto& c, auto& v) { c.sweep_delta_max = parse_double(v); }},
      {"sweep.points", [](auto& c, auto& v) { c.sweep_points = static_cast<int>(parse_int(v)); }},
      {"sim.delta_over_kappa", [](auto& c, auto& v) { c.sim_delta_over_kappa = parse_double(v); }},
      {"sim.duration_s", [](auto& c, auto& v) { c.sim_duration_s = parse_double(v); }},
      {"sim.dt_s", [](auto& c, auto& v) { c.sim_dt_s = parse_double(v); }},
      {"sim.record_every",
       [](auto& c, auto& v) { c.sim_record_every = static_cast<int>(parse_int(v)); }},
      {"sim.runs", [](auto& c, auto& v) { c.sim_runs = static_cast<int>(parse_int(v)); }},
      {"sim.keep_traces",
       [](auto& c, auto& v) { c.sim_keep_traces = static_cast<int>(parse_int(v)); }},
      {"sim.seed",
       [](auto& c, auto& v) {
         const long long s = parse_int(v);
         if (s < 0) throw std::invalid_argument("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

void set_stack_field(ExperimentConfig& c, const std::string& key, const std::string& v,
                     bool& stack_touched) {
  // stack.<material>.<field>
  const auto dot = key.rfind('.');
  const std::string material = key.substr(6, dot - 6);
  const std::string field = key.substr(dot + 1);
  if (material.empty() || dot <= 6) throw std::invalid_argument("malformed stack key");
  if (!stack_touched) {
    c.stack.clear();
    stack_touched = true;
  }
  Layer& l = layer_named(c.stack, material);
  if (field == "density_kg_m3") {
    l.density_kg_m3 = parse_double(v);
  } else if (field == "thickness_m") {
    l.thickness_m = parse_double(v);
  } else if (field == "count") {
    l.count = static_cast<int>(parse_int(v));
  } else if (field == "refractive_index") {
    l.refractive_index = parse_double(v);
  } else if (field == "diffusivity_m2_s") {
    l.diffusivity_m2_s = parse_double(v);
  } else {
    throw std::out_of_range("unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  bool stack_touched = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, where() + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key.rfind("stack.", 0) == 0) {
        set_stack_field(cfg, key, value, stack_touched);
      } else {
        const auto it = setters().find(key);
        if (it == setters().end()) throw std::out_of_range("unknown key '" + key + "'");
        it->second(cfg, value);
      }
    } catch (const std::exception& e) {
      fail(ErrorCode::ConfigError, where() + e.what());
    }
    cfg.entries.emplace_back(key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

CavityParams ExperimentConfig::cavity_params(double power_w) const {
  CavityParams::Fields f = cavity;
  f.input_power_w = power_w;
  return CavityParams(f);
}

MechanicalMode ExperimentConfig::mechanical_mode() const {
  return MechanicalMode::from_frequency_hz(mode_frequency_hz, mode_q, mode_mass_kg,
                                           bath_temperature_k);
}

PhotothermalModel ExperimentConfig::photothermal() const {
  return PhotothermalModel(pt_ratio, pt_tau_s, pt_enabled);
}

LayerStack ExperimentConfig::layer_stack() const { return LayerStack(stack); }

BeamModeModel ExperimentConfig::beam_model() const {
  BeamModeModel m = beam;
  if (m.surface_density <= 0.0) m.surface_density = layer_stack().surface_density();
  m.validate();
  return m;
}

ProbeProfile ExperimentConfig::probe() const {
  const BeamModeModel m = beam_model();
  ProbeProfile p;
  p.waist_m = probe_waist_m;
  if (probe_at_antinode) {
    const Point2 a = antinode(m);
    p.x0 = a.x;
    p.y0 = a.y;
  } else {
    p.x0 = probe_x_m;
    p.y0 = probe_y_m;
  }
  return p;
}

void ExperimentConfig::validate() const {
  require(!powers_w.empty(), ErrorCode::InvalidArgument, "at least one laser power is required");
  for (double p : powers_w) cavity_params(p);
  mechanical_mode();
  photothermal();
  layer_stack();
  beam_model();
  require(pdh_modulation_hz > 0.0, ErrorCode::InvalidArgument, "PDH modulation must be > 0");
  require(zeta > 0.0, ErrorCode::InvalidArgument, "zeta must be > 0");
  require(sweep_points >= 2 && sweep_delta_max > sweep_delta_min, ErrorCode::InvalidArgument,
          "sweep needs >= 2 points over a non-empty range");
  require(sim_runs >= 1 && sim_record_every >= 1 && sim_keep_traces >= 0,
          ErrorCode::InvalidArgument, "simulation counts must be positive");
  require(sim_duration_s >= 0.0 && sim_dt_s >= 0.0, ErrorCode::InvalidArgument,
          "simulation duration and step must be >= 0");
}

}  // namespace optomech
