#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "optomech/modes.hpp"
#include "optomech/params.hpp"

namespace optomech {

// Experiment description read from a `key = value` file. Lines starting with '#'
// are comments. Unknown keys and malformed values raise ConfigError with the line.
struct ExperimentConfig {
  CavityParams::Fields cavity;
  std::vector<double> powers_w{1e-3, 2e-3};
  double pdh_modulation_hz = 19e6;

  double mode_frequency_hz = 280e3;
  double mode_q = 8750.0;
  double mode_mass_kg = 22e-12;
  double bath_temperature_k = 300.0;

  double pt_ratio = 0.0;
  double pt_tau_s = 7.6e-9;
  bool pt_enabled = false;

  BeamModeModel beam;  // surface density filled from the stack unless set
  double probe_waist_m = 10e-6;
  bool probe_at_antinode = true;
  double probe_x_m = 0.0;
  double probe_y_m = 0.0;
  std::vector<Layer> stack = LayerStack::bragg_mirror().layers();
  double zeta = 1.0;

  double sweep_delta_min = -1.5;  // units of kappa
  double sweep_delta_max = 1.5;
  int sweep_points = 61;

  double sim_delta_over_kappa = 0.3;
  double sim_duration_s = 0.0;  // 0: 200 / gamma
  double sim_dt_s = 0.0;        // 0: a fiftieth of the mechanical period
  int sim_record_every = 5;
  int sim_runs = 30;
  int sim_keep_traces = 1;
  std::uint64_t seed = 1;

  // Raw entries in file order, for the run manifest.
  std::vector<std::pair<std::string, std::string>> entries;

  // Builders validate the corresponding physical objects.
  CavityParams cavity_params(double power_w) const;
  CavityParams cavity_params() const { return cavity_params(powers_w.front()); }
  MechanicalMode mechanical_mode() const;
  PhotothermalModel photothermal() const;
  LayerStack layer_stack() const;
  BeamModeModel beam_model() const;
  ProbeProfile probe() const;
  // Builds every object once so that validation errors surface before any work.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace optomech
