#include "optomech/params.hpp"

#include <cmath>
#include <set>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

CavityParams::CavityParams(const Fields& f) : f_(f) {
  require(std::isfinite(f.length_m) && f.length_m > 0.0, ErrorCode::InvalidArgument,
          "cavity length must be > 0");
  require(std::isfinite(f.finesse) && f.finesse > 1.0, ErrorCode::InvalidArgument,
          "finesse must be > 1");
  require(std::isfinite(f.wavelength_m) && f.wavelength_m > 0.0, ErrorCode::InvalidArgument,
          "wavelength must be > 0");
  require(std::isfinite(f.input_power_w) && f.input_power_w >= 0.0, ErrorCode::InvalidArgument,
          "input power must be >= 0");
  require(in_unit_interval(f.input_reflectivity), ErrorCode::InvalidArgument,
          "input mirror reflectivity must lie in [0,1]");
  require(in_unit_interval(f.end_reflectivity), ErrorCode::InvalidArgument,
          "end mirror reflectivity must lie in [0,1]");
  require(in_unit_interval(f.extra_loss), ErrorCode::InvalidArgument,
          "extra loss must lie in [0,1]");
  require(std::isfinite(f.coupling_efficiency) && f.coupling_efficiency > 0.0 &&
              f.coupling_efficiency <= 1.0,
          ErrorCode::InvalidArgument, "coupling efficiency must lie in (0,1]");
}

double CavityParams::kappa() const {
  return constants::pi * constants::speed_of_light / (2.0 * f_.finesse * f_.length_m);
}

double CavityParams::omega_laser() const {
  return 2.0 * constants::pi * constants::speed_of_light / f_.wavelength_m;
}

double CavityParams::buildup_factor() const {
  const double base = f_.finesse / constants::pi;
  return f_.buildup == BuildupConvention::TwoFOverPi ? 2.0 * base : base;
}

double CavityParams::drive_rate() const {
  return std::sqrt(2.0 * kappa() * f_.input_power_w / (constants::hbar * omega_laser()));
}

double CavityParams::detuning_per_meter() const { return omega_laser() / f_.length_m; }

double CavityParams::input_coupling_fraction() const {
  const double t_in = 1.0 - f_.input_reflectivity;
  const double total = t_in + (1.0 - f_.end_reflectivity) + f_.extra_loss;
  require(total > 0.0, ErrorCode::DegenerateInput, "cavity has no loss channel");
  return t_in / total;
}

CavityParams CavityParams::with_power(double power_w) const {
  Fields f = f_;
  f.input_power_w = power_w;
  return CavityParams(f);
}

CavityParams CavityParams::with_finesse(double finesse) const {
  Fields f = f_;
  f.finesse = finesse;
  return CavityParams(f);
}

MechanicalMode::MechanicalMode(const Fields& f) : f_(f) {
  require(std::isfinite(f.omega_m) && f.omega_m > 0.0, ErrorCode::InvalidArgument,
          "mechanical frequency must be > 0");
  require(std::isfinite(f.quality_q) && f.quality_q > 0.0, ErrorCode::InvalidArgument,
          "quality factor must be > 0");
  require(std::isfinite(f.effective_mass_kg) && f.effective_mass_kg > 0.0,
          ErrorCode::InvalidArgument, "effective mass must be > 0");
  require(std::isfinite(f.bath_temperature_k) && f.bath_temperature_k >= 0.0,
          ErrorCode::InvalidArgument, "bath temperature must be >= 0");
}

MechanicalMode MechanicalMode::from_frequency_hz(double frequency_hz, double quality_q,
                                                 double mass_kg, double bath_temperature_k) {
  return MechanicalMode(
      Fields{2.0 * constants::pi * frequency_hz, quality_q, mass_kg, bath_temperature_k});
}

double MechanicalMode::frequency_hz() const { return f_.omega_m / (2.0 * constants::pi); }

double MechanicalMode::natural_fwhm_hz() const { return 2.0 * gamma() / (2.0 * constants::pi); }

MechanicalMode MechanicalMode::with_mass(double mass_kg) const {
  Fields f = f_;
  f.effective_mass_kg = mass_kg;
  return MechanicalMode(f);
}

MechanicalMode MechanicalMode::with_temperature(double temperature_k) const {
  Fields f = f_;
  f.bath_temperature_k = temperature_k;
  return MechanicalMode(f);
}

PhotothermalModel::PhotothermalModel(double ratio, double tau_s, bool enabled)
    : ratio_(ratio), tau_s_(tau_s), enabled_(enabled) {
  require(std::isfinite(ratio), ErrorCode::InvalidArgument, "photothermal ratio must be finite");
  if (enabled) {
    require(std::isfinite(tau_s) && tau_s > 0.0, ErrorCode::InvalidArgument,
            "photothermal time constant must be > 0");
  }
}

LayerStack::LayerStack(std::vector<Layer> layers) : layers_(std::move(layers)) {
  std::set<std::string> materials;
  for (const auto& l : layers_) {
    require(!l.material.empty(), ErrorCode::InvalidArgument, "layer material name is empty");
    require(l.density_kg_m3 > 0.0 && l.thickness_m > 0.0 && l.count > 0 &&
                l.refractive_index > 0.0 && l.diffusivity_m2_s > 0.0,
            ErrorCode::InvalidArgument, "layer '" + l.material + "' has a non-positive entry");
    materials.insert(l.material);
  }
  require(materials.size() >= 2, ErrorCode::InvalidArgument,
          "layer stack needs at least two materials");
}

LayerStack LayerStack::bragg_mirror() {
  return LayerStack({
      Layer{"SiO2", 2200.0, 183.45e-9, 8, 1.45, 0.086e-4},
      Layer{"TiO2", 4200.0, 107.26e-9, 9, 2.48, 0.031e-4},
  });
}

double LayerStack::surface_density() const {
  double rho_s = 0.0;
  for (const auto& l : layers_) rho_s += l.density_kg_m3 * l.thickness_m * l.count;
  return rho_s;
}

double LayerStack::total_thickness() const {
  double t = 0.0;
  for (const auto& l : layers_) t += l.thickness_m * l.count;
  return t;
}

double derive_kappa(const CavityParams& cavity) { return cavity.kappa(); }

double finesse_from_losses(double input_t, double end_t, double extra_loss) {
  for (double v : {input_t, end_t, extra_loss}) {
    require(std::isfinite(v) && v >= 0.0 && v < 1.0, ErrorCode::InvalidArgument,
            "transmissions and losses must lie in [0,1)");
  }
  const double total = input_t + end_t + extra_loss;
  require(total > 0.0, ErrorCode::DegenerateInput, "lossless cavity has unbounded finesse");
  require(total < 1.0, ErrorCode::InvalidArgument, "total round-trip loss must be < 1");
  return 2.0 * constants::pi / total;
}

double detuning_spatial(double delta, const CavityParams& cavity) {
  return delta / cavity.detuning_per_meter();
}

}  // namespace optomech
