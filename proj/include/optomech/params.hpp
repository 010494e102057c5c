#pragma once

#include <string>
#include <vector>

namespace optomech {

// Intracavity build-up factor applied to the input power at resonance.
enum class BuildupConvention { TwoFOverPi, FOverPi };

// Fabry-Perot cavity with a movable end mirror. Angular quantities in rad/s.
class CavityParams {
 public:
  struct Fields {
    double length_m = 0.025;
    double finesse = 500.0;
    double wavelength_m = 1064e-9;
    double input_power_w = 2e-3;
    double input_reflectivity = 0.993;
    double end_reflectivity = 0.997;
    double extra_loss = 0.002;  // round trip
    double coupling_efficiency = 1.0;
    BuildupConvention buildup = BuildupConvention::TwoFOverPi;
  };

  explicit CavityParams(const Fields& fields);
  CavityParams() : CavityParams(Fields{}) {}

  const Fields& fields() const { return f_; }
  double length() const { return f_.length_m; }
  double finesse() const { return f_.finesse; }
  double wavelength() const { return f_.wavelength_m; }
  double input_power() const { return f_.input_power_w; }
  double coupling_efficiency() const { return f_.coupling_efficiency; }

  // Field half-linewidth, pi c / (2 F L).
  double kappa() const;
  double omega_laser() const;
  double buildup_factor() const;
  // Rate at which the drive feeds the cavity field, sqrt(2 kappa P / (hbar omega_l)).
  double drive_rate() const;
  // Detuning change per metre of end-mirror displacement, omega_l / L.
  double detuning_per_meter() const;
  // Fraction of the total loss rate that leaves through the input mirror.
  double input_coupling_fraction() const;

  CavityParams with_power(double power_w) const;
  CavityParams with_finesse(double finesse) const;

 private:
  Fields f_;
};

class MechanicalMode {
 public:
  struct Fields {
    double omega_m = 0.0;
    double quality_q = 0.0;
    double effective_mass_kg = 0.0;
    double bath_temperature_k = 300.0;
  };

  explicit MechanicalMode(const Fields& fields);
  static MechanicalMode from_frequency_hz(double frequency_hz, double quality_q, double mass_kg,
                                          double bath_temperature_k = 300.0);

  const Fields& fields() const { return f_; }
  double omega_m() const { return f_.omega_m; }
  double frequency_hz() const;
  double quality_q() const { return f_.quality_q; }
  double effective_mass() const { return f_.effective_mass_kg; }
  double bath_temperature() const { return f_.bath_temperature_k; }
  // Amplitude damping rate omega_M / (2Q); the displacement PSD FWHM is 2 gamma.
  double gamma() const { return f_.omega_m / (2.0 * f_.quality_q); }
  double natural_fwhm_hz() const;

  MechanicalMode with_mass(double mass_kg) const;
  MechanicalMode with_temperature(double temperature_k) const;

 private:
  Fields f_;
};

// Retarded photothermal force, modelled as a one-pole response with the same
// displacement gradient shape as radiation pressure scaled by `ratio`.
class PhotothermalModel {
 public:
  PhotothermalModel() = default;
  PhotothermalModel(double ratio, double tau_s, bool enabled = true);
  static PhotothermalModel disabled() { return {}; }

  double ratio() const { return ratio_; }
  double tau() const { return tau_s_; }
  bool enabled() const { return enabled_; }
  double effective_ratio() const { return enabled_ ? ratio_ : 0.0; }

 private:
  double ratio_ = 0.0;
  double tau_s_ = 1e-8;
  bool enabled_ = false;
};

struct Layer {
  std::string material;
  double density_kg_m3 = 0.0;
  double thickness_m = 0.0;
  int count = 0;
  double refractive_index = 0.0;
  double diffusivity_m2_s = 0.0;
};

// Dielectric Bragg stack, outermost material first.
class LayerStack {
 public:
  explicit LayerStack(std::vector<Layer> layers);
  // SiO2/TiO2 mirror of the micro-bridge.
  static LayerStack bragg_mirror();

  const std::vector<Layer>& layers() const { return layers_; }
  double surface_density() const;  // kg/m^2
  double total_thickness() const;

 private:
  std::vector<Layer> layers_;
};

double derive_kappa(const CavityParams& cavity);

// Finesse 2 pi / (total round-trip loss) from mirror transmissions and extra loss.
double finesse_from_losses(double input_t, double end_t, double extra_loss);

// Mirror displacement equivalent to an angular detuning, L Delta / omega_l.
double detuning_spatial(double delta, const CavityParams& cavity);

}  // namespace optomech
