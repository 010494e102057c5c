#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "optomech/backaction.hpp"
#include "optomech/params.hpp"

namespace optomech {

enum class SpectrumKind { Displacement, PdhReadout };

// One-sided PSD on a strictly increasing frequency grid; integral over Hz is the variance.
struct Spectrum {
  std::vector<double> frequency_hz;
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::Displacement;
  std::string note;  // free-form parameter summary for serialized headers

  std::size_t size() const { return values.size(); }
  void validate() const;
};

struct SusceptibilityValue {
  double omega = 0.0;
  std::complex<double> response;  // m/N
};

// 1 / (M (Omega_M^2 - Omega^2 - i Omega_M Omega / Q))
SusceptibilityValue mechanical_susceptibility(double omega, const MechanicalMode& mode);

// Peak location sqrt(omega_eff^2 - 2 gamma_eff^2) / 2pi.
double psd_peak_hz(const EffectiveDynamics& dyn);
double psd_fwhm_hz(const EffectiveDynamics& dyn);
// <x^2> = (gamma / gamma_eff) k_B T / (m omega_eff^2)
double displacement_variance(const MechanicalMode& mode, const EffectiveDynamics& dyn);

// Uniform grid centred on the peak spanning +-half_span_fwhm widths with the given
// number of points per FWHM.
std::vector<double> psd_grid(const EffectiveDynamics& dyn, double half_span_fwhm = 300.0,
                             double points_per_fwhm = 50.0);

// Thermal displacement PSD with back-action modified frequency and damping. The grid
// must cover the peak +-20 FWHM. Throws Unstable if gamma_eff <= 0.
Spectrum analytic_psd(std::span<const double> grid_hz, const MechanicalMode& mode,
                      const EffectiveDynamics& dyn);

// Equipartition temperature m omega_M^2 <x^2> / k_B from the trapezoidal area.
// Throws GridTooCoarse if the resonance FWHM spans fewer than 10 grid points.
double effective_temperature(const Spectrum& spectrum, const MechanicalMode& mode);

// Readout gain relative to resonance, (slope(Delta)/slope(0))^2 of the PDH discriminant.
// Throws AdiabaticityViolation when 2 kappa / omega_M < 10.
double readout_transfer(double delta, const CavityParams& cavity, double modulation,
                        double omega_m);

Spectrum to_readout(const Spectrum& displacement, double gain);
Spectrum from_readout(const Spectrum& readout, double gain);

// Trapezoidal integral of the spectrum over its grid.
double spectrum_area(const Spectrum& spectrum);
std::size_t peak_index(const Spectrum& spectrum);
// Number of grid points at or above half the peak value, contiguous around the peak.
std::size_t points_within_fwhm(const Spectrum& spectrum);
Spectrum crop(const Spectrum& spectrum, double f_min_hz, double f_max_hz);

}  // namespace optomech
