#pragma once

#include <complex>
#include <span>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

// Steady-state response at effective detuning Delta (positive = cooling side).
struct CavityResponse {
  double detuning_delta = 0.0;      // rad/s
  double circulating_power = 0.0;   // W
  double radiation_force = 0.0;     // N
  double force_gradient_beta = 0.0; // N/m
};

// Single-mode Lorentzian response: B eta P / (1 + (Delta/kappa)^2).
double circulating_power(double delta, const CavityParams& cavity);

double radiation_force(double delta, const CavityParams& cavity);

// Spatial gradient of the radiation force. Same sign as Delta, zero at resonance.
double force_gradient_beta(double delta, const CavityParams& cavity);

CavityResponse cavity_response(double delta, const CavityParams& cavity);

// Amplitude reflection coefficient of the single-mode cavity at detuning Delta.
std::complex<double> reflection_coefficient(double delta, const CavityParams& cavity);

// Reflected power for end-mirror length offsets (metres). Each offset is folded onto
// the nearest resonance, so the response repeats every lambda/2.
std::vector<double> reflection_scan(std::span<const double> length_offsets,
                                    const CavityParams& cavity);

// FWHM of a single reflection dip in cavity-length units, lambda / (2F).
double reflection_fwhm_length(const CavityParams& cavity);

struct PdhSample {
  double value = 0.0;
  bool regime_warning = false;
};

// Pound-Drever-Hall discriminant for sidebands at +-modulation. Normalized so that
// d(error)/d(Delta/kappa) = 1 at resonance.
class PdhDiscriminant {
 public:
  PdhDiscriminant(const CavityParams& cavity, double modulation);

  double error(double delta) const;
  // d(error)/d(Delta/kappa); equals 1 at Delta = 0.
  double slope(double delta) const;
  double slope_ratio(double delta) const { return slope(delta); }
  // Set when modulation < 10 kappa, outside the well-resolved sideband regime.
  bool regime_warning() const { return regime_warning_; }
  double modulation() const { return modulation_; }
  double kappa() const { return kappa_; }

 private:
  double raw_error(double delta) const;
  double raw_slope(double delta) const;

  double kappa_;
  double coupling_;
  double modulation_;
  double norm_;
  bool regime_warning_;
};

PdhSample pdh_error_signal(double delta, double modulation, const CavityParams& cavity);

}  // namespace optomech
