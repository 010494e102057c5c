#pragma once

#include <optional>
#include <span>
#include <vector>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"

namespace optomech {

struct EffectiveDynamics {
  double gamma_eff = 0.0;  // rad/s, amplitude damping rate
  double omega_eff = 0.0;  // rad/s
  double gamma_rp = 0.0;   // radiation-pressure contribution
  double gamma_pt = 0.0;   // photothermal contribution
  bool stable = true;      // gamma_eff > 0
  double cooling_ratio_pred = 1.0;  // T_bath / T_eff, NaN when unstable
};

// Damping (quadrature) and optical-spring (in-phase) parts of the delayed
// radiation-pressure and photothermal forces, each a one-pole filter of the
// displacement evaluated at omega_M. Throws UnstableSpring if omega_eff^2 <= 0.
EffectiveDynamics effective_damping(double delta, const CavityParams& cavity,
                                    const MechanicalMode& mode, const PhotothermalModel& pt);

// T_bath / T_eff = (gamma_eff / gamma) (omega_eff^2 / omega_M^2). Throws Unstable.
double predicted_cooling_ratio(const EffectiveDynamics& dyn, const MechanicalMode& mode);

struct SweepRow {
  double delta = 0.0;  // rad/s
  double delta_over_kappa = 0.0;
  double power_w = 0.0;
  EffectiveDynamics dyn;
  double gamma_eff_hz_fwhm = 0.0;  // displacement PSD FWHM, gamma_eff / pi
  double f_eff_hz = 0.0;
  double t_eff_k = 0.0;
  double cooling_ratio = 0.0;
  bool stable = false;
  std::optional<ErrorCode> error;  // per-point failure; t_eff_k and cooling_ratio are NaN
};

// One row per detuning; per-point failures are flagged, never thrown.
std::vector<SweepRow> sweep_detuning(std::span<const double> deltas, const CavityParams& cavity,
                                     const MechanicalMode& mode, const PhotothermalModel& pt);

// n evenly spaced detunings from min to max (both in units of kappa), returned in rad/s.
std::vector<double> detuning_grid(double min_over_kappa, double max_over_kappa, int n,
                                  const CavityParams& cavity);

}  // namespace optomech
