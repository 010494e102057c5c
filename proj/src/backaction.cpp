#include "optomech/backaction.hpp"

#include <cmath>
#include <limits>

#include "optomech/cavity.hpp"
#include "optomech/constants.hpp"

namespace optomech {

EffectiveDynamics effective_damping(double delta, const CavityParams& cavity,
                                    const MechanicalMode& mode, const PhotothermalModel& pt) {
  const double beta = force_gradient_beta(delta, cavity);
  const double m = mode.effective_mass();
  const double w = mode.omega_m();
  const double w2 = w * w;

  const double a = 2.0 * cavity.kappa();
  const double rp_quadrature = a / (a * a + w2);
  const double rp_in_phase = a * a / (a * a + w2);

  double pt_quadrature = 0.0;
  double pt_in_phase = 0.0;
  const double r = pt.effective_ratio();
  if (r != 0.0) {
    const double p = 1.0 / pt.tau();
    pt_quadrature = r * p / (p * p + w2);
    pt_in_phase = r * p * p / (p * p + w2);
  }

  EffectiveDynamics dyn;
  dyn.gamma_rp = beta / (2.0 * m) * rp_quadrature;
  dyn.gamma_pt = beta / (2.0 * m) * pt_quadrature;
  dyn.gamma_eff = mode.gamma() + dyn.gamma_rp + dyn.gamma_pt;

  const double omega_eff2 = w2 - beta / m * (rp_in_phase + pt_in_phase);
  require(omega_eff2 > 0.0, ErrorCode::UnstableSpring,
          "optical spring exceeds mechanical stiffness (omega_eff^2 <= 0)");
  dyn.omega_eff = std::sqrt(omega_eff2);
  dyn.stable = dyn.gamma_eff > 0.0;
  dyn.cooling_ratio_pred = dyn.stable ? (dyn.gamma_eff / mode.gamma()) * (omega_eff2 / w2)
                                      : std::numeric_limits<double>::quiet_NaN();
  return dyn;
}

double predicted_cooling_ratio(const EffectiveDynamics& dyn, const MechanicalMode& mode) {
  require(dyn.gamma_eff > 0.0, ErrorCode::Unstable, "gamma_eff <= 0, no stationary state");
  const double w = mode.omega_m();
  return (dyn.gamma_eff / mode.gamma()) * (dyn.omega_eff * dyn.omega_eff) / (w * w);
}

std::vector<SweepRow> sweep_detuning(std::span<const double> deltas, const CavityParams& cavity,
                                     const MechanicalMode& mode, const PhotothermalModel& pt) {
  require(!deltas.empty(), ErrorCode::InvalidArgument, "detuning grid is empty");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    SweepRow row;
    row.delta = delta;
    row.delta_over_kappa = delta / cavity.kappa();
    row.power_w = cavity.input_power();
    try {
      row.dyn = effective_damping(delta, cavity, mode, pt);
      row.gamma_eff_hz_fwhm = row.dyn.gamma_eff / constants::pi;
      row.f_eff_hz = row.dyn.omega_eff / (2.0 * constants::pi);
      row.stable = row.dyn.stable;
      if (row.stable) {
        row.cooling_ratio = row.dyn.cooling_ratio_pred;
        row.t_eff_k = mode.bath_temperature() / row.cooling_ratio;
      } else {
        row.cooling_ratio = nan;
        row.t_eff_k = nan;
        row.error = ErrorCode::Unstable;
      }
    } catch (const Error& e) {
      row.error = e.code();
      row.stable = false;
      row.gamma_eff_hz_fwhm = row.f_eff_hz = row.t_eff_k = row.cooling_ratio = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> detuning_grid(double min_over_kappa, double max_over_kappa, int n,
                                  const CavityParams& cavity) {
  require(n >= 1, ErrorCode::InvalidArgument, "detuning grid needs at least one point");
  require(std::isfinite(min_over_kappa) && std::isfinite(max_over_kappa) &&
              max_over_kappa >= min_over_kappa,
          ErrorCode::InvalidArgument, "invalid detuning range");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double kappa = cavity.kappa();
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out[static_cast<std::size_t>(i)] = kappa * (min_over_kappa + t * (max_over_kappa - min_over_kappa));
  }
  return out;
}

}  // namespace optomech
