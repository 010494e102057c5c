#include "optomech/cavity.hpp"

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

using cplx = std::complex<double>;

// r(Delta) = 1 - 2 rho kappa / (kappa + i Delta)
cplx reflection(double delta, double kappa, double rho) {
  return 1.0 - 2.0 * rho * kappa / cplx(kappa, delta);
}

cplx reflection_derivative(double delta, double kappa, double rho) {
  const cplx d = cplx(kappa, delta);
  return cplx(0.0, 2.0 * rho * kappa) / (d * d);
}

}  // namespace

double circulating_power(double delta, const CavityParams& cavity) {
  const double u = delta / cavity.kappa();
  return cavity.buildup_factor() * cavity.coupling_efficiency() * cavity.input_power() /
         (1.0 + u * u);
}

double radiation_force(double delta, const CavityParams& cavity) {
  return 2.0 * circulating_power(delta, cavity) / constants::speed_of_light;
}

double force_gradient_beta(double delta, const CavityParams& cavity) {
  const double kappa = cavity.kappa();
  const double u = delta / kappa;
  const double denom = (1.0 + u * u) * (1.0 + u * u);
  const double peak_force = 2.0 / constants::speed_of_light * cavity.buildup_factor() *
                            cavity.coupling_efficiency() * cavity.input_power();
  return peak_force * cavity.detuning_per_meter() * (2.0 * delta / (kappa * kappa)) / denom;
}

CavityResponse cavity_response(double delta, const CavityParams& cavity) {
  CavityResponse r;
  r.detuning_delta = delta;
  r.circulating_power = circulating_power(delta, cavity);
  r.radiation_force = 2.0 * r.circulating_power / constants::speed_of_light;
  r.force_gradient_beta = force_gradient_beta(delta, cavity);
  return r;
}

std::complex<double> reflection_coefficient(double delta, const CavityParams& cavity) {
  return reflection(delta, cavity.kappa(), cavity.input_coupling_fraction());
}

std::vector<double> reflection_scan(std::span<const double> length_offsets,
                                    const CavityParams& cavity) {
  const double half_wave = cavity.wavelength() / 2.0;
  const double kappa = cavity.kappa();
  const double rho = cavity.input_coupling_fraction();
  std::vector<double> out;
  out.reserve(length_offsets.size());
  for (double dl : length_offsets) {
    const double folded = dl - half_wave * std::round(dl / half_wave);
    const double delta = folded * cavity.detuning_per_meter();
    out.push_back(cavity.input_power() * std::norm(reflection(delta, kappa, rho)));
  }
  return out;
}

double reflection_fwhm_length(const CavityParams& cavity) {
  return cavity.wavelength() / (2.0 * cavity.finesse());
}

PdhDiscriminant::PdhDiscriminant(const CavityParams& cavity, double modulation)
    : kappa_(cavity.kappa()),
      coupling_(cavity.input_coupling_fraction()),
      modulation_(modulation),
      norm_(1.0),
      regime_warning_(modulation < 10.0 * cavity.kappa()) {
  require(std::isfinite(modulation) && modulation > 0.0, ErrorCode::InvalidArgument,
          "PDH modulation frequency must be > 0");
  require(coupling_ > 0.0, ErrorCode::DegenerateInput,
          "input mirror does not transmit; no PDH signal");
  const double s0 = raw_slope(0.0) * kappa_;
  require(std::abs(s0) > 0.0, ErrorCode::DegenerateInput, "PDH discriminant has zero slope");
  norm_ = s0;
}

// Im[r(D) r*(D+W) - r*(D) r(D-W)]
double PdhDiscriminant::raw_error(double delta) const {
  const cplx r0 = reflection(delta, kappa_, coupling_);
  const cplx rp = reflection(delta + modulation_, kappa_, coupling_);
  const cplx rm = reflection(delta - modulation_, kappa_, coupling_);
  return std::imag(r0 * std::conj(rp) - std::conj(r0) * rm);
}

double PdhDiscriminant::raw_slope(double delta) const {
  const cplx r0 = reflection(delta, kappa_, coupling_);
  const cplx rp = reflection(delta + modulation_, kappa_, coupling_);
  const cplx rm = reflection(delta - modulation_, kappa_, coupling_);
  const cplx d0 = reflection_derivative(delta, kappa_, coupling_);
  const cplx dp = reflection_derivative(delta + modulation_, kappa_, coupling_);
  const cplx dm = reflection_derivative(delta - modulation_, kappa_, coupling_);
  return std::imag(d0 * std::conj(rp) + r0 * std::conj(dp) - std::conj(d0) * rm -
                   std::conj(r0) * dm);
}

double PdhDiscriminant::error(double delta) const { return raw_error(delta) / norm_; }

double PdhDiscriminant::slope(double delta) const { return raw_slope(delta) * kappa_ / norm_; }

PdhSample pdh_error_signal(double delta, double modulation, const CavityParams& cavity) {
  const PdhDiscriminant pdh(cavity, modulation);
  return {pdh.error(delta), pdh.regime_warning()};
}

}  // namespace optomech
