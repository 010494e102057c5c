#include "optomech/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/cavity.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

void Spectrum::validate() const {
  require(frequency_hz.size() == values.size(), ErrorCode::InvalidArgument,
          "spectrum grid and values differ in length");
  require(values.size() >= 2, ErrorCode::TooShort, "spectrum needs at least two points");
  for (std::size_t i = 1; i < frequency_hz.size(); ++i) {
    require(frequency_hz[i] > frequency_hz[i - 1], ErrorCode::InvalidArgument,
            "spectrum grid must be strictly increasing");
  }
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
            "spectrum values must be finite and >= 0");
  }
}

SusceptibilityValue mechanical_susceptibility(double omega, const MechanicalMode& mode) {
  const double wm = mode.omega_m();
  const std::complex<double> denom(wm * wm - omega * omega, -wm * omega / mode.quality_q());
  return {omega, 1.0 / (mode.effective_mass() * denom)};
}

double psd_peak_hz(const EffectiveDynamics& dyn) {
  const double w2 = dyn.omega_eff * dyn.omega_eff - 2.0 * dyn.gamma_eff * dyn.gamma_eff;
  return std::sqrt(std::max(w2, 0.0)) / (2.0 * constants::pi);
}

double psd_fwhm_hz(const EffectiveDynamics& dyn) { return dyn.gamma_eff / constants::pi; }

double displacement_variance(const MechanicalMode& mode, const EffectiveDynamics& dyn) {
  require(dyn.gamma_eff > 0.0, ErrorCode::Unstable, "gamma_eff <= 0, no stationary state");
  return (mode.gamma() / dyn.gamma_eff) * constants::boltzmann * mode.bath_temperature() /
         (mode.effective_mass() * dyn.omega_eff * dyn.omega_eff);
}

std::vector<double> psd_grid(const EffectiveDynamics& dyn, double half_span_fwhm,
                             double points_per_fwhm) {
  require(dyn.gamma_eff > 0.0, ErrorCode::Unstable, "gamma_eff <= 0, no stationary state");
  require(half_span_fwhm > 0.0 && points_per_fwhm > 0.0, ErrorCode::InvalidArgument,
          "grid span and density must be > 0");
  const double center = psd_peak_hz(dyn);
  const double fwhm = psd_fwhm_hz(dyn);
  const double lo = std::max(center - half_span_fwhm * fwhm, fwhm / points_per_fwhm);
  const double hi = center + half_span_fwhm * fwhm;
  const double df = fwhm / points_per_fwhm;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / df)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + df * static_cast<double>(i);
  return grid;
}

Spectrum analytic_psd(std::span<const double> grid_hz, const MechanicalMode& mode,
                      const EffectiveDynamics& dyn) {
  require(dyn.gamma_eff > 0.0, ErrorCode::Unstable, "gamma_eff <= 0, no stationary state");
  require(grid_hz.size() >= 2, ErrorCode::TooShort, "frequency grid needs at least two points");
  const double center = psd_peak_hz(dyn);
  const double fwhm = psd_fwhm_hz(dyn);
  require(grid_hz.front() <= std::max(center - 20.0 * fwhm, fwhm) &&
              grid_hz.back() >= center + 20.0 * fwhm,
          ErrorCode::InvalidArgument, "frequency grid must cover the peak +-20 FWHM");

  // White thermal force PSD (one-sided, per Hz) 4 k_B T m (2 gamma) filtered by the
  // effective susceptibility; integrates to displacement_variance().
  const double force_psd =
      8.0 * constants::boltzmann * mode.bath_temperature() * mode.effective_mass() * mode.gamma();
  const double m = mode.effective_mass();
  const double we2 = dyn.omega_eff * dyn.omega_eff;
  const double ge = dyn.gamma_eff;

  Spectrum s;
  s.kind = SpectrumKind::Displacement;
  s.frequency_hz.assign(grid_hz.begin(), grid_hz.end());
  s.values.resize(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    const double w = 2.0 * constants::pi * grid_hz[i];
    const double re = we2 - w * w;
    s.values[i] = force_psd / (m * m * (re * re + 4.0 * ge * ge * w * w));
  }
  s.validate();
  return s;
}

double spectrum_area(const Spectrum& spectrum) {
  double area = 0.0;
  for (std::size_t i = 1; i < spectrum.size(); ++i) {
    area += 0.5 * (spectrum.values[i] + spectrum.values[i - 1]) *
            (spectrum.frequency_hz[i] - spectrum.frequency_hz[i - 1]);
  }
  return area;
}

std::size_t peak_index(const Spectrum& spectrum) {
  require(!spectrum.values.empty(), ErrorCode::TooShort, "empty spectrum");
  return static_cast<std::size_t>(
      std::max_element(spectrum.values.begin(), spectrum.values.end()) -
      spectrum.values.begin());
}

std::size_t points_within_fwhm(const Spectrum& spectrum) {
  const std::size_t ip = peak_index(spectrum);
  const double half = 0.5 * spectrum.values[ip];
  std::size_t lo = ip;
  std::size_t hi = ip;
  while (lo > 0 && spectrum.values[lo - 1] >= half) --lo;
  while (hi + 1 < spectrum.size() && spectrum.values[hi + 1] >= half) ++hi;
  return hi - lo + 1;
}

double effective_temperature(const Spectrum& spectrum, const MechanicalMode& mode) {
  require(spectrum.kind == SpectrumKind::Displacement, ErrorCode::InvalidArgument,
          "effective temperature needs a displacement spectrum");
  spectrum.validate();
  require(points_within_fwhm(spectrum) >= 10, ErrorCode::GridTooCoarse,
          "resonance FWHM spans fewer than 10 grid points");
  const double w = mode.omega_m();
  return mode.effective_mass() * w * w * spectrum_area(spectrum) / constants::boltzmann;
}

double readout_transfer(double delta, const CavityParams& cavity, double modulation,
                        double omega_m) {
  require(omega_m > 0.0, ErrorCode::InvalidArgument, "mechanical frequency must be > 0");
  require(2.0 * cavity.kappa() / omega_m >= 10.0, ErrorCode::AdiabaticityViolation,
          "cavity does not follow the mirror adiabatically (2 kappa / omega_M < 10)");
  const PdhDiscriminant pdh(cavity, modulation);
  const double s = pdh.slope(delta);
  return s * s;
}

Spectrum to_readout(const Spectrum& displacement, double gain) {
  require(displacement.kind == SpectrumKind::Displacement, ErrorCode::InvalidArgument,
          "readout conversion needs a displacement spectrum");
  require(std::isfinite(gain) && gain >= 0.0, ErrorCode::InvalidArgument, "gain must be >= 0");
  Spectrum out = displacement;
  out.kind = SpectrumKind::PdhReadout;
  for (double& v : out.values) v *= gain;
  return out;
}

Spectrum from_readout(const Spectrum& readout, double gain) {
  require(readout.kind == SpectrumKind::PdhReadout, ErrorCode::InvalidArgument,
          "expected a readout spectrum");
  require(std::isfinite(gain) && gain > 0.0, ErrorCode::SlopeVanishes, "readout gain is zero");
  Spectrum out = readout;
  out.kind = SpectrumKind::Displacement;
  for (double& v : out.values) v /= gain;
  return out;
}

Spectrum crop(const Spectrum& spectrum, double f_min_hz, double f_max_hz) {
  Spectrum out;
  out.kind = spectrum.kind;
  out.note = spectrum.note;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double f = spectrum.frequency_hz[i];
    if (f >= f_min_hz && f <= f_max_hz) {
      out.frequency_hz.push_back(f);
      out.values.push_back(spectrum.values[i]);
    }
  }
  return out;
}

}  // namespace optomech
