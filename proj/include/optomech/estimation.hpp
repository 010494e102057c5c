#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "optomech/langevin.hpp"
#include "optomech/params.hpp"
#include "optomech/spectra.hpp"

namespace optomech {

enum class Window { Hann, Rect };

struct WelchOptions {
  std::size_t segment_length = 4096;
  double overlap = 0.5;  // fraction in [0, 0.9]
  Window window = Window::Hann;
};

// Averaged, mean-removed, window-compensated one-sided periodogram.
Spectrum estimate_psd(const TimeTrace& trace, const WelchOptions& options);
// Same, from explicit timestamps; throws NonUniform if the spacing varies.
Spectrum estimate_psd(std::span<const double> time_s, std::span<const double> samples,
                      const WelchOptions& options);

// Segment length giving a frequency resolution no coarser than `resolution_hz`.
std::size_t segment_length_for_resolution(double sample_dt, double resolution_hz);

struct EnsemblePsd {
  Spectrum mean;
  std::size_t runs_ok = 0;
  std::vector<EnsembleRun> failures;  // traces dropped
};

// Simulates n_runs traces and averages their PSDs without keeping the traces.
EnsemblePsd simulate_ensemble_psd(std::size_t n_runs, const SimulationOptions& sim,
                                  const WelchOptions& welch, const CavityParams& cavity,
                                  const MechanicalMode& mode, const PhotothermalModel& pt,
                                  double delta, std::uint64_t master_seed);

// area * (fwhm / 2pi) / ((f - center)^2 + (fwhm/2)^2) + offset
double lorentzian_psd(double f_hz, double center_hz, double fwhm_hz, double area, double offset);

struct LorentzianGuess {
  double center_hz = 0.0;
  double fwhm_hz = 0.0;
  double area = 0.0;
  double offset = 0.0;
};

struct LorentzianFit {
  double center_hz = 0.0;
  double fwhm_hz = 0.0;
  double area = 0.0;
  double offset = 0.0;
  double err_center = 0.0;
  double err_fwhm = 0.0;
  double err_area = 0.0;
  double err_offset = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Seed from the peak bin and its half-height crossings. Throws NoPeak.
LorentzianGuess guess_lorentzian(const Spectrum& spectrum);

// Levenberg-Marquardt fit of a Lorentzian plus constant offset. A trial step is kept
// only if it lowers the residual; the damping factor is multiplied by 1/3 after a
// kept step and by 2 after a rejected one. Stops when the relative parameter change
// falls below 1e-8 or the damping exceeds 1e16 (no further descent possible); after
// 200 iterations converged = false and the best-so-far parameters are returned.
// The unweighted fit is refined by two passes with per-bin sigma proportional to
// the fitted model; standard errors come from the last pass. residual_norm is the
// unweighted L2 norm.
LorentzianFit fit_lorentzian(const Spectrum& spectrum,
                             const std::optional<LorentzianGuess>& initial_guess = std::nullopt);

// Crops the spectrum to the seeded peak +-half_span_fwhm widths, then fits.
LorentzianFit fit_peak(const Spectrum& spectrum, double half_span_fwhm = 20.0);

// Divides readout area by (slope(Delta)/slope(0))^2. Throws SlopeVanishes.
LorentzianFit normalize_by_pdh_slope(const LorentzianFit& fit, double delta,
                                     const CavityParams& cavity, double modulation);

// k_B T / (omega^2 <x^2>) from the trapezoidal area of a displacement spectrum.
double calibrate_effective_mass(const Spectrum& spectrum, double mode_frequency_hz,
                                double bath_temperature_k);

struct PowerFit {
  double power_w = 0.0;
  LorentzianFit fit;
};

struct HeatingRow {
  double power_w = 0.0;
  double area = 0.0;
  double fwhm_hz = 0.0;
  double area_times_fwhm = 0.0;
};

struct HeatingGroup {
  double power_w = 0.0;
  std::size_t count = 0;
  double mean_product = 0.0;
  double std_error = 0.0;
};

struct HeatingDiagnostic {
  std::vector<HeatingRow> rows;      // sorted by power
  std::vector<HeatingGroup> groups;  // one per distinct power
  bool heating_flagged = false;
  double max_separation_sigma = 0.0;  // largest |mean_i - mean_j| / combined SE
};

// Flags heating when two powers' mean area x width differ by more than twice the
// combined standard error. Needs >= 2 powers with >= 3 fits each.
HeatingDiagnostic heating_diagnostic(std::span<const PowerFit> fits);

}  // namespace optomech
