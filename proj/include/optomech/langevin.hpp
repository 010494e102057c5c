#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"

namespace optomech {

struct SimState {
  double x = 0.0;     // m, displacement from the operating point
  double v = 0.0;     // m/s
  double f_rp = 0.0;  // N, cavity-filtered radiation-pressure force
  double f_pt = 0.0;  // N, photothermal force
  double t = 0.0;     // s
};

// Uniformly sampled displacement record.
struct TimeTrace {
  double dt = 0.0;
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::string params;

  double duration() const { return dt * static_cast<double>(samples.size() - 1); }
};

struct SimulationOptions {
  double duration_s = 0.0;
  double dt_s = 0.0;      // integrator step
  int record_every = 1;   // store every n-th step
  double initial_x = 0.0;
  double initial_v = 0.0;
};

// Terms of the cavity + mirror energy with the field at its adiabatic value.
struct EnergyBreakdown {
  double field_term = 0.0;
  double coupling_term = 0.0;
  double mechanical_term = 0.0;
  double drive_term = 0.0;

  double total() const { return field_term + coupling_term + mechanical_term + drive_term; }
};

// Semi-implicit Euler-Maruyama for the mirror with thermal kicks. The radiation
// pressure and photothermal forces follow the full Lorentzian force of the mirror
// position through one-pole filters (rates 2 kappa and 1/tau) integrated exactly
// for a piecewise-linear input, so the step need not resolve either pole.
class LangevinSimulator {
 public:
  LangevinSimulator(const CavityParams& cavity, const MechanicalMode& mode,
                    const PhotothermalModel& pt, double delta, double dt, std::uint64_t seed);

  void reset(const SimState& state);
  void step();
  // Advances n steps; throws NonFinite with the offending state.
  void advance(std::size_t n);

  const SimState& state() const { return s_; }
  double dt() const { return dt_; }
  // Radiation force at displacement x relative to its value at the operating point.
  double force_deviation(double x) const;

 private:
  void check_finite() const;

  double dt_;
  double omega2_;
  double damping_;    // 2 gamma
  double inv_mass_;
  double kick_sigma_; // velocity kick std per step
  double peak_force_;
  double delta_;
  double kappa_;
  double g_;          // detuning per metre
  double static_force_;
  double pt_ratio_;
  double rp_decay_, rp_c1_, rp_c2_;
  double pt_decay_, pt_c1_, pt_c2_;
  double u_prev_ = 0.0;
  SimState s_;
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

// Throws StepTooLarge if dt exceeds 1/50 of the mechanical period.
TimeTrace simulate(const SimulationOptions& options, const CavityParams& cavity,
                   const MechanicalMode& mode, const PhotothermalModel& pt, double delta,
                   std::uint64_t seed);

EnergyBreakdown total_energy(const SimState& state, const CavityParams& cavity,
                             const MechanicalMode& mode, double delta);

// Seed of run `index`: splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index);

struct EnsembleRun {
  std::uint64_t seed = 0;
  std::optional<TimeTrace> trace;
  std::optional<ErrorCode> error;
  std::string message;
};

std::vector<EnsembleRun> ensemble(std::size_t n_runs, const SimulationOptions& options,
                                  const CavityParams& cavity, const MechanicalMode& mode,
                                  const PhotothermalModel& pt, double delta,
                                  std::uint64_t master_seed);

struct RingdownFit {
  double decay_rate = 0.0;  // 1/s, amplitude; negative means growth
  double initial_amplitude = 0.0;
  double final_amplitude = 0.0;
  std::size_t peaks_used = 0;
};

// Log-linear fit of the positive oscillation maxima. Peaks are used from the start
// until the envelope leaves [floor_fraction, ceiling_factor] x the first peak.
RingdownFit fit_ringdown(const TimeTrace& trace, double floor_fraction = 1e-3,
                         double ceiling_factor = 20.0);

struct StabilityReport {
  double growth_rate = 0.0;           // 1/s, from the early envelope
  double saturation_amplitude = 0.0;  // m, peak |x| over the last tenth of the run
  bool non_finite = false;
  bool unstable = false;
};

// Noise-free kick response from a small initial displacement.
StabilityReport classify_stability(const CavityParams& cavity, const MechanicalMode& mode,
                                   const PhotothermalModel& pt, double delta,
                                   double duration_s, double initial_x);

}  // namespace optomech
