#include "optomech/langevin.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "optomech/constants.hpp"
#include "parallel.hpp"

namespace optomech {

namespace {

struct OnePole {
  double decay, c1, c2;
};

// Exact update of f' = a (u - f) over one step with u linear between samples:
// f1 = decay f0 + c1 u0 + c2 (u1 - u0).
OnePole one_pole(double rate, double dt) {
  const double h = rate * dt;
  OnePole p;
  p.decay = std::exp(-h);
  p.c1 = -std::expm1(-h);
  if (h < 1e-3) {
    p.c2 = h / 2.0 - h * h / 6.0;
  } else {
    p.c2 = p.c1 - (p.c1 - h * p.decay) / h;
  }
  return p;
}

std::string snapshot(const CavityParams& c, const MechanicalMode& m, const PhotothermalModel& pt,
                     double delta, double dt) {
  std::ostringstream os;
  os.precision(10);
  os << "delta_over_kappa=" << delta / c.kappa() << " power_w=" << c.input_power()
     << " finesse=" << c.finesse() << " length_m=" << c.length()
     << " frequency_hz=" << m.frequency_hz() << " q=" << m.quality_q()
     << " mass_kg=" << m.effective_mass() << " temperature_k=" << m.bath_temperature()
     << " pt_ratio=" << pt.effective_ratio() << " pt_tau_s=" << pt.tau() << " dt_s=" << dt;
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

LangevinSimulator::LangevinSimulator(const CavityParams& cavity, const MechanicalMode& mode,
                                     const PhotothermalModel& pt, double delta, double dt,
                                     std::uint64_t seed)
    : dt_(dt), rng_(seed) {
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "time step must be > 0");
  const double period = 2.0 * constants::pi / mode.omega_m();
  require(dt <= period / 50.0 * (1.0 + 1e-12), ErrorCode::StepTooLarge,
          "time step exceeds 1/50 of the mechanical period");
  // Stiffness matched so that the undamped kick-drift map rotates at exactly omega_M.
  const double half_angle = 0.5 * mode.omega_m() * dt;
  omega2_ = std::pow(2.0 * std::sin(half_angle) / dt, 2);
  damping_ = 2.0 * mode.gamma();
  inv_mass_ = 1.0 / mode.effective_mass();
  kick_sigma_ = std::sqrt(2.0 * damping_ * constants::boltzmann * mode.bath_temperature() * dt *
                          inv_mass_);
  peak_force_ = 2.0 / constants::speed_of_light * cavity.buildup_factor() *
                cavity.coupling_efficiency() * cavity.input_power();
  delta_ = delta;
  kappa_ = cavity.kappa();
  g_ = cavity.detuning_per_meter();
  static_force_ = 0.0;
  static_force_ = force_deviation(0.0);
  pt_ratio_ = pt.effective_ratio();
  const OnePole rp = one_pole(2.0 * kappa_, dt);
  rp_decay_ = rp.decay;
  rp_c1_ = rp.c1;
  rp_c2_ = rp.c2;
  const OnePole ph = one_pole(pt_ratio_ != 0.0 ? 1.0 / pt.tau() : 1.0, dt);
  pt_decay_ = ph.decay;
  pt_c1_ = ph.c1;
  pt_c2_ = ph.c2;
  reset(SimState{});
}

double LangevinSimulator::force_deviation(double x) const {
  const double u = (delta_ - g_ * x) / kappa_;
  return peak_force_ / (1.0 + u * u) - static_force_;
}

void LangevinSimulator::reset(const SimState& state) {
  s_ = state;
  u_prev_ = force_deviation(s_.x);
}

void LangevinSimulator::step() {
  const double force = s_.f_rp + s_.f_pt;
  s_.v += (-damping_ * s_.v - omega2_ * s_.x + force * inv_mass_) * dt_;
  if (kick_sigma_ > 0.0) s_.v += kick_sigma_ * normal_(rng_);
  s_.x += s_.v * dt_;
  const double u = force_deviation(s_.x);
  const double du = u - u_prev_;
  s_.f_rp = rp_decay_ * s_.f_rp + rp_c1_ * u_prev_ + rp_c2_ * du;
  if (pt_ratio_ != 0.0) {
    s_.f_pt = pt_decay_ * s_.f_pt + pt_ratio_ * (pt_c1_ * u_prev_ + pt_c2_ * du);
  }
  u_prev_ = u;
  s_.t += dt_;
}

void LangevinSimulator::advance(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) step();
  check_finite();
}

void LangevinSimulator::check_finite() const {
  if (std::isfinite(s_.x) && std::isfinite(s_.v) && std::isfinite(s_.f_rp) &&
      std::isfinite(s_.f_pt)) {
    return;
  }
  std::ostringstream os;
  os << "state diverged at t=" << s_.t << " s (x=" << s_.x << ", v=" << s_.v
     << ", f_rp=" << s_.f_rp << ", f_pt=" << s_.f_pt << ")";
  fail(ErrorCode::NonFinite, os.str());
}

TimeTrace simulate(const SimulationOptions& options, const CavityParams& cavity,
                   const MechanicalMode& mode, const PhotothermalModel& pt, double delta,
                   std::uint64_t seed) {
  require(std::isfinite(options.duration_s) && options.duration_s > 0.0,
          ErrorCode::InvalidArgument, "duration must be > 0");
  require(options.record_every >= 1, ErrorCode::InvalidArgument, "record_every must be >= 1");
  LangevinSimulator sim(cavity, mode, pt, delta, options.dt_s, seed);
  SimState init;
  init.x = options.initial_x;
  init.v = options.initial_v;
  // released from rest in the static force field at x0
  init.f_rp = sim.force_deviation(init.x);
  init.f_pt = pt.effective_ratio() * init.f_rp;
  sim.reset(init);

  const auto steps = static_cast<std::size_t>(std::llround(options.duration_s / options.dt_s));
  const auto every = static_cast<std::size_t>(options.record_every);
  const std::size_t n_samples = steps / every + 1;
  require(n_samples >= 2, ErrorCode::TooShort, "duration yields fewer than two samples");

  TimeTrace trace;
  trace.dt = options.dt_s * static_cast<double>(every);
  trace.seed = seed;
  trace.params = snapshot(cavity, mode, pt, delta, options.dt_s);
  trace.samples.reserve(n_samples);
  trace.samples.push_back(init.x);
  for (std::size_t i = 1; i < n_samples; ++i) {
    sim.advance(every);
    trace.samples.push_back(sim.state().x);
  }
  return trace;
}

EnergyBreakdown total_energy(const SimState& state, const CavityParams& cavity,
                             const MechanicalMode& mode, double delta) {
  const double q = state.x;
  const double kappa = cavity.kappa();
  const double delta_q = delta - cavity.detuning_per_meter() * q;
  const std::complex<double> alpha = cavity.drive_rate() / std::complex<double>(kappa, delta_q);
  const double X = std::sqrt(2.0) * alpha.real();
  const double Y = std::sqrt(2.0) * alpha.imag();
  const double quad = X * X + Y * Y;
  const double omega_c = cavity.omega_laser() + delta;
  const double m = mode.effective_mass();

  EnergyBreakdown e;
  e.field_term = constants::hbar * delta * quad;
  e.coupling_term = -constants::hbar * omega_c / (2.0 * cavity.length()) * (quad - 1.0) * q;
  e.mechanical_term = 0.5 * (m * state.v * state.v + m * mode.omega_m() * mode.omega_m() * q * q);
  e.drive_term = std::sqrt(2.0) * constants::hbar * cavity.drive_rate() * Y;
  return e;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index) {
  return splitmix64(master_seed + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ull);
}

std::vector<EnsembleRun> ensemble(std::size_t n_runs, const SimulationOptions& options,
                                  const CavityParams& cavity, const MechanicalMode& mode,
                                  const PhotothermalModel& pt, double delta,
                                  std::uint64_t master_seed) {
  require(n_runs >= 1, ErrorCode::InvalidArgument, "ensemble needs at least one run");
  std::vector<EnsembleRun> runs(n_runs);
  detail::parallel_for(n_runs, [&](std::size_t i) {
    EnsembleRun& run = runs[i];
    run.seed = run_seed(master_seed, i);
    try {
      run.trace = simulate(options, cavity, mode, pt, delta, run.seed);
    } catch (const Error& e) {
      run.error = e.code();
      run.message = e.what();
    }
  });
  return runs;
}

RingdownFit fit_ringdown(const TimeTrace& trace, double floor_fraction, double ceiling_factor) {
  const auto& x = trace.samples;
  require(x.size() >= 5, ErrorCode::TooShort, "trace too short for a ring-down fit");
  std::vector<double> t_peak;
  std::vector<double> log_amp;
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (!(x[i] > 0.0 && x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
    // parabolic refinement of the sampled maximum
    const double a = 0.5 * (x[i - 1] + x[i + 1]) - x[i];
    const double b = 0.5 * (x[i + 1] - x[i - 1]);
    const double shift = a != 0.0 ? -b / (2.0 * a) : 0.0;
    const double amp = a != 0.0 ? x[i] - b * b / (4.0 * a) : x[i];
    if (first == 0.0) first = amp;
    if (amp < floor_fraction * first || amp > ceiling_factor * first) break;
    t_peak.push_back((static_cast<double>(i) + shift) * trace.dt);
    log_amp.push_back(std::log(amp));
    last = amp;
  }
  require(t_peak.size() >= 3, ErrorCode::TooShort, "fewer than three oscillation maxima");
  const double n = static_cast<double>(t_peak.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t_peak.size(); ++i) {
    st += t_peak[i];
    sy += log_amp[i];
    stt += t_peak[i] * t_peak[i];
    sty += t_peak[i] * log_amp[i];
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return {-slope, first, last, t_peak.size()};
}

StabilityReport classify_stability(const CavityParams& cavity, const MechanicalMode& mode,
                                   const PhotothermalModel& pt, double delta, double duration_s,
                                   double initial_x) {
  SimulationOptions opt;
  opt.duration_s = duration_s;
  opt.dt_s = 2.0 * constants::pi / mode.omega_m() / 64.0;
  opt.initial_x = initial_x;
  StabilityReport report;
  try {
    const TimeTrace trace = simulate(opt, cavity, mode.with_temperature(0.0), pt, delta, 0);
    const RingdownFit fit = fit_ringdown(trace, 1e-3, 5.0);
    report.growth_rate = -fit.decay_rate;
    const std::size_t tail = trace.samples.size() / 10;
    for (std::size_t i = trace.samples.size() - tail; i < trace.samples.size(); ++i) {
      report.saturation_amplitude = std::max(report.saturation_amplitude, std::abs(trace.samples[i]));
    }
    report.unstable = report.growth_rate > 0.0;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFinite) throw;
    report.non_finite = true;
    report.unstable = true;
  }
  return report;
}

}  // namespace optomech
