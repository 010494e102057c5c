#include "optomech/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectra.hpp"

namespace optomech {

CampaignPlan plan_campaign(const CavityParams& cavity, const MechanicalMode& mode,
                           const PhotothermalModel& pt, double delta, double duration_s,
                           int record_every, double duration_factor, double bins_per_fwhm) {
  require(record_every >= 1, ErrorCode::InvalidArgument, "record_every must be >= 1");
  CampaignPlan plan;
  plan.predicted = effective_damping(delta, cavity, mode, pt);
  require(plan.predicted.stable, ErrorCode::Unstable,
          "operating point is unstable; no stationary spectrum exists");
  const double omega_max = std::max(mode.omega_m(), plan.predicted.omega_eff);
  plan.sim.dt_s = 2.0 * constants::pi / omega_max / 50.0;
  plan.sim.duration_s = duration_s > 0.0 ? duration_s : duration_factor / mode.gamma();
  plan.sim.record_every = record_every;

  const double sample_dt = plan.sim.dt_s * record_every;
  const auto n_samples =
      static_cast<std::size_t>(std::floor(plan.sim.duration_s / plan.sim.dt_s)) / record_every + 1;
  std::size_t seg =
      segment_length_for_resolution(sample_dt, psd_fwhm_hz(plan.predicted) / bins_per_fwhm);
  seg = std::min(seg + (seg % 2), n_samples - (n_samples % 2));
  plan.welch.segment_length = seg;
  plan.welch.overlap = 0.5;
  plan.welch.window = Window::Hann;
  return plan;
}

CampaignResult run_campaign(std::size_t n_runs, const CampaignPlan& plan,
                            const CavityParams& cavity, const MechanicalMode& mode,
                            const PhotothermalModel& pt, double delta,
                            std::uint64_t master_seed) {
  CampaignResult r;
  r.plan = plan;
  r.psd = simulate_ensemble_psd(n_runs, plan.sim, plan.welch, cavity, mode, pt, delta,
                                master_seed);
  r.fit = fit_peak(r.psd.mean);
  r.t_eff_fit = mode.effective_mass() * mode.omega_m() * mode.omega_m() * r.fit.area /
                constants::boltzmann;
  return r;
}

}  // namespace optomech
