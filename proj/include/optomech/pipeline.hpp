#pragma once

#include <cstdint>

#include "optomech/backaction.hpp"
#include "optomech/estimation.hpp"
#include "optomech/langevin.hpp"

namespace optomech {

// Simulation and Welch settings for one operating point.
struct CampaignPlan {
  SimulationOptions sim;
  WelchOptions welch;
  EffectiveDynamics predicted;
};

// dt = period / 50 of the faster of omega_M and omega_eff; duration defaults to
// `duration_factor` / gamma (the bare amplitude rate); the Welch segment resolves the
// predicted FWHM with `bins_per_fwhm` bins, capped at the recorded trace length.
CampaignPlan plan_campaign(const CavityParams& cavity, const MechanicalMode& mode,
                           const PhotothermalModel& pt, double delta, double duration_s = 0.0,
                           int record_every = 5, double duration_factor = 200.0,
                           double bins_per_fwhm = 30.0);

struct CampaignResult {
  CampaignPlan plan;
  EnsemblePsd psd;
  LorentzianFit fit;
  double t_eff_fit = 0.0;  // m omega_M^2 * fitted area / k_B
};

// Ensemble PSD of n_runs traces followed by a Lorentzian fit of the peak.
CampaignResult run_campaign(std::size_t n_runs, const CampaignPlan& plan,
                            const CavityParams& cavity, const MechanicalMode& mode,
                            const PhotothermalModel& pt, double delta,
                            std::uint64_t master_seed);

}  // namespace optomech
