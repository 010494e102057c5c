#pragma once

#include <cstdint>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

enum class LongitudinalFamily { TensionString, ClampedClampedBeam };
// OneSideClamped: cantilever profile across the width, clamped at the dead strip edge
// (y = dead_fraction * width) and free at y = width.
enum class TransverseModel { Uniform, OneSideClamped };

struct BeamModeModel {
  double length_m = 490e-6;
  double width_m = 110e-6;
  double surface_density = 0.0;  // kg/m^2
  int mode_index = 1;
  LongitudinalFamily family = LongitudinalFamily::TensionString;
  TransverseModel transverse = TransverseModel::Uniform;
  double dead_fraction = 0.0;  // strip 0 <= y < dead_fraction * width does not move

  void validate() const;
  double total_mass() const { return surface_density * length_m * width_m; }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Normalized to max |u| = 1. Throws OutOfBounds outside [0, L] x [0, W].
double mode_shape(const BeamModeModel& model, double x, double y);
double longitudinal_shape(const BeamModeModel& model, double x);
double transverse_shape(const BeamModeModel& model, double y);

// f_n / f_1 for the model's longitudinal family.
double frequency_ratio(LongitudinalFamily family, int n);

// First point of maximum |u|.
Point2 antinode(const BeamModeModel& model);

struct ProbeProfile {
  double waist_m = 10e-6;  // 1/e^2 intensity radius
  double x0 = 0.0;
  double y0 = 0.0;
};

struct EffectiveMass {
  double mass_kg = 0.0;
  double error_bound_kg = 0.0;  // |M(N) - M(2N)|
  int resolution = 0;
};

// rho_s <u^2> / <u v^2>^2 with <v^2> = 1 over the mirror, by tensor-product trapezoid
// quadrature (the probe integrals use a +-6 waist window clipped to the mirror).
// Throws NodeDivergence when the overlap vanishes.
EffectiveMass effective_mass(const BeamModeModel& model, const ProbeProfile& probe,
                             int resolution = 256);
// Limit of a vanishing waist: rho_s * integral(u^2) / u(r0)^2.
double point_probe_mass(const BeamModeModel& model, Point2 probe);

struct ScanPoint {
  double x_m = 0.0;
  double y_m = 0.0;
  double mean_square_disp = 0.0;
};

struct ScanGrid {
  int nx = 15;
  int ny = 10;
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  // Evenly spaced nx x ny grid inset by half a cell from every edge.
  static ScanGrid covering(const BeamModeModel& model, int nx, int ny);
  // n points along x at fixed y, spaced by `spacing_m`, centred on the mirror.
  static ScanGrid line(const BeamModeModel& model, int n, double spacing_m, double y);
};

using ScanDataset = std::vector<ScanPoint>;

// u^2 * (1 + noise * N(0,1)), clipped at 0. Deterministic per seed.
ScanDataset synthesize_tomography(const BeamModeModel& model, const ScanGrid& grid,
                                  double noise, std::uint64_t seed);

struct ModeFit {
  BeamModeModel model;
  double amplitude = 0.0;
  double residual_norm = 0.0;
  double runner_up_residual = 0.0;  // best residual among the other mode indices
};

// Least squares over mode index {1,2,3}, transverse model and dead fraction, with a
// linear amplitude. Geometry, density and family come from `geometry`. Throws
// InsufficientData below 30 points and Ambiguous when two indices fit within 5%.
ModeFit fit_mode(const ScanDataset& data, const BeamModeModel& geometry);

// (1/zeta^2) * sum L_i^2 / D_i over the top layer of the first two materials.
double photothermal_tau(const LayerStack& stack, double zeta = 1.0);
// zeta giving the requested tau.
double zeta_for_tau(const LayerStack& stack, double tau_s);
// zeta * sqrt(D * tau)
double heat_diffusion_length(double diffusivity_m2_s, double tau_s, double zeta = 1.0);

}  // namespace optomech
