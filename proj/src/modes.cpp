#include "optomech/modes.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr int kMaxBeamIndex = 20;
constexpr double kPi = 3.14159265358979323846;

// Newton on cos(b) - sign / cosh(b) = 0 starting at `b`.
double refine_root(double b, double sign) {
  for (int i = 0; i < 50; ++i) {
    const double f = std::cos(b) - sign / std::cosh(b);
    const double df = -std::sin(b) + sign * std::tanh(b) / std::cosh(b);
    const double step = f / df;
    b -= step;
    if (std::abs(step) < 1e-15 * b) break;
  }
  return b;
}

double clamped_clamped_root(int n) { return refine_root((n + 0.5) * kPi, 1.0); }

double cantilever_root() { return refine_root(1.8751040687, -1.0); }

// cosh(bx) - cos(bx) - s (sinh(bx) - sin(bx)), rearranged so that the growing
// exponentials cancel analytically.
double clamped_clamped_raw(double beta, double xi) {
  const double den = std::sinh(beta) - std::sin(beta);
  const double s = (std::cosh(beta) - std::cos(beta)) / den;
  const double one_minus_s = (-std::exp(-beta) - std::sin(beta) + std::cos(beta)) / den;
  const double bx = beta * xi;
  const double grow = one_minus_s * std::exp(bx);
  return 0.5 * (grow + (1.0 + s) * std::exp(-bx)) - std::cos(bx) + s * std::sin(bx);
}

double cantilever_raw(double beta, double xi) {
  const double s = (std::cosh(beta) + std::cos(beta)) / (std::sinh(beta) + std::sin(beta));
  const double bx = beta * xi;
  return std::cosh(bx) - std::cos(bx) - s * (std::sinh(bx) - std::sin(bx));
}

struct BeamTable {
  std::array<double, kMaxBeamIndex + 1> beta{};
  std::array<double, kMaxBeamIndex + 1> norm{};
  std::array<double, kMaxBeamIndex + 1> argmax{};
  double cantilever_beta = 0.0;
  double cantilever_tip = 0.0;
};

const BeamTable& beam_table() {
  static const BeamTable table = [] {
    BeamTable t;
    constexpr int samples = 20000;
    for (int n = 1; n <= kMaxBeamIndex; ++n) {
      const double b = clamped_clamped_root(n);
      t.beta[n] = b;
      double best = 0.0;
      double at = 0.0;
      for (int i = 0; i <= samples; ++i) {
        const double xi = static_cast<double>(i) / samples;
        const double v = std::abs(clamped_clamped_raw(b, xi));
        if (v > best + 1e-12) {
          best = v;
          at = xi;
        }
      }
      // golden refinement of the sampled maximum
      double lo = std::max(0.0, at - 1.0 / samples);
      double hi = std::min(1.0, at + 1.0 / samples);
      for (int it = 0; it < 60; ++it) {
        const double m1 = hi - 0.618033988749895 * (hi - lo);
        const double m2 = lo + 0.618033988749895 * (hi - lo);
        if (std::abs(clamped_clamped_raw(b, m1)) > std::abs(clamped_clamped_raw(b, m2))) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      t.argmax[n] = 0.5 * (lo + hi);
      t.norm[n] = std::abs(clamped_clamped_raw(b, t.argmax[n]));
    }
    t.cantilever_beta = cantilever_root();
    t.cantilever_tip = cantilever_raw(t.cantilever_beta, 1.0);
    return t;
  }();
  return table;
}

double trapezoid(double a, double b, int n, auto&& f) {
  if (b <= a) return 0.0;
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

void require_inside(const BeamModeModel& model, double x, double y) {
  require(x >= 0.0 && x <= model.length_m && y >= 0.0 && y <= model.width_m,
          ErrorCode::OutOfBounds, "point lies outside the mirror");
}

double mass_at(const BeamModeModel& model, const ProbeProfile& probe, int n) {
  const double L = model.length_m;
  const double W = model.width_m;
  const double y_dead = model.dead_fraction * W;
  const double w = probe.waist_m;
  auto gx = [&](double x) { return std::exp(-2.0 * (x - probe.x0) * (x - probe.x0) / (w * w)); };
  auto gy = [&](double y) { return std::exp(-2.0 * (y - probe.y0) * (y - probe.y0) / (w * w)); };
  auto ux = [&](double x) { return longitudinal_shape(model, x); };
  auto uy = [&](double y) { return transverse_shape(model, y); };

  const double u2 = trapezoid(0.0, L, n, [&](double x) { return ux(x) * ux(x); }) *
                    trapezoid(y_dead, W, n, [&](double y) { return uy(y) * uy(y); });

  const double xa = std::max(0.0, probe.x0 - 6.0 * w);
  const double xb = std::min(L, probe.x0 + 6.0 * w);
  const double ya = std::max(0.0, probe.y0 - 6.0 * w);
  const double yb = std::min(W, probe.y0 + 6.0 * w);
  const double v2_norm = trapezoid(xa, xb, n, gx) * trapezoid(ya, yb, n, gy);
  const double overlap = trapezoid(xa, xb, n, [&](double x) { return ux(x) * gx(x); }) *
                         trapezoid(std::max(ya, y_dead), yb, n,
                                   [&](double y) { return uy(y) * gy(y); }) /
                         v2_norm;

  require(overlap * overlap >= 1e-12 * u2 / (L * W), ErrorCode::NodeDivergence,
          "probe overlap with the mode vanishes (node)");
  return model.surface_density * u2 / (overlap * overlap);
}

}  // namespace

void BeamModeModel::validate() const {
  require(std::isfinite(length_m) && length_m > 0.0 && std::isfinite(width_m) && width_m > 0.0,
          ErrorCode::InvalidArgument, "beam dimensions must be > 0");
  require(std::isfinite(surface_density) && surface_density > 0.0, ErrorCode::InvalidArgument,
          "surface density must be > 0");
  require(mode_index >= 1, ErrorCode::InvalidArgument, "mode index must be >= 1");
  require(family != LongitudinalFamily::ClampedClampedBeam || mode_index <= kMaxBeamIndex,
          ErrorCode::InvalidArgument, "clamped-clamped mode index must be <= 20");
  require(dead_fraction >= 0.0 && dead_fraction <= 0.5, ErrorCode::InvalidArgument,
          "dead fraction must lie in [0, 0.5]");
}

double longitudinal_shape(const BeamModeModel& model, double x) {
  const double xi = x / model.length_m;
  if (model.family == LongitudinalFamily::TensionString) {
    return std::sin(model.mode_index * kPi * xi);
  }
  const auto& t = beam_table();
  return clamped_clamped_raw(t.beta[model.mode_index], xi) / t.norm[model.mode_index];
}

double transverse_shape(const BeamModeModel& model, double y) {
  const double y_dead = model.dead_fraction * model.width_m;
  if (y < y_dead) return 0.0;
  if (model.transverse == TransverseModel::Uniform) return 1.0;
  const auto& t = beam_table();
  const double eta = (y - y_dead) / (model.width_m - y_dead);
  return cantilever_raw(t.cantilever_beta, eta) / t.cantilever_tip;
}

double mode_shape(const BeamModeModel& model, double x, double y) {
  model.validate();
  require_inside(model, x, y);
  return longitudinal_shape(model, x) * transverse_shape(model, y);
}

double frequency_ratio(LongitudinalFamily family, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "mode index must be >= 1");
  if (family == LongitudinalFamily::TensionString) return static_cast<double>(n);
  require(n <= kMaxBeamIndex, ErrorCode::InvalidArgument,
          "clamped-clamped mode index must be <= 20");
  const auto& t = beam_table();
  const double r = t.beta[n] / t.beta[1];
  return r * r;
}

Point2 antinode(const BeamModeModel& model) {
  model.validate();
  Point2 p;
  if (model.family == LongitudinalFamily::TensionString) {
    p.x = model.length_m / (2.0 * model.mode_index);
  } else {
    p.x = beam_table().argmax[model.mode_index] * model.length_m;
  }
  p.y = model.transverse == TransverseModel::OneSideClamped
            ? model.width_m
            : 0.5 * (model.dead_fraction + 1.0) * model.width_m;
  return p;
}

EffectiveMass effective_mass(const BeamModeModel& model, const ProbeProfile& probe,
                             int resolution) {
  model.validate();
  require(resolution >= 64, ErrorCode::InvalidArgument, "quadrature resolution must be >= 64");
  require(std::isfinite(probe.waist_m) && probe.waist_m > 0.0, ErrorCode::InvalidArgument,
          "probe waist must be > 0");
  require_inside(model, probe.x0, probe.y0);
  EffectiveMass out;
  out.resolution = resolution;
  out.mass_kg = mass_at(model, probe, resolution);
  out.error_bound_kg = std::abs(out.mass_kg - mass_at(model, probe, 2 * resolution));
  return out;
}

double point_probe_mass(const BeamModeModel& model, Point2 probe) {
  const double u0 = mode_shape(model, probe.x, probe.y);
  constexpr int n = 4096;
  const double u2 =
      trapezoid(0.0, model.length_m, n,
                [&](double x) { return std::pow(longitudinal_shape(model, x), 2); }) *
      trapezoid(model.dead_fraction * model.width_m, model.width_m, n,
                [&](double y) { return std::pow(transverse_shape(model, y), 2); });
  require(u0 * u0 >= 1e-12 * u2 / (model.length_m * model.width_m), ErrorCode::NodeDivergence,
          "probe sits on a node");
  return model.surface_density * u2 / (u0 * u0);
}

ScanGrid ScanGrid::covering(const BeamModeModel& model, int nx, int ny) {
  require(nx >= 1 && ny >= 1, ErrorCode::InvalidArgument, "grid needs at least one point per axis");
  const double hx = model.length_m / nx;
  const double hy = model.width_m / ny;
  return {nx, ny, 0.5 * hx, model.length_m - 0.5 * hx, 0.5 * hy, model.width_m - 0.5 * hy};
}

ScanGrid ScanGrid::line(const BeamModeModel& model, int n, double spacing_m, double y) {
  require(n >= 2 && spacing_m > 0.0, ErrorCode::InvalidArgument,
          "line scan needs >= 2 points and positive spacing");
  const double half = 0.5 * (n - 1) * spacing_m;
  return {n, 1, 0.5 * model.length_m - half, 0.5 * model.length_m + half, y, y};
}

ScanDataset synthesize_tomography(const BeamModeModel& model, const ScanGrid& grid, double noise,
                                  std::uint64_t seed) {
  model.validate();
  require(grid.nx >= 1 && grid.ny >= 1, ErrorCode::InvalidArgument, "empty scan grid");
  require(noise >= 0.0 && std::isfinite(noise), ErrorCode::InvalidArgument,
          "noise level must be >= 0");
  std::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal;
  ScanDataset out;
  out.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.ny == 1 ? grid.y_min
                                  : grid.y_min + (grid.y_max - grid.y_min) * j / (grid.ny - 1);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.nx == 1 ? grid.x_min
                                    : grid.x_min + (grid.x_max - grid.x_min) * i / (grid.nx - 1);
      const double u = mode_shape(model, x, y);
      const double factor = noise > 0.0 ? 1.0 + noise * normal(rng) : 1.0;
      out.push_back({x, y, std::max(0.0, u * u * factor)});
    }
  }
  return out;
}

ModeFit fit_mode(const ScanDataset& data, const BeamModeModel& geometry) {
  require(data.size() >= 30, ErrorCode::InsufficientData, "mode fit needs at least 30 points");
  BeamModeModel probe_model = geometry;
  probe_model.validate();
  for (const auto& p : data) {
    require_inside(geometry, p.x_m, p.y_m);
    require(std::isfinite(p.mean_square_disp), ErrorCode::InvalidArgument,
            "non-finite scan value");
  }

  auto evaluate = [&](BeamModeModel m, double* amplitude) {
    double su4 = 0.0;
    double smu = 0.0;
    std::vector<double> u2(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double u = longitudinal_shape(m, data[i].x_m) * transverse_shape(m, data[i].y_m);
      u2[i] = u * u;
      su4 += u2[i] * u2[i];
      smu += data[i].mean_square_disp * u2[i];
    }
    const double a = su4 > 0.0 ? std::max(0.0, smu / su4) : 0.0;
    double r = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double d = data[i].mean_square_disp - a * u2[i];
      r += d * d;
    }
    if (amplitude) *amplitude = a;
    return std::sqrt(r);
  };

  std::array<ModeFit, 3> best_per_index;
  for (int n = 1; n <= 3; ++n) {
    ModeFit best;
    best.residual_norm = std::numeric_limits<double>::infinity();
    for (auto transverse : {TransverseModel::Uniform, TransverseModel::OneSideClamped}) {
      BeamModeModel m = geometry;
      m.mode_index = n;
      m.transverse = transverse;
      double best_d = 0.0;
      double best_r = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 50; ++k) {
        m.dead_fraction = 0.01 * k;
        const double r = evaluate(m, nullptr);
        if (r < best_r) {
          best_r = r;
          best_d = m.dead_fraction;
        }
      }
      double lo = std::max(0.0, best_d - 0.01);
      double hi = std::min(0.5, best_d + 0.01);
      auto at = [&](double d) {
        m.dead_fraction = d;
        return evaluate(m, nullptr);
      };
      for (int it = 0; it < 40; ++it) {
        const double m1 = hi - 0.618033988749895 * (hi - lo);
        const double m2 = lo + 0.618033988749895 * (hi - lo);
        if (at(m1) < at(m2)) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      const double refined = 0.5 * (lo + hi);
      if (at(refined) < best_r) best_d = refined;
      m.dead_fraction = best_d;
      double amp = 0.0;
      const double r = evaluate(m, &amp);
      if (r < best.residual_norm) {
        best.model = m;
        best.amplitude = amp;
        best.residual_norm = r;
      }
    }
    best_per_index[n - 1] = best;
  }

  const auto winner = std::min_element(
      best_per_index.begin(), best_per_index.end(),
      [](const ModeFit& a, const ModeFit& b) { return a.residual_norm < b.residual_norm; });
  ModeFit out = *winner;
  out.runner_up_residual = std::numeric_limits<double>::infinity();
  for (const auto& f : best_per_index) {
    if (&f != &*winner) out.runner_up_residual = std::min(out.runner_up_residual, f.residual_norm);
  }
  require(out.runner_up_residual > 1.05 * out.residual_norm, ErrorCode::Ambiguous,
          "two mode indices fit within 5% of each other");
  return out;
}

double photothermal_tau(const LayerStack& stack, double zeta) {
  require(std::isfinite(zeta) && zeta > 0.0, ErrorCode::InvalidArgument, "zeta must be > 0");
  const auto& layers = stack.layers();
  const Layer* first = &layers.front();
  const Layer* second = nullptr;
  for (const auto& l : layers) {
    if (l.material != first->material) {
      second = &l;
      break;
    }
  }
  require(second != nullptr, ErrorCode::InvalidArgument, "stack needs two materials");
  double sum = 0.0;
  for (const Layer* l : {first, second}) {
    require(l->diffusivity_m2_s > 0.0 && l->thickness_m > 0.0, ErrorCode::InvalidArgument,
            "layer thickness and diffusivity must be > 0");
    sum += l->thickness_m * l->thickness_m / l->diffusivity_m2_s;
  }
  return sum / (zeta * zeta);
}

double zeta_for_tau(const LayerStack& stack, double tau_s) {
  require(std::isfinite(tau_s) && tau_s > 0.0, ErrorCode::InvalidArgument, "tau must be > 0");
  return std::sqrt(photothermal_tau(stack, 1.0) / tau_s);
}

double heat_diffusion_length(double diffusivity_m2_s, double tau_s, double zeta) {
  require(diffusivity_m2_s > 0.0 && tau_s > 0.0 && zeta > 0.0, ErrorCode::InvalidArgument,
          "diffusivity, tau and zeta must be > 0");
  return zeta * std::sqrt(diffusivity_m2_s * tau_s);
}

}  // namespace optomech
