#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "optomech/backaction.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectra.hpp"

using namespace optomech;

namespace {
const auto kMode = MechanicalMode::from_frequency_hz(280e3, 8750.0, 22e-12);
const PhotothermalModel kNone = PhotothermalModel::disabled();
}

TEST_SUITE("spectra") {
  TEST_CASE("analytic PSD equals the oracle pointwise") {
    const CavityParams cav;
    const auto dyn = effective_damping(0.4 * cav.kappa(), cav, kMode, kNone);
    const auto grid = psd_grid(dyn, 40.0, 20.0);
    const auto s = analytic_psd(grid, kMode, dyn);
    for (std::size_t i = 0; i < s.size(); i += 97) {
      CHECK(s.values[i] == doctest::Approx(oracle::psd(grid[i], 22e-12, kMode.gamma(), dyn.gamma_eff,
                                                      dyn.omega_eff * dyn.omega_eff, 300.0))
                               .epsilon(1e-10));
    }
  }

  TEST_CASE("area equals the displacement variance") {
    const CavityParams cav;
    for (double u : {0.0, 0.2, 0.8}) {
      const auto dyn = effective_damping(u * cav.kappa(), cav, kMode, kNone);
      const auto s = analytic_psd(psd_grid(dyn), kMode, dyn);
      CHECK(spectrum_area(s) == doctest::Approx(displacement_variance(kMode, dyn)).epsilon(0.005));
      const double w2 = dyn.omega_eff * dyn.omega_eff;
      CHECK(displacement_variance(kMode, dyn) ==
            doctest::Approx(kMode.gamma() / dyn.gamma_eff * oracle::kb * 300.0 / (22e-12 * w2)));
    }
  }

  TEST_CASE("peak location and width") {
    const CavityParams cav;
    const auto dyn = effective_damping(0.577 * cav.kappa(), cav, kMode, kNone);
    CHECK(psd_fwhm_hz(dyn) == doctest::Approx(dyn.gamma_eff / oracle::pi));
    const auto s = analytic_psd(psd_grid(dyn, 50.0, 400.0), kMode, dyn);
    CHECK(s.frequency_hz[peak_index(s)] == doctest::Approx(psd_peak_hz(dyn)).epsilon(1e-6));
    CHECK(points_within_fwhm(s) >= 390);
  }

  TEST_CASE("equipartition temperature round trip") {
    const auto dyn = effective_damping(0.0, CavityParams().with_power(0.0), kMode, kNone);
    const auto s = analytic_psd(psd_grid(dyn), kMode, dyn);
    CHECK(effective_temperature(s, kMode) == doctest::Approx(300.0).epsilon(0.01));
  }

  TEST_CASE("grid errors") {
    const auto dyn = effective_damping(0.0, CavityParams(), kMode, kNone);
    const auto narrow = psd_grid(dyn, 5.0, 50.0);
    CHECK_THROWS_AS(analytic_psd(narrow, kMode, dyn), Error);
    const auto coarse = psd_grid(dyn, 300.0, 3.0);
    try {
      effective_temperature(analytic_psd(coarse, kMode, dyn), kMode);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GridTooCoarse);
    }
  }

  TEST_CASE("unstable dynamics have no spectrum") {
    EffectiveDynamics dyn;
    dyn.gamma_eff = -1.0;
    dyn.omega_eff = kMode.omega_m();
    dyn.stable = false;
    std::vector<double> grid{1.0, 2.0};
    CHECK_THROWS_AS(analytic_psd(grid, kMode, dyn), Error);
  }

  TEST_CASE("susceptibility at resonance is purely imaginary") {
    const auto chi = mechanical_susceptibility(kMode.omega_m(), kMode);
    CHECK(std::abs(chi.response.real()) < 1e-9 * std::abs(chi.response.imag()));
    CHECK(std::abs(chi.response) ==
          doctest::Approx(8750.0 / (22e-12 * kMode.omega_m() * kMode.omega_m())));
  }

  TEST_CASE("readout gain") {
    const CavityParams cav;
    const double mod = 2.0 * oracle::pi * 19e6;
    CHECK(readout_transfer(0.0, cav, mod, kMode.omega_m()) == doctest::Approx(1.0));
    const double g = readout_transfer(0.3 * cav.kappa(), cav, mod, kMode.omega_m());
    CHECK(g > 0.0);
    CHECK(g < 1.0);
    const auto dyn = effective_damping(0.3 * cav.kappa(), cav, kMode, kNone);
    const auto s = analytic_psd(psd_grid(dyn), kMode, dyn);
    const auto back = from_readout(to_readout(s, g), g);
    CHECK(back.kind == SpectrumKind::Displacement);
    CHECK(to_readout(s, g).kind == SpectrumKind::PdhReadout);
    for (std::size_t i = 0; i < s.size(); i += 1000) CHECK(back.values[i] == doctest::Approx(s.values[i]));
    try {
      readout_transfer(0.0, cav, mod, 2.0 * oracle::pi * 5e6);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AdiabaticityViolation);
    }
  }

  TEST_CASE("crop keeps the requested band") {
    const auto dyn = effective_damping(0.0, CavityParams(), kMode, kNone);
    const auto s = analytic_psd(psd_grid(dyn), kMode, dyn);
    const auto c = crop(s, 279990.0, 280010.0);
    CHECK(c.frequency_hz.front() >= 279990.0);
    CHECK(c.frequency_hz.back() <= 280010.0);
    CHECK(c.size() < s.size());
  }
}
