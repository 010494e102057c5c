#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "optomech/backaction.hpp"
#include "optomech/cavity.hpp"
#include "optomech/errors.hpp"

using namespace optomech;

namespace {
const auto kMode = MechanicalMode::from_frequency_hz(280e3, 8750.0, 22e-12);
}

TEST_SUITE("backaction") {
  TEST_CASE("no back-action on resonance") {
    const CavityParams cav;
    const auto d = effective_damping(0.0, cav, kMode, PhotothermalModel::disabled());
    CHECK(d.gamma_eff == doctest::Approx(kMode.gamma()));
    CHECK(d.omega_eff == doctest::Approx(kMode.omega_m()));
    CHECK(d.stable);
    CHECK(d.cooling_ratio_pred == doctest::Approx(1.0));
  }

  TEST_CASE("radiation-pressure damping and spring match the one-pole oracle") {
    const CavityParams cav;
    for (double u : {-1.0, -0.2, 0.3, 0.577, 1.4}) {
      const double delta = u * cav.kappa();
      const double beta = force_gradient_beta(delta, cav);
      const auto o = oracle::one_pole(beta, 22e-12, 2.0 * cav.kappa(), kMode.omega_m(), kMode.gamma());
      const auto d = effective_damping(delta, cav, kMode, PhotothermalModel::disabled());
      CHECK(d.gamma_eff == doctest::Approx(o.gamma_eff).epsilon(1e-12));
      CHECK(d.omega_eff * d.omega_eff == doctest::Approx(o.omega_eff2).epsilon(1e-12));
      CHECK(d.gamma_pt == 0.0);
    }
  }

  TEST_CASE("positive detuning cools, negative heats") {
    const CavityParams cav;
    const double k = cav.kappa();
    CHECK(effective_damping(0.5 * k, cav, kMode, PhotothermalModel::disabled()).gamma_rp > 0.0);
    CHECK(effective_damping(-0.5 * k, cav, kMode, PhotothermalModel::disabled()).gamma_rp < 0.0);
  }

  TEST_CASE("photothermal term adds a second one-pole filter") {
    const CavityParams cav;
    const PhotothermalModel pt(0.5, 20e-9);
    const double delta = 0.4 * cav.kappa();
    const double beta = force_gradient_beta(delta, cav);
    const auto rp = oracle::one_pole(beta, 22e-12, 2.0 * cav.kappa(), kMode.omega_m(), 0.0);
    const auto ph = oracle::one_pole(0.5 * beta, 22e-12, 1.0 / 20e-9, kMode.omega_m(), 0.0);
    const auto d = effective_damping(delta, cav, kMode, pt);
    CHECK(d.gamma_pt == doctest::Approx(ph.gamma_eff).epsilon(1e-12));
    CHECK(d.gamma_eff == doctest::Approx(kMode.gamma() + rp.gamma_eff + ph.gamma_eff).epsilon(1e-12));
    const double w2 = kMode.omega_m() * kMode.omega_m();
    CHECK(d.omega_eff * d.omega_eff ==
          doctest::Approx(rp.omega_eff2 + ph.omega_eff2 - w2).epsilon(1e-12));
  }

  TEST_CASE("damping gain is linear in power") {
    const CavityParams c1 = CavityParams().with_power(1e-3);
    const CavityParams c2 = c1.with_power(2e-3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
      const double delta = u(rng) * c1.kappa();
      const double g1 = effective_damping(delta, c1, kMode, PhotothermalModel::disabled()).gamma_eff - kMode.gamma();
      const double g2 = effective_damping(delta, c2, kMode, PhotothermalModel::disabled()).gamma_eff - kMode.gamma();
      CHECK(g2 == doctest::Approx(2.0 * g1).epsilon(1e-9));
    }
  }

  TEST_CASE("cooling ratio and its failure modes") {
    const CavityParams cav;
    const auto d = effective_damping(0.577 * cav.kappa(), cav, kMode, PhotothermalModel::disabled());
    const double w2 = kMode.omega_m() * kMode.omega_m();
    CHECK(predicted_cooling_ratio(d, kMode) ==
          doctest::Approx(d.gamma_eff / kMode.gamma() * d.omega_eff * d.omega_eff / w2));

    const CavityParams strong = cav.with_power(0.2);
    const auto unstable = effective_damping(-0.3 * cav.kappa(), strong, kMode, PhotothermalModel::disabled());
    CHECK_FALSE(unstable.stable);
    CHECK(std::isnan(unstable.cooling_ratio_pred));
    CHECK_THROWS_AS(predicted_cooling_ratio(unstable, kMode), Error);

    try {
      effective_damping(0.5 * cav.kappa(), cav.with_power(1.0), kMode, PhotothermalModel::disabled());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnstableSpring);
    }
  }

  TEST_CASE("sweep flags failures without throwing") {
    const CavityParams cav = CavityParams().with_power(1.0);
    const auto grid = detuning_grid(-1.0, 1.0, 21, cav);
    REQUIRE(grid.size() == 21);
    CHECK(grid.front() == doctest::Approx(-cav.kappa()));
    CHECK(grid.back() == doctest::Approx(cav.kappa()));
    const auto rows = sweep_detuning(grid, cav, kMode, PhotothermalModel::disabled());
    REQUIRE(rows.size() == 21);
    int failed = 0;
    for (const auto& r : rows) {
      if (r.error) {
        ++failed;
        CHECK(std::isnan(r.t_eff_k));
        if (*r.error == ErrorCode::Unstable) {
          CHECK(r.gamma_eff_hz_fwhm < 0.0);
        } else {
          CHECK(*r.error == ErrorCode::UnstableSpring);
          CHECK(std::isnan(r.gamma_eff_hz_fwhm));
        }
      }
    }
    CHECK(failed > 0);
    CHECK(failed < 21);
  }

  TEST_CASE("sweep rows at zero power are flat") {
    const CavityParams cav = CavityParams().with_power(0.0);
    const auto rows = sweep_detuning(detuning_grid(-1.0, 1.0, 11, cav), cav, kMode, PhotothermalModel::disabled());
    for (const auto& r : rows) {
      CHECK(r.gamma_eff_hz_fwhm == doctest::Approx(32.0));
      CHECK(r.cooling_ratio == doctest::Approx(1.0));
      CHECK(r.t_eff_k == doctest::Approx(300.0));
      CHECK(r.stable);
    }
  }

  TEST_CASE("stability flips with the sign of the detuning") {
    const CavityParams cav = CavityParams().with_power(0.05);
    const auto rows = sweep_detuning(detuning_grid(-1.0, 1.0, 20, cav), cav, kMode, PhotothermalModel::disabled());
    for (const auto& r : rows) {
      if (r.error) continue;
      CHECK(r.stable == (r.dyn.gamma_eff > 0.0));
      if (r.delta_over_kappa > 0.0) CHECK(r.stable);
    }
    CHECK_FALSE(rows.front().stable);
  }
}
