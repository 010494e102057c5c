#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "optomech/cavity.hpp"
#include "optomech/errors.hpp"

using namespace optomech;

TEST_SUITE("cavity") {
  TEST_CASE("circulating power and force on resonance") {
    const CavityParams cav;
    CHECK(circulating_power(0.0, cav) == doctest::Approx(0.637).epsilon(1e-3));
    CHECK(radiation_force(0.0, cav) == doctest::Approx(2.0 * 0.63662 / oracle::c).epsilon(1e-4));
    for (double u : {-2.0, -0.3, 0.4, 1.0, 3.0}) {
      const double d = u * cav.kappa();
      CHECK(circulating_power(d, cav) ==
            doctest::Approx(oracle::circulating(d, 500.0, 0.025, 2e-3)).epsilon(1e-12));
    }
  }

  TEST_CASE("beta is the displacement gradient of the force") {
    const CavityParams cav;
    for (double u : {-1.5, -0.5, 0.1, 0.577, 1.0, 2.0}) {
      const double d = u * cav.kappa();
      CHECK(force_gradient_beta(d, cav) ==
            doctest::Approx(oracle::beta_numeric(d, 500.0, 0.025, 2e-3, 1064e-9)).epsilon(1e-6));
    }
    CHECK(force_gradient_beta(cav.kappa() / std::sqrt(3.0), cav) ==
          doctest::Approx(5.18).epsilon(0.01));
  }

  TEST_CASE("beta properties") {
    const CavityParams cav;
    const CavityParams cav3 = cav.with_power(6e-3);
    CHECK(force_gradient_beta(0.0, cav) == 0.0);
    double best = 0.0;
    double arg = 0.0;
    for (int i = 1; i <= 2000; ++i) {
      const double d = i * 1e-3 * cav.kappa();
      const double b = force_gradient_beta(d, cav);
      CHECK(force_gradient_beta(-d, cav) == doctest::Approx(-b).epsilon(1e-13));
      CHECK(force_gradient_beta(d, cav3) == doctest::Approx(3.0 * b).epsilon(1e-13));
      if (b > best) {
        best = b;
        arg = d;
      }
    }
    CHECK(std::abs(arg / cav.kappa() - 1.0 / std::sqrt(3.0)) <= 1e-3);
  }

  TEST_CASE("cavity response bundles the pieces") {
    const CavityParams cav;
    const double d = 0.3 * cav.kappa();
    const auto r = cavity_response(d, cav);
    CHECK(r.circulating_power == doctest::Approx(circulating_power(d, cav)));
    CHECK(r.radiation_force == doctest::Approx(radiation_force(d, cav)));
    CHECK(r.force_gradient_beta == doctest::Approx(force_gradient_beta(d, cav)));
  }

  TEST_CASE("reflection coefficient is passive") {
    const CavityParams cav;
    for (double u : {-5.0, -1.0, 0.0, 0.5, 5.0}) {
      CHECK(std::abs(reflection_coefficient(u * cav.kappa(), cav)) <= 1.0 + 1e-12);
    }
    CHECK(std::abs(reflection_coefficient(1e6 * cav.kappa(), cav)) == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("reflection scan dip width and periodicity") {
    const CavityParams cav;
    const double fw = reflection_fwhm_length(cav);
    CHECK(fw == doctest::Approx(1064e-9 / 1000.0));
    const double half_wave = 1064e-9 / 2.0;
    std::vector<double> x{0.0, half_wave, 0.5 * fw, -0.5 * fw, 0.25 * half_wave};
    const auto p = reflection_scan(x, cav);
    CHECK(p[0] == doctest::Approx(p[1]).epsilon(1e-9));
    CHECK(p[0] < p[2]);
    CHECK(p[2] == doctest::Approx(p[3]).epsilon(1e-9));
    // half depth at half width
    const double depth = p[4] - p[0];
    CHECK(p[4] - p[2] == doctest::Approx(0.5 * depth).epsilon(0.01));
  }

  TEST_CASE("PDH discriminant") {
    const CavityParams cav;
    const double mod = 2.0 * oracle::pi * 19e6;
    const PdhDiscriminant pdh(cav, mod);
    CHECK(pdh.error(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pdh.slope(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pdh.regime_warning());
    for (double u : {0.1, 0.5, 1.0, 2.0}) {
      const double d = u * cav.kappa();
      CHECK(pdh.error(-d) == doctest::Approx(-pdh.error(d)).epsilon(1e-10));
      const double h = 1e-5;
      const double numeric = (pdh.error(d + h * cav.kappa()) - pdh.error(d - h * cav.kappa())) / (2 * h);
      CHECK(pdh.slope(d) == doctest::Approx(numeric).epsilon(1e-5));
    }
    CHECK_FALSE(PdhDiscriminant(cav, 20.0 * cav.kappa()).regime_warning());
    const auto s = pdh_error_signal(0.2 * cav.kappa(), mod, cav);
    CHECK(s.value == doctest::Approx(pdh.error(0.2 * cav.kappa())));
    CHECK(s.regime_warning);
  }
}
