#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "optomech/backaction.hpp"
#include "optomech/cavity.hpp"
#include "optomech/errors.hpp"
#include "optomech/estimation.hpp"
#include "optomech/spectra.hpp"

using namespace optomech;

namespace {

Spectrum lorentzian(double center, double fwhm, double area, double offset, int n = 1001,
                    double half_span = 20.0) {
  Spectrum s;
  for (int i = 0; i < n; ++i) {
    const double f = center - half_span * fwhm + 2.0 * half_span * fwhm * i / (n - 1);
    const double d = f - center;
    s.frequency_hz.push_back(f);
    s.values.push_back(area * fwhm / (2.0 * oracle::pi) / (d * d + 0.25 * fwhm * fwhm) + offset);
  }
  return s;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("Welch level of white noise") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 2.0);
    TimeTrace t;
    t.dt = 1e-6;
    for (int i = 0; i < 1 << 18; ++i) t.samples.push_back(n(rng));
    const auto s = estimate_psd(t, {1024, 0.5, Window::Hann});
    double mean = 0.0;
    for (std::size_t k = 10; k < s.size() - 10; ++k) mean += s.values[k];
    mean /= static_cast<double>(s.size() - 20);
    CHECK(mean == doctest::Approx(2.0 * 4.0 * 1e-6).epsilon(0.03));
    CHECK(s.frequency_hz[1] == doctest::Approx(1.0 / (1024 * 1e-6)));
    CHECK(s.frequency_hz.back() == doctest::Approx(0.5e6));
  }

  TEST_CASE("Welch area of a sine equals its variance") {
    TimeTrace t;
    t.dt = 1e-6;
    const double a = 3e-12;
    for (int i = 0; i < 1 << 16; ++i) t.samples.push_back(a * std::sin(2.0 * oracle::pi * 12345.0 * i * t.dt));
    for (Window w : {Window::Hann, Window::Rect}) {
      const auto s = estimate_psd(t, {4096, 0.5, w});
      CHECK(spectrum_area(s) == doctest::Approx(0.5 * a * a).epsilon(0.02));
      CHECK(std::abs(s.frequency_hz[peak_index(s)] - 12345.0) <= s.frequency_hz[1]);
    }
  }

  TEST_CASE("timestamped input must be uniform") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.5, 4.0};
    std::vector<double> x{0.0, 1.0, 0.0, -1.0, 0.0};
    try {
      estimate_psd(t, x, {4, 0.5, Window::Hann});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonUniform);
    }
    std::vector<double> tu{0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK(estimate_psd(tu, x, {4, 0.5, Window::Rect}).size() == 3);
    CHECK_THROWS_AS(estimate_psd(tu, x, {8, 0.5, Window::Rect}), Error);
  }

  TEST_CASE("segment length for a resolution") {
    CHECK(segment_length_for_resolution(1e-6, 10.0) == 100000);
  }

  TEST_CASE("noiseless Lorentzian is recovered exactly") {
    const auto s = lorentzian(280e3, 32.0, 6e-23, 1e-27);
    const auto f = fit_lorentzian(s);
    CHECK(f.converged);
    CHECK(f.center_hz == doctest::Approx(280e3).epsilon(1e-9));
    CHECK(f.fwhm_hz == doctest::Approx(32.0).epsilon(1e-6));
    CHECK(f.area == doctest::Approx(6e-23).epsilon(1e-6));
    CHECK(f.offset == doctest::Approx(1e-27).epsilon(1e-6));
    CHECK(lorentzian_psd(280e3, 280e3, 32.0, 6e-23, 0.0) == doctest::Approx(2.0 * 6e-23 / (oracle::pi * 32.0)));
  }

  TEST_CASE("fit from a poor starting guess") {
    const auto s = lorentzian(1000.0, 10.0, 5.0, 0.01);
    LorentzianGuess g{1004.0, 25.0, 2.0, 0.0};
    const auto f = fit_lorentzian(s, g);
    CHECK(f.fwhm_hz == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(f.center_hz == doctest::Approx(1000.0).epsilon(1e-9));
  }

  TEST_CASE("noisy fits stay within 5% and report errors") {
    const auto clean = lorentzian(280e3, 32.0, 6e-23, 1e-27, 2001);
    const int seeds = 30;
    double sq = 0.0, err = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      auto s = clean;
      std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
      std::normal_distribution<double> n(0.0, 0.05);
      for (double& v : s.values) v *= 1.0 + n(rng);
      const auto f = fit_peak(s);
      CHECK(f.fwhm_hz == doctest::Approx(32.0).epsilon(0.05));
      CHECK(f.err_fwhm > 0.0);
      sq += (f.fwhm_hz - 32.0) * (f.fwhm_hz - 32.0);
      err += f.err_fwhm;
    }
    // Reported errors should match the observed scatter to within a factor of two.
    const double ratio = std::sqrt(sq / seeds) / (err / seeds);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }

  TEST_CASE("no peak in a flat spectrum") {
    Spectrum s;
    for (int i = 0; i < 100; ++i) {
      s.frequency_hz.push_back(i);
      s.values.push_back(1.0);
    }
    try {
      guess_lorentzian(s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoPeak);
    }
  }

  TEST_CASE("PDH normalization undoes the readout gain") {
    const CavityParams cav;
    const auto mode = MechanicalMode::from_frequency_hz(280e3, 8750.0, 22e-12);
    const double mod = 2.0 * oracle::pi * 19e6;
    const double delta = 0.3 * cav.kappa();
    const auto dyn = effective_damping(delta, cav, mode, PhotothermalModel::disabled());
    const auto s = analytic_psd(psd_grid(dyn, 30.0, 30.0), mode, dyn);
    const double gain = readout_transfer(delta, cav, mod, mode.omega_m());
    const auto direct = fit_peak(s);
    const auto via = normalize_by_pdh_slope(fit_peak(to_readout(s, gain)), delta, cav, mod);
    CHECK(via.area == doctest::Approx(direct.area).epsilon(1e-6));
    CHECK(via.fwhm_hz == doctest::Approx(direct.fwhm_hz).epsilon(1e-6));
  }

  TEST_CASE("effective mass calibration from a thermal spectrum") {
    const auto mode = MechanicalMode::from_frequency_hz(280e3, 8750.0, 22e-12);
    const auto dyn = effective_damping(0.0, CavityParams().with_power(0.0), mode, PhotothermalModel::disabled());
    const auto s = analytic_psd(psd_grid(dyn), mode, dyn);
    CHECK(calibrate_effective_mass(s, 280e3, 300.0) == doctest::Approx(22e-12).epsilon(0.01));
  }

  TEST_CASE("heating diagnostic") {
    auto pf = [](double p, double area, double w) {
      PowerFit f;
      f.power_w = p;
      f.fit.area = area;
      f.fit.fwhm_hz = w;
      return f;
    };
    std::vector<PowerFit> same{pf(1e-3, 1.0, 10.0), pf(1e-3, 0.5, 20.5), pf(1e-3, 0.25, 39.0),
                               pf(2e-3, 0.5, 20.0), pf(2e-3, 0.2, 49.0), pf(2e-3, 0.1, 102.0)};
    const auto d = heating_diagnostic(same);
    CHECK_FALSE(d.heating_flagged);
    CHECK(d.groups.size() == 2);
    CHECK(d.rows.front().power_w == 1e-3);

    std::vector<PowerFit> hot = same;
    for (auto& f : hot) {
      if (f.power_w == 2e-3) f.fit.area *= 1.5;
    }
    CHECK(heating_diagnostic(hot).heating_flagged);

    std::vector<PowerFit> few(same.begin(), same.begin() + 4);
    try {
      heating_diagnostic(few);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientData);
    }
  }
}
