#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "optomech/backaction.hpp"
#include "optomech/errors.hpp"
#include "optomech/langevin.hpp"

using namespace optomech;

namespace {
const PhotothermalModel kNone = PhotothermalModel::disabled();

// Fast, strongly damped mode so that statistical tests finish quickly.
MechanicalMode fast_mode(double temperature = 300.0) {
  return MechanicalMode::from_frequency_hz(20e3, 50.0, 22e-12, temperature);
}

SimulationOptions options_for(const MechanicalMode& m, double n_gamma) {
  SimulationOptions o;
  o.dt_s = 1.0 / m.frequency_hz() / 50.0;
  o.duration_s = n_gamma / m.gamma();
  return o;
}
}  // namespace

TEST_SUITE("langevin") {
  TEST_CASE("identical seeds give identical traces") {
    const auto m = fast_mode();
    const auto o = options_for(m, 20.0);
    const CavityParams cav;
    const auto a = simulate(o, cav, m, kNone, 0.3 * cav.kappa(), 11);
    const auto b = simulate(o, cav, m, kNone, 0.3 * cav.kappa(), 11);
    const auto c = simulate(o, cav, m, kNone, 0.3 * cav.kappa(), 12);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(a.seed == 11);
    CHECK(a.samples.size() >= 2);
  }

  TEST_CASE("step size limit") {
    const auto m = fast_mode();
    auto o = options_for(m, 1.0);
    o.dt_s = 1.0 / m.frequency_hz() / 40.0;
    try {
      simulate(o, CavityParams(), m, kNone, 0.0, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepTooLarge);
    }
  }

  TEST_CASE("free thermal oscillator obeys equipartition") {
    const auto m = fast_mode();
    const CavityParams cav = CavityParams().with_power(0.0);
    auto o = options_for(m, 3000.0);
    const auto runs = ensemble(4, o, cav, m, kNone, 0.0, 5);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
      REQUIRE(r.trace);
      const auto& s = r.trace->samples;
      // skip the first 20/gamma while the oscillator thermalises
      const std::size_t skip = static_cast<std::size_t>(20.0 / m.gamma() / r.trace->dt);
      for (std::size_t i = skip; i < s.size(); ++i) sum += s[i] * s[i];
      n += s.size() - skip;
    }
    const double expected = oracle::kb * 300.0 / (22e-12 * m.omega_m() * m.omega_m());
    CHECK(sum / n == doctest::Approx(expected).epsilon(0.05));
  }

  TEST_CASE("time-averaged mechanical energy equals k_B T") {
    const auto m = fast_mode();
    const CavityParams cav = CavityParams().with_power(0.0);
    LangevinSimulator sim(cav, m, kNone, 0.0, 1.0 / m.frequency_hz() / 50.0, 9);
    sim.advance(static_cast<std::size_t>(20.0 / m.gamma() / sim.dt()));
    double e = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      sim.step();
      e += total_energy(sim.state(), cav, m, 0.0).mechanical_term;
    }
    CHECK(e / n == doctest::Approx(oracle::kb * 300.0).epsilon(0.05));
  }

  TEST_CASE("energy terms") {
    const auto m = fast_mode();
    SimState s;
    const auto zero = total_energy(s, CavityParams().with_power(0.0), m, 0.0);
    CHECK(zero.field_term == 0.0);
    CHECK(zero.coupling_term == 0.0);
    CHECK(zero.mechanical_term == 0.0);
    s.x = 1e-12;
    s.v = 3e-6;
    const auto e = total_energy(s, CavityParams(), m, 0.2 * CavityParams().kappa());
    const double w = m.omega_m();
    CHECK(e.mechanical_term == doctest::Approx(0.5 * (22e-12 * 9e-12 + 22e-12 * w * w * 1e-24)));
    CHECK(e.mechanical_term >= 0.0);
    CHECK(e.total() == doctest::Approx(e.field_term + e.coupling_term + e.mechanical_term + e.drive_term));
  }

  TEST_CASE("ring-down decays at gamma_eff") {
    const auto m = MechanicalMode::from_frequency_hz(280e3, 8750.0, 9e-12, 0.0);
    const CavityParams cav;
    const double delta = 0.5 * cav.kappa();
    const auto dyn = effective_damping(delta, cav, m, kNone);
    SimulationOptions o;
    o.dt_s = 1.0 / 280e3 / 50.0;
    o.duration_s = 8.0 / dyn.gamma_eff;
    o.initial_x = 1e-12;
    const auto fit = fit_ringdown(simulate(o, cav, m, kNone, delta, 1));
    CHECK(fit.decay_rate == doctest::Approx(dyn.gamma_eff).epsilon(0.05));
    CHECK(fit.initial_amplitude == doctest::Approx(1e-12).epsilon(0.1));
  }

  TEST_CASE("negative detuning at high power self-oscillates") {
    const auto m = MechanicalMode::from_frequency_hz(280e3, 8750.0, 22e-12, 0.0);
    const CavityParams cav;
    const double delta = -0.577 * cav.kappa();
    const auto rep = classify_stability(cav, m, kNone, delta, 4e-3, 1e-12);
    CHECK(rep.unstable);
    CHECK(rep.growth_rate > 0.0);
    const auto ok = classify_stability(cav, m, kNone, -delta, 4e-3, 1e-12);
    CHECK_FALSE(ok.unstable);
  }

  TEST_CASE("ensemble seeds are split deterministically") {
    CHECK(run_seed(1, 0) != run_seed(1, 1));
    CHECK(run_seed(1, 0) == run_seed(1, 0));
    CHECK(run_seed(1, 0) != run_seed(2, 0));
    const auto m = fast_mode();
    const auto o = options_for(m, 5.0);
    const auto a = ensemble(3, o, CavityParams(), m, kNone, 0.0, 77);
    const auto b = ensemble(3, o, CavityParams(), m, kNone, 0.0, 77);
    for (int i = 0; i < 3; ++i) {
      REQUIRE(a[i].trace);
      CHECK(a[i].seed == run_seed(77, i));
      CHECK(a[i].trace->samples == b[i].trace->samples);
    }
  }

  TEST_CASE("ensemble spread of the variance shrinks as 1/n") {
    const auto m = fast_mode();
    const auto o = options_for(m, 30.0);
    const auto runs = ensemble(256, o, CavityParams().with_power(0.0), m, kNone, 0.0, 21);
    std::vector<double> v;
    for (const auto& r : runs) {
      REQUIRE(r.trace);
      const auto& s = r.trace->samples;
      v.push_back(std::inner_product(s.begin(), s.end(), s.begin(), 0.0) / s.size());
    }
    auto spread = [](const std::vector<double>& x) {
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
      double var = 0.0;
      for (double e : x) var += (e - mean) * (e - mean);
      return var / (x.size() - 1);
    };
    std::vector<double> groups;
    for (std::size_t i = 0; i + 3 < v.size(); i += 4) {
      groups.push_back(0.25 * (v[i] + v[i + 1] + v[i + 2] + v[i + 3]));
    }
    const double ratio = spread(groups) / spread(v);
    CHECK(ratio > 0.12);
    CHECK(ratio < 0.45);
  }
}
