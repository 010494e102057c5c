#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"
#include "optomech/io.hpp"
#include "optomech/svg.hpp"

using namespace optomech;

TEST_SUITE("config") {
  TEST_CASE("defaults describe the micro-bridge experiment") {
    const ExperimentConfig c;
    c.validate();
    CHECK(c.cavity.finesse == 500.0);
    CHECK(c.powers_w.size() == 2);
    CHECK(c.mechanical_mode().natural_fwhm_hz() == doctest::Approx(32.0));
    CHECK(c.mode_mass_kg == 22e-12);
  }

  TEST_CASE("parsing values, lists and comments") {
    const auto c = parse_config(
        "# comment\n"
        "cavity.finesse = 6000   # trailing\n"
        "laser.power_w = 1e-3, 2e-3, 4e-3\n"
        "cavity.buildup = F/pi\n"
        "beam.transverse = one_side_clamped\n"
        "photothermal.enabled = true\n"
        "stack.A.thickness_m = 1e-7\n"
        "stack.A.density_kg_m3 = 2000\n"
        "stack.A.count = 2\n"
        "stack.A.refractive_index = 1.5\n"
        "stack.A.diffusivity_m2_s = 1e-6\n"
        "stack.B.thickness_m = 2e-7\n"
        "stack.B.density_kg_m3 = 4000\n"
        "stack.B.count = 1\n"
        "stack.B.refractive_index = 2.1\n"
        "stack.B.diffusivity_m2_s = 2e-6\n"
        "\n"
        "sim.seed = 99\n");
    CHECK(c.cavity.finesse == 6000.0);
    CHECK(c.powers_w == std::vector<double>{1e-3, 2e-3, 4e-3});
    CHECK(c.cavity.buildup == BuildupConvention::FOverPi);
    CHECK(c.beam.transverse == TransverseModel::OneSideClamped);
    CHECK(c.pt_enabled);
    CHECK(c.seed == 99);
    REQUIRE(c.stack.size() == 2);
    CHECK(c.layer_stack().surface_density() == doctest::Approx(2 * 1e-7 * 2000 + 2e-7 * 4000));
    CHECK(c.entries.size() == 16);
    CHECK(c.entries.front().first == "cavity.finesse");
  }

  TEST_CASE("errors carry the line number") {
    try {
      parse_config("cavity.finesse = 500\n\ncavity.bogus = 1\n", "nominal.cfg");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find("nominal.cfg:3") != std::string::npos);
      CHECK(exit_code(e.code()) == 1);
    }
    CHECK_THROWS_AS(parse_config("cavity.finesse = five\n"), Error);
    CHECK_THROWS_AS(parse_config("just text\n"), Error);
    CHECK_THROWS_AS(parse_config("cavity.buildup = 3F\n"), Error);
  }

  TEST_CASE("validation catches unphysical values") {
    const auto c = parse_config("mode.effective_mass_kg = -1e-12\n");
    try {
      c.validate();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }

  TEST_CASE("missing file is an IO error") {
    try {
      load_config("/nonexistent/none.cfg");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(exit_code(e.code()) == 3);
    }
  }
}

TEST_SUITE("io") {
  TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1e-23, 280000.0, -3.25e-12, 1.0 / 3.0}) {
      CHECK(std::stod(format_number(v)) == v);
    }
  }

  TEST_CASE("spectrum CSV round trip") {
    Spectrum s;
    s.kind = SpectrumKind::PdhReadout;
    s.note = "seed=1";
    s.frequency_hz = {1.0, 2.0, 3.0};
    s.values = {1e-25, 2.5e-24, 1.0 / 3.0};
    const auto text = spectrum_csv(s);
    CHECK(text.find("frequency_hz,psd\n") != std::string::npos);
    const auto back = parse_spectrum_csv(text);
    CHECK(back.frequency_hz == s.frequency_hz);
    CHECK(back.values == s.values);
    CHECK(back.kind == SpectrumKind::PdhReadout);
    CHECK(back.note == "seed=1");
  }

  TEST_CASE("trace binary round trip and layout") {
    TimeTrace t;
    t.dt = 7.1e-8;
    t.seed = 0x0102030405060708ULL;
    t.samples = {1e-12, -2e-12, 3.5e-13};
    const auto bytes = encode_trace(t);
    REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 8 + 3 * 8);
    CHECK(bytes[0] == 'O');
    CHECK(bytes[4] == 1);
    CHECK(bytes[16] == 3);          // n, little endian
    CHECK(bytes[24] == 0x08);       // seed low byte first
    const auto back = decode_trace(bytes);
    CHECK(back.dt == t.dt);
    CHECK(back.seed == t.seed);
    CHECK(back.samples == t.samples);
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS_AS(decode_trace(cut), Error);

    const auto path = std::filesystem::temp_directory_path() / "optomech_trace_test.bin";
    write_trace_binary(path, t);
    CHECK(read_trace_binary(path).samples == t.samples);
    std::filesystem::remove(path);
  }

  TEST_CASE("CSV schemas") {
    TimeTrace t;
    t.dt = 0.5;
    t.samples = {1.0, 2.0};
    CHECK(trace_csv(t) == "time_s,x_m\n0,1\n0.5,2\n");
    LorentzianFit f;
    f.center_hz = 1.0;
    f.converged = true;
    CHECK(fit_csv({f}).rfind("center_hz,fwhm_hz,area,offset,err_center,err_fwhm,err_area,converged\n1,", 0) == 0);
    SweepRow r;
    r.delta_over_kappa = 0.5;
    r.stable = true;
    r.cooling_ratio = NAN;
    const auto sweep = sweep_csv({r});
    CHECK(sweep.rfind("delta_over_kappa,power_w,gamma_eff_hz_fwhm,f_eff_hz,t_eff_k,cooling_ratio,stable\n", 0) == 0);
    CHECK(sweep.find("nan") != std::string::npos);
    ScanDataset scan{{1e-6, 2e-6, 0.5}, {3e-6, 4e-6, 0.25}};
    const auto back = parse_scan_csv(scan_csv(scan));
    REQUIRE(back.size() == 2);
    CHECK(back[1].mean_square_disp == 0.25);
    CHECK_THROWS_AS(parse_scan_csv("x,y\n1,2\n"), Error);
  }

  TEST_CASE("writing into a missing directory is an IO error") {
    try {
      write_text_file("/nonexistent/dir/file.csv", "x");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).find("/nonexistent/dir/file.csv") != std::string::npos);
    }
  }
}

TEST_SUITE("svg") {
  TEST_CASE("plots are deterministic and skip non-finite points") {
    svg::Panel p{"t", "x", "y", {{"a", {0, 1, 2, 3}, {1, NAN, 2, 3}}}, false};
    const auto a = svg::line_plot({p});
    CHECK(a == svg::line_plot({p}));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("nan") == std::string::npos);
    const auto h = svg::heat_map("h", 2, 2, {0.0, 1.0, 2.0, 3.0});
    CHECK(h.find("#ffffff") != std::string::npos);
    CHECK_THROWS_AS(svg::heat_map("h", 2, 2, {1.0}), Error);
  }
}
