#include "optomech/commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "optomech/acceptance.hpp"
#include "optomech/backaction.hpp"
#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/io.hpp"
#include "optomech/modes.hpp"
#include "optomech/pipeline.hpp"
#include "optomech/svg.hpp"

namespace optomech {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Collects outputs and writes the manifest when the command finishes.
class Run {
 public:
  Run(std::string command, const CommonRequest& req)
      : command_(std::move(command)), req_(req), start_(std::chrono::steady_clock::now()) {
    cfg_ = req.config_path.empty() ? ExperimentConfig{} : load_config(req.config_path);
    if (!req.powers_w.empty()) cfg_.powers_w = req.powers_w;
    if (req.seed) cfg_.seed = *req.seed;
    cfg_.validate();
    std::error_code ec;
    fs::create_directories(req.out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + req.out_dir.string() + ": " + ec.message());
  }

  ExperimentConfig& config() { return cfg_; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = req_.out_dir / name;
    write_text_file(p, content);
    result_.outputs.push_back(p);
  }

  void write_trace(const std::string& name, const TimeTrace& trace) {
    const fs::path p = req_.out_dir / name;
    write_trace_binary(p, trace);
    result_.outputs.push_back(p);
  }

  CommandResult finish(int exit_code = 0) {
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["tool_version"] = kToolVersion;
    m["config_path"] = req_.config_path;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& [k, v] : cfg_.entries) entries.push_back({k, v});
    m["config"] = entries;
    m["powers_w"] = cfg_.powers_w;
    m["master_seed"] = cfg_.seed;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& p : result_.outputs) files.push_back(p.filename().string());
    m["outputs"] = files;
    m["exit_code"] = exit_code;
    m["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path p = req_.out_dir / "manifest.json";
    write_text_file(p, m.dump(2) + "\n");
    result_.outputs.push_back(p);
    result_.exit_code = exit_code;
    return result_;
  }

  bool svg() const { return req_.svg; }

 private:
  std::string command_;
  const CommonRequest& req_;
  ExperimentConfig cfg_;
  CommandResult result_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

CommandResult cmd_sweep(const SweepRequest& req, std::ostream& log) {
  Run run("sweep", req);
  const auto& cfg = run.config();
  const double lo = req.delta_min.value_or(cfg.sweep_delta_min);
  const double hi = req.delta_max.value_or(cfg.sweep_delta_max);
  const int n = req.points.value_or(cfg.sweep_points);
  const auto mode = cfg.mechanical_mode();
  const auto pt = cfg.photothermal();

  std::vector<SweepRow> rows;
  std::vector<svg::Series> width;
  std::vector<svg::Series> cooling;
  std::size_t failures = 0;
  for (double p : cfg.powers_w) {
    const auto cav = cfg.cavity_params(p);
    const auto part = sweep_detuning(detuning_grid(lo, hi, n, cav), cav, mode, pt);
    svg::Series w{fmt(p * 1e3, 3) + " mW", {}, {}};
    svg::Series c = w;
    for (const auto& r : part) {
      if (r.error) ++failures;
      w.x.push_back(r.delta_over_kappa);
      w.y.push_back(r.gamma_eff_hz_fwhm);
      c.x.push_back(r.delta_over_kappa);
      c.y.push_back(r.stable ? r.cooling_ratio : NAN);
    }
    width.push_back(std::move(w));
    cooling.push_back(std::move(c));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  run.write("sweep.csv", sweep_csv(rows));
  if (run.svg()) {
    run.write("sweep.svg",
              svg::line_plot({{"PSD width vs detuning", "detuning / kappa", "FWHM (Hz)", width},
                              {"cooling ratio vs detuning", "detuning / kappa",
                               "T_bath / T_eff", cooling, true}}));
  }
  log << "sweep: " << rows.size() << " points, " << failures << " failed\n";
  return run.finish();
}

CommandResult cmd_simulate(const SimulateRequest& req, std::ostream& log) {
  Run run("simulate", req);
  const auto& cfg = run.config();
  const auto cav = cfg.cavity_params();
  const auto mode = cfg.mechanical_mode();
  const auto pt = cfg.photothermal();
  const double delta = req.delta_over_kappa.value_or(cfg.sim_delta_over_kappa) * cav.kappa();
  const int runs = req.runs.value_or(cfg.sim_runs);
  require(runs >= 1, ErrorCode::InvalidArgument, "runs must be >= 1");
  const double duration = req.duration_s.value_or(cfg.sim_duration_s);
  require(duration >= 0.0, ErrorCode::InvalidArgument, "duration must be >= 0");

  CampaignPlan plan = plan_campaign(cav, mode, pt, delta, duration, cfg.sim_record_every);
  if (cfg.sim_dt_s > 0.0) plan.sim.dt_s = cfg.sim_dt_s;
  log << "simulate: " << runs << " runs of " << plan.sim.duration_s << " s at dt "
      << plan.sim.dt_s << " s\n";

  const int keep = std::min(cfg.sim_keep_traces, runs);
  for (int i = 0; i < keep; ++i) {
    const auto seed = run_seed(cfg.seed, static_cast<std::size_t>(i));
    char name[32];
    std::snprintf(name, sizeof name, "trace_%03d.bin", i);
    run.write_trace(name, simulate(plan.sim, cav, mode, pt, delta, seed));
  }

  const auto res = run_campaign(static_cast<std::size_t>(runs), plan, cav, mode, pt, delta, cfg.seed);
  run.write("psd.csv", spectrum_csv(res.psd.mean));
  run.write("fit.csv", fit_csv({res.fit}));

  const auto& p = plan.predicted;
  std::ostringstream s;
  s << "quantity,predicted,fitted\n"
    << "center_hz," << format_number(psd_peak_hz(p)) << ',' << format_number(res.fit.center_hz) << '\n'
    << "fwhm_hz," << format_number(psd_fwhm_hz(p)) << ',' << format_number(res.fit.fwhm_hz) << '\n'
    << "variance_m2," << format_number(displacement_variance(mode, p)) << ','
    << format_number(res.fit.area) << '\n'
    << "t_eff_k," << format_number(mode.bath_temperature() / p.cooling_ratio_pred) << ','
    << format_number(res.t_eff_fit) << '\n'
    << "runs_ok,," << res.psd.runs_ok << '\n';
  run.write("summary.csv", s.str());

  if (run.svg()) {
    const Spectrum band =
        crop(res.psd.mean, res.fit.center_hz - 20 * res.fit.fwhm_hz, res.fit.center_hz + 20 * res.fit.fwhm_hz);
    svg::Series data{"ensemble PSD", band.frequency_hz, band.values};
    svg::Series model{"Lorentzian fit", band.frequency_hz, {}};
    for (double f : band.frequency_hz) {
      model.y.push_back(lorentzian_psd(f, res.fit.center_hz, res.fit.fwhm_hz, res.fit.area, res.fit.offset));
    }
    run.write("psd.svg", svg::line_plot({{"displacement PSD", "frequency (Hz)", "PSD (m^2/Hz)",
                                          {data, model}, true}}));
  }
  log << "fit: center " << fmt(res.fit.center_hz) << " Hz, fwhm " << fmt(res.fit.fwhm_hz)
      << " Hz, T_eff " << fmt(res.t_eff_fit, 4) << " K\n";
  const int failed = static_cast<int>(res.psd.failures.size());
  if (failed > 0) log << failed << " runs failed and were dropped\n";
  return run.finish();
}

CommandResult cmd_modes(const ModesRequest& req, std::ostream& log) {
  Run run("modes " + req.what, req);
  const auto& cfg = run.config();
  const auto beam = cfg.beam_model();

  if (req.what == "shape") {
    const int nx = 98;
    const int ny = 22;
    std::ostringstream csv;
    csv << "x_m,y_m,u\n";
    std::vector<double> u2;
    for (int j = 0; j < ny; ++j) {
      const double y = beam.width_m * (j + 0.5) / ny;
      for (int i = 0; i < nx; ++i) {
        const double x = beam.length_m * (i + 0.5) / nx;
        const double u = mode_shape(beam, x, y);
        csv << format_number(x) << ',' << format_number(y) << ',' << format_number(u) << '\n';
        u2.push_back(u * u);
      }
    }
    run.write("mode_shape.csv", csv.str());
    std::ostringstream ratios;
    ratios << "mode_index,frequency_ratio\n";
    for (int n = 1; n <= 3; ++n) {
      ratios << n << ',' << format_number(frequency_ratio(beam.family, n)) << '\n';
    }
    run.write("frequency_ratios.csv", ratios.str());
    if (run.svg()) run.write("mode_shape.svg", svg::heat_map("mean-square displacement u^2", nx, ny, u2));
    log << "mode shape n=" << beam.mode_index << " written\n";
  } else if (req.what == "tomography") {
    const auto grid = ScanGrid::covering(beam, req.grid_nx, req.grid_ny);
    const auto data = synthesize_tomography(beam, grid, req.noise, cfg.seed);
    run.write("tomography.csv", scan_csv(data));
    const auto fit = fit_mode(data, beam);
    std::ostringstream s;
    s << "quantity,value\n"
      << "mode_index," << fit.model.mode_index << '\n'
      << "transverse," << (fit.model.transverse == TransverseModel::Uniform ? "uniform" : "one_side_clamped") << '\n'
      << "dead_fraction," << format_number(fit.model.dead_fraction) << '\n'
      << "amplitude," << format_number(fit.amplitude) << '\n'
      << "residual_norm," << format_number(fit.residual_norm) << '\n'
      << "runner_up_residual," << format_number(fit.runner_up_residual) << '\n';
    run.write("tomography_fit.csv", s.str());
    if (run.svg()) {
      std::vector<double> v;
      for (const auto& p : data) v.push_back(p.mean_square_disp);
      run.write("tomography.svg", svg::heat_map("synthetic tomography", req.grid_nx, req.grid_ny, v));
    }
    log << "tomography fit: n=" << fit.model.mode_index << " dead_fraction "
        << fmt(fit.model.dead_fraction, 3) << '\n';
  } else if (req.what == "mass") {
    const auto probe = cfg.probe();
    const auto m = effective_mass(beam, probe);
    const double point = point_probe_mass(beam, {probe.x0, probe.y0});
    std::ostringstream s;
    s << "quantity,value\n"
      << "effective_mass_kg," << format_number(m.mass_kg) << '\n'
      << "quadrature_error_kg," << format_number(m.error_bound_kg) << '\n'
      << "point_probe_mass_kg," << format_number(point) << '\n'
      << "total_mass_kg," << format_number(beam.total_mass()) << '\n'
      << "mass_ratio," << format_number(m.mass_kg / beam.total_mass()) << '\n'
      << "probe_x_m," << format_number(probe.x0) << '\n'
      << "probe_y_m," << format_number(probe.y0) << '\n';
    run.write("mass.csv", s.str());
    log << "effective mass " << fmt(m.mass_kg * 1e12, 5) << " ng (+- "
        << fmt(m.error_bound_kg * 1e12, 2) << " ng), total " << fmt(beam.total_mass() * 1e12, 5)
        << " ng\n";
  } else if (req.what == "tau") {
    const auto stack = cfg.layer_stack();
    const double tau = photothermal_tau(stack, cfg.zeta);
    std::ostringstream s;
    s << "quantity,value\n"
      << "zeta," << format_number(cfg.zeta) << '\n'
      << "tau_s," << format_number(tau) << '\n'
      << "tau_zeta1_s," << format_number(photothermal_tau(stack, 1.0)) << '\n'
      << "zeta_for_4ns," << format_number(zeta_for_tau(stack, 4e-9)) << '\n';
    for (const auto& l : stack.layers()) {
      s << "diffusion_length_" << l.material << "_m,"
        << format_number(heat_diffusion_length(l.diffusivity_m2_s, tau, cfg.zeta)) << '\n';
    }
    run.write("tau.csv", s.str());
    log << "tau " << fmt(tau * 1e9, 4) << " ns at zeta " << cfg.zeta << "; zeta for 4 ns "
        << fmt(zeta_for_tau(stack, 4e-9), 4) << '\n';
  } else {
    fail(ErrorCode::InvalidArgument, "modes command must be shape, tomography, mass or tau");
  }
  return run.finish();
}

CommandResult cmd_report(const ReportRequest& req, std::ostream& log) {
  Run run("report", req);
  const auto& cfg = run.config();
  const auto cav = cfg.cavity_params();

  AcceptanceOptions opts;
  opts.seed = cfg.seed;
  opts.only = req.only;
  opts.on_result = [&](const CriterionResult& r) { log << result_line(r) << std::endl; };
  const auto results = run_acceptance(opts);

  std::ostringstream txt;
  txt << "configuration\n"
      << "  kappa = " << fmt(cav.kappa(), 4) << " rad/s, 1/(2 kappa) = "
      << fmt(1e9 / (2.0 * cav.kappa()), 3) << " ns\n"
      << "  natural width = " << fmt(cfg.mechanical_mode().natural_fwhm_hz(), 4) << " Hz\n\n"
      << "acceptance\n";
  std::ostringstream csv;
  csv << "id,passed,title,measured,expected,seconds\n";
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    txt << "  " << result_line(r) << '\n';
    if (!r.detail.empty()) txt << "        " << r.detail << '\n';
    auto quote = [](const std::string& s) {
      std::string q = "\"";
      for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    csv << r.id << ',' << (r.passed ? 1 : 0) << ',' << quote(r.title) << ',' << quote(r.measured)
        << ',' << quote(r.expected) << ',' << fmt(r.seconds, 3) << '\n';
  }
  txt << '\n' << (all ? "all checks passed" : "some checks failed") << '\n';
  run.write("report.txt", txt.str());
  run.write("report.csv", csv.str());
  return run.finish(all ? 0 : 2);
}

}  // namespace optomech
