#include <CLI11.hpp>

#include <iostream>

#include "optomech/commands.hpp"
#include "optomech/errors.hpp"

namespace {

void add_common(CLI::App* cmd, optomech::CommonRequest& req) {
  cmd->add_option("--config", req.config_path, "experiment config file");
  cmd->add_option("--out", req.out_dir, "output directory");
  cmd->add_option("--seed", req.seed, "master seed");
  cmd->add_option("--power-w", req.powers_w, "input power in W (repeatable)");
  cmd->add_flag("--svg,!--no-svg", req.svg, "write SVG figures");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optomechanical self-cooling models, simulations and reports."};
  app.require_subcommand(1);

  optomech::SweepRequest sweep;
  auto* c_sweep = app.add_subcommand("sweep", "damping, spring and cooling versus detuning");
  add_common(c_sweep, sweep);
  c_sweep->add_option("--delta-min", sweep.delta_min, "lowest detuning in units of kappa");
  c_sweep->add_option("--delta-max", sweep.delta_max, "highest detuning in units of kappa");
  c_sweep->add_option("--points", sweep.points, "number of detunings");

  optomech::SimulateRequest sim;
  auto* c_sim = app.add_subcommand("simulate", "Langevin ensemble, averaged PSD and fit");
  add_common(c_sim, sim);
  c_sim->add_option("--delta", sim.delta_over_kappa, "detuning in units of kappa");
  c_sim->add_option("--duration-s", sim.duration_s, "trace duration in seconds");
  c_sim->add_option("--runs", sim.runs, "number of runs");

  optomech::ModesRequest modes;
  auto* c_modes = app.add_subcommand("modes", "mode shape, tomography, effective mass, tau");
  add_common(c_modes, modes);
  c_modes->add_option("what", modes.what, "shape | tomography | mass | tau")
      ->required()
      ->check(CLI::IsMember({"shape", "tomography", "mass", "tau"}));
  c_modes->add_option("--noise", modes.noise, "relative noise of the synthetic tomography");
  c_modes->add_option("--nx", modes.grid_nx, "tomography points along the length");
  c_modes->add_option("--ny", modes.grid_ny, "tomography points across the width");

  optomech::ReportRequest report;
  auto* c_report = app.add_subcommand("report", "acceptance table for a configuration");
  add_common(c_report, report);
  c_report->add_option("--only", report.only, "criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage problems count as validation errors
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    optomech::CommandResult res;
    if (c_sweep->parsed()) res = optomech::cmd_sweep(sweep, std::cout);
    if (c_sim->parsed()) res = optomech::cmd_simulate(sim, std::cout);
    if (c_modes->parsed()) res = optomech::cmd_modes(modes, std::cout);
    if (c_report->parsed()) res = optomech::cmd_report(report, std::cout);
    for (const auto& p : res.outputs) std::cout << "wrote " << p.string() << '\n';
    return res.exit_code;
  } catch (const optomech::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return optomech::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
