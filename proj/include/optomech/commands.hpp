#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace optomech {

inline constexpr const char* kToolVersion = "0.1.0";

struct CommandResult {
  std::vector<std::filesystem::path> outputs;  // manifest last
  int exit_code = 0;
};

// Fields left unset fall back to the config file (or its defaults when no file is given).
struct CommonRequest {
  std::string config_path;  // empty: built-in defaults
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<double> powers_w;
  bool svg = true;
};

struct SweepRequest : CommonRequest {
  std::optional<double> delta_min;  // units of kappa
  std::optional<double> delta_max;
  std::optional<int> points;
};

struct SimulateRequest : CommonRequest {
  std::optional<double> delta_over_kappa;
  std::optional<double> duration_s;
  std::optional<int> runs;
};

struct ModesRequest : CommonRequest {
  std::string what = "mass";  // shape | tomography | mass | tau
  double noise = 0.1;
  int grid_nx = 15;
  int grid_ny = 10;
};

struct ReportRequest : CommonRequest {
  std::vector<int> only;  // acceptance criteria subset, empty: all
};

// Each command writes its files into out_dir and a manifest.json last.
CommandResult cmd_sweep(const SweepRequest& req, std::ostream& log);
CommandResult cmd_simulate(const SimulateRequest& req, std::ostream& log);
CommandResult cmd_modes(const ModesRequest& req, std::ostream& log);
CommandResult cmd_report(const ReportRequest& req, std::ostream& log);

}  // namespace optomech
