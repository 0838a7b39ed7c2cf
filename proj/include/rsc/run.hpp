#pragma once

// Batch pipelines behind the command-line tool: JSON configuration, the five
// commands, and the CSV / JSON artifacts they write.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rsc/prescription.hpp"

namespace rsc {

enum class Command { solve, classify, barriers, verify, sweep };

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitInvariant = 4;

struct PrescriptionSpec {
  std::string family = "power-deficit";  // constant | power-deficit | power-excess |
                                         // bertrand | directional | table
  double c = 0.3;
  double p = 2.0;
  double q = 2.0;
  double value = 1.0;
  double a = 0.2;
  std::filesystem::path table_path;
  bool flat_near_zero = false;
};

struct RunConfig {
  Command command = Command::solve;
  int n = 3;
  PrescriptionSpec prescription;
  double r_max = 40.0;
  double tol = 1e-10;
  double phi0 = 0.0;
  double eps0 = 0.0;  // <= 0: automatic
  double delta = 0.1;
  double r_probe = 5.0;
  double threshold = 1e-2;
  std::array<double, 2> box{-1.0, 1.0};
  std::vector<double> spacings{0.04, 0.02, 0.01};
  // Sweep axes in fixed order n, c, p, q, value; absent axes use the base config.
  std::map<std::string, std::vector<double>> sweep;
  std::string fault;  // "" or "perturb-s" (negative control)
};

// Throws Error(ConfigError) on malformed JSON, unknown keys or out-of-range
// values. A "command" key, if present, must match the requested command.
RunConfig parse_config(std::string_view json_text, Command command,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, Command command);

RadialPrescription make_radial(const PrescriptionSpec& spec, int n);
DirectionalPrescription make_directional(const PrescriptionSpec& spec, int n);

// %.17g
std::string format_double(double x);

// Column contracts of the emitted CSV files.
inline const std::vector<std::string> kSolutionColumns{
    "r", "s", "s_prime", "eps", "phi", "kappa_r", "kappa_t", "sigma2", "f2_residual"};
inline const std::vector<std::string> kPatchColumns{"spacing",           "max_residual",
                                                    "rms_residual",      "admissible_fraction",
                                                    "worst_sigma2_margin", "nodes"};
inline const std::vector<std::string> kSweepColumns{
    "n",          "family",          "c",          "p",     "q", "value", "classification",
    "phi_limit", "max_f2_residual", "tail_ratio", "error"};
inline const std::vector<std::string> kBarrierColumns{
    "r", "h_minus", "h_plus", "g_minus", "g_plus", "phi_minus", "phi_plus"};

// Worker count for sweeps: RADIAL_SIGMA2_THREADS if set to a positive
// integer, else the hardware concurrency.
std::size_t sweep_threads();

// Runs the pipeline, writes artifacts into out_dir and returns the exit status.
int run(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace rsc
