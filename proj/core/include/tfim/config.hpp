#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfim/couplings.hpp"
#include "tfim/detection.hpp"
#include "tfim/hamiltonian.hpp"
#include "tfim/state.hpp"

namespace tfim {

enum class RunMode { spectrum_scan, quench, coherence_reversal, ramp_speed_sweep, fm_comparison };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view name);

struct CouplingSource {
  enum class Kind { physical, synthetic, file };
  Kind kind = Kind::synthetic;

  // physical
  TrapParameters trap = TrapParameters::from_mhz(10, 0.68, 4.1);
  DriveParameters drive{};
  std::optional<double> target_alpha;  // solve for the axial frequency instead
  double search_lo_mhz = 0.55;
  double search_hi_mhz = 0.95;

  // synthetic
  int n = 10;
  double j0_khz = 1.0;
  double alpha = 1.0;

  // file
  std::filesystem::path path;

  int n_spins() const;
};

struct RunConfig {
  RunMode mode = RunMode::quench;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "tfim-out";
  CouplingSource couplings;
  CouplingSign sign = CouplingSign::antiferromagnetic;

  // schedule; tau is given either in ms or as the product tau * J0
  double b_initial = 5.0;
  std::optional<double> tau_ms;
  std::optional<double> tau_j0;
  std::optional<double> total_duration_ms;
  int steps_per_tau = 64;
  Direction initial_state = Direction::plus_y;

  std::uint64_t shots = 4000;
  DetectionChannel detection = DetectionChannel::symmetric(0.93);

  // spectrum_scan
  int grid_points = 200;
  double b_min = 0.01;
  double b_max = 5.0;
  std::vector<double> alphas;  // synthetic alpha sweep; empty uses the source as is
  bool diagnose_adiabaticity = false;

  // ramp_speed_sweep
  std::vector<double> ramp_taus_ms;

  int max_spins = 20;
  bool allow_large = false;
  int workers = 0;
};

/// Every problem found in the config, empty when it is valid.
std::vector<std::string> config_problems(const RunConfig& config);

/// Parses JSON text; unknown keys and invalid values are reported together
/// in a single config error before anything runs.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// A list of configs: either a JSON array or an object with a "runs" array.
std::vector<RunConfig> parse_run_configs(std::string_view json_text);

/// Resolved config with every default filled in; stable key order.
std::string to_json(const RunConfig& config);

/// Couplings described by the source, characterized.
CouplingMatrix build_couplings(const CouplingSource& source);

}  // namespace tfim
