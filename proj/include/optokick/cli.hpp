#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optokick/counting.hpp"
#include "optokick/params.hpp"
#include "optokick/signal.hpp"

namespace optokick::cli {

// exit codes shared by all commands
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation_failed = 1;
inline constexpr int exit_bad_config = 2;
inline constexpr int exit_unconverged = 3;

struct RunConfig {
  std::string config_path;
  params::ProtocolParams protocol;
  params::MaterialParams material;
  std::vector<std::string> derivations;  // notes on material-derived protocol fields

  std::vector<std::string> methods;  // sweep/visibility method selection
  int theta_points = 128;

  bool has_detector = false;
  counting::DetectorModel detector;
  double repetition_rate_hz = 0.0;
  std::uint64_t total_shots = 0;
  int theta_bins = 32;
  std::string curve_method = "exact";
  double target_z = 5.0;

  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

// parses the config file and resolves material-derived protocol fields;
// throws std::runtime_error with a user-facing message on any problem
RunConfig load_config(const std::string& path);

struct Overrides {
  std::optional<std::string> methods;  // comma-separated list; empty string = none
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> theta_points;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov);

int cmd_sweep(const RunConfig& cfg);
int cmd_visibility(const RunConfig& cfg, bool optimize_detuning);
int cmd_counts(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg);

}  // namespace optokick::cli
