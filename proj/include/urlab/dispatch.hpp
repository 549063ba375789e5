#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "urlab/config.hpp"
#include "urlab/report.hpp"

namespace urlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAcceptanceFailure = 1;
inline constexpr int kExitConfigError = 2;

/// fpe, ape-curve, mse, constants, cross-moment, stationary, limit-check, all.
const std::vector<std::string>& subcommands();

struct RunOptions {
  std::string subcommand;
  std::string config_path;  ///< recorded in the manifest only
  std::optional<std::filesystem::path> output_dir;  ///< overrides [experiment] output
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool strict = false;
  bool dump_trajectory = false;  ///< write replication 0 at max n as trajectory.csv
};

struct DispatchResult {
  int exit_code = kExitPass;
  std::vector<Check> checks;
  Json manifest;
};

/// Applies the seed/worker overrides to a parsed config.
LabConfig apply_overrides(LabConfig config, const RunOptions& options);

/// Runs one subcommand, writes its artifacts and manifest.json, prints the
/// summary table to out. exit_code is kExitAcceptanceFailure only when strict
/// is set and a check failed. Throws ConfigError for unusable configs.
DispatchResult dispatch(const RunOptions& options, const LabConfig& config, std::ostream& out);

}  // namespace urlab
