#pragma once

// Experiment configuration files.
//
// INI-style key/value text with the sections [filter], [innovations], [model],
// [experiment], [brownian] and [thresholds]. Lines starting with ';' or '#'
// are comments. Lists are comma separated. Unknown sections and keys are
// errors. Every problem found is reported, not only the first.

#include <cstddef>
#include <string>
#include <string_view>

#include "urlab/brownian.hpp"
#include "urlab/monte_carlo.hpp"

namespace urlab {

struct BrownianSettings {
  std::size_t grid = 4096;
  std::size_t reps = 200000;
  bool refine = false;
  std::size_t batches = 100;

  friend bool operator==(const BrownianSettings&, const BrownianSettings&) = default;
};

/// Pass/fail rules. A comparison passes when |estimate - target| <=
/// max(floor, se_multiplier * se).
struct Thresholds {
  double se_multiplier = 4.0;
  double fpe_floor = 0.1;
  double mse_floor = 0.7;
  double cross_floor = 0.7;
  double stationary_floor = 0.05;
  double slope_rel_tol = 0.15;
  double k1_tol = 0.5;
  double k2_tol = 0.2;
  double k1_max_se = 0.15;
  double k2_max_se = 0.05;
  double ks_max = 0.03;
  std::size_t ks_limit_grid = 4096;
  double k1 = kCanonicalK1;
  double k2 = kCanonicalK2;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct LabConfig {
  ExperimentConfig experiment;
  BrownianSettings brownian;
  Thresholds thresholds;

  friend bool operator==(const LabConfig&, const LabConfig&) = default;
};

/// Throws ConfigError listing every problem.
LabConfig parse_config(std::string_view text);
LabConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const LabConfig& config);

ConstantsConfig constants_config(const LabConfig& config);

}  // namespace urlab
