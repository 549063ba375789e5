#pragma once

// Replicated finite-n experiments.
//
// Each replication draws one path of length max(n_grid) from its own stream
// (base_seed, replication, innovations) and reports statistics at every n in
// the grid from nested prefixes. Marginally each n still sees independent
// replications; sharing the prefix makes quantities that are differenced
// across n (the APE slope) free of the heavy-tailed first prediction terms.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urlab/brownian.hpp"
#include "urlab/innovations.hpp"
#include "urlab/linear_process.hpp"
#include "urlab/rls.hpp"
#include "urlab/stats.hpp"

namespace urlab {

struct ModelSpec {
  FilterSpec filter;
  InnovationSpec innovations;
  double beta = 1.0;
  /// Autoregressive coefficient for the stationary contrast; |varsigma| < 1.
  std::optional<double> varsigma;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

enum class Statistic { excess_ape, fpe_stat, norm_est_sq, x_n_sq_over_n, cross_moment, log_fisher };

std::string_view statistic_name(Statistic s) noexcept;
Statistic parse_statistic(std::string_view name);
std::vector<Statistic> all_statistics();

enum class RegressorMode { unit_root, stationary };

struct ExperimentConfig {
  ModelSpec model;
  std::vector<std::size_t> n_grid{2000};
  std::size_t reps = 20000;
  std::uint64_t base_seed = 20240501;
  std::vector<Statistic> statistics = all_statistics();
  std::string output = "results";
  unsigned workers = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::vector<std::string> validation_errors(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

struct SimulationResult {
  std::vector<std::size_t> n_grid;
  /// stats[k][r]: replication r at n_grid[k].
  std::vector<std::vector<PathStats>> stats;
  std::size_t reps = 0;
  std::uint64_t base_seed = 0;
  std::size_t resampled = 0;  ///< degenerate draws replaced by a tagged sub-stream

  std::vector<double> column(std::size_t grid_index, double (PathStats::*field)() const) const;
  std::vector<double> column(std::size_t grid_index, double PathStats::*field) const;
};

/// Throws std::runtime_error when more than 0.1% of replications needed a resample.
SimulationResult simulate(const ExperimentConfig& config, RegressorMode mode = RegressorMode::unit_root);

struct McSummary {
  std::string statistic;
  std::size_t n = 0;
  double mean = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double target = 0.0;  ///< large-n value the statistic is compared against
  double ratio = 0.0;   ///< mean / target
};

/// One row per (requested statistic, n). Requires reps >= 30.
std::vector<McSummary> summarize(const SimulationResult& sim, const ExperimentConfig& config);
std::vector<McSummary> run(const ExperimentConfig& config);

/// OLS slope of mean excess APE against log n; needs >= 3 distinct n.
double ape_slope(std::span<const McSummary> summaries);

struct SlopeEstimate {
  double slope = 0.0;
  double se = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<double> mean_excess;
};
/// Same slope, with an SE from the per-replication slopes (nested prefixes
/// make the slope of means the mean of per-path slopes).
SlopeEstimate ape_slope(const SimulationResult& sim);

struct CrossMomentResult {
  std::size_t n = 0;
  MeanEstimate joint;        ///< E[(x_n^2/n) n^2 (betahat - beta)^2]
  MeanEstimate marginal_x;   ///< E[x_n^2/n]
  MeanEstimate marginal_est; ///< E[n^2 (betahat - beta)^2]
  double product = 0.0;
  double product_se = 0.0;
  CorrelationEstimate correlation;
};

/// At the largest n of sim.
CrossMomentResult cross_moment(const SimulationResult& sim);
CrossMomentResult cross_moment(const ExperimentConfig& config);

struct StationaryResult {
  std::size_t n = 0;
  double varsigma = 0.0;
  MeanEstimate joint;  ///< E[x_n^2 n (betahat - beta)^2]
  double product = 0.0;  ///< E[x_n^2] E[n (betahat - beta)^2]
  double product_se = 0.0;
  double difference = 0.0;
  double difference_se = 0.0;
};

/// Requires config.model.varsigma with |varsigma| < 1.
StationaryResult stationary_comparison(const ExperimentConfig& config);

/// Two-sample KS distance; both samples need at least 1000 values.
double limit_distribution_check(std::span<const double> finite_n, std::span<const double> limit);

/// Large-n targets implied by the model.
struct ModelTargets {
  double fpe = 0.0;          ///< 2 sigma^2
  double ape_slope = 0.0;    ///< 2 sigma^2
  double mse = 0.0;          ///< canonical-constant mean squared error limit
  double lambda_sq = 0.0;    ///< lim E[x_n^2/n]
  double cross_product = 0.0;  ///< 13.3 rho^2 sigma_omega^2 + 5.6 sigma_theta^2
  double stationary = 0.0;   ///< sigma^2
};
ModelTargets model_targets(const ModelSpec& model, double k1 = kCanonicalK1, double k2 = kCanonicalK2);

}  // namespace urlab
