#include "urlab/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urlab/errors.hpp"
#include "urlab/parallel.hpp"

namespace urlab {

namespace {

constexpr int kMaxResamples = 8;
constexpr double kMaxFailureRate = 1e-3;
constexpr std::size_t kMinSummaryReps = 30;

template <class T>
void append(std::vector<std::string>& dst, const std::vector<T>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

std::string_view statistic_name(Statistic s) noexcept {
  switch (s) {
    case Statistic::excess_ape:
      return "excess_ape";
    case Statistic::fpe_stat:
      return "fpe_stat";
    case Statistic::norm_est_sq:
      return "norm_est_sq";
    case Statistic::x_n_sq_over_n:
      return "x_n_sq_over_n";
    case Statistic::cross_moment:
      return "cross_moment";
    case Statistic::log_fisher:
      return "log_fisher";
  }
  return "unknown";
}

Statistic parse_statistic(std::string_view name) {
  for (Statistic s : all_statistics()) {
    if (statistic_name(s) == name) return s;
  }
  throw ConfigError("unknown statistic '" + std::string(name) + "'");
}

std::vector<Statistic> all_statistics() {
  return {Statistic::excess_ape, Statistic::fpe_stat,     Statistic::norm_est_sq,
          Statistic::x_n_sq_over_n, Statistic::cross_moment, Statistic::log_fisher};
}

std::vector<std::string> validation_errors(const ExperimentConfig& config) {
  std::vector<std::string> out;
  append(out, validation_errors(config.model.filter));
  append(out, validation_errors(config.model.innovations));
  if (!std::isfinite(config.model.beta)) out.emplace_back("beta must be finite");
  if (config.model.varsigma && !(std::fabs(*config.model.varsigma) < 1.0)) {
    out.emplace_back("stationary coefficient needs |varsigma| < 1 (varsigma = 1 is the unit root)");
  }
  if (config.reps < 2) out.emplace_back("reps >= 2 violated");
  if (config.n_grid.empty()) out.emplace_back("n_grid must not be empty");
  for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
    if (config.n_grid[k] < 3) {
      out.emplace_back("every n in n_grid must be >= 3");
      break;
    }
    if (k > 0 && config.n_grid[k] <= config.n_grid[k - 1]) {
      out.emplace_back("n_grid must be strictly increasing");
      break;
    }
  }
  if (config.statistics.empty()) out.emplace_back("at least one statistic must be requested");
  return out;
}

void validate(const ExperimentConfig& config) {
  auto problems = validation_errors(config);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::vector<double> SimulationResult::column(std::size_t grid_index, double (PathStats::*field)() const) const {
  const auto& rows = stats.at(grid_index);
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = (rows[r].*field)();
  return out;
}

std::vector<double> SimulationResult::column(std::size_t grid_index, double PathStats::*field) const {
  const auto& rows = stats.at(grid_index);
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r].*field;
  return out;
}

SimulationResult simulate(const ExperimentConfig& config, RegressorMode mode) {
  validate(config);
  PathOptions options;
  if (mode == RegressorMode::stationary) {
    if (!config.model.varsigma) throw ConfigError("stationary mode needs a stationary coefficient varsigma");
    options.varsigma = *config.model.varsigma;
    options.burn_in = stationary_burn_in(options.varsigma);
  }

  const MaterializedFilter filter = materialize_filter(config.model.filter);
  const InnovationSampler sampler(config.model.innovations);
  const std::size_t n_max = config.n_grid.back();
  const std::size_t G = config.n_grid.size();

  SimulationResult sim;
  sim.n_grid = config.n_grid;
  sim.reps = config.reps;
  sim.base_seed = config.base_seed;
  sim.stats.assign(G, std::vector<PathStats>(config.reps));
  std::vector<unsigned char> attempts(config.reps, 0);

  parallel_for(config.reps, config.workers, [&](std::size_t r) {
    thread_local Trajectory workspace;
    for (int attempt = 0;; ++attempt) {
      const std::uint32_t role = attempt == 0 ? static_cast<std::uint32_t>(StreamRole::innovations)
                                              : static_cast<std::uint32_t>(StreamRole::resample_base) +
                                                    static_cast<std::uint32_t>(attempt - 1);
      Stream stream(config.base_seed, r, role);
      generate_path(filter, sampler, config.model.beta, n_max, stream, workspace, options);
      try {
        const auto rows = run_path_checkpoints(workspace, config.n_grid);
        for (std::size_t k = 0; k < G; ++k) sim.stats[k][r] = rows[k];
        attempts[r] = static_cast<unsigned char>(attempt);
        return;
      } catch (const DegeneratePath&) {
        if (attempt + 1 >= kMaxResamples) throw;
      }
    }
  });

  for (unsigned char a : attempts) sim.resampled += a > 0 ? 1 : 0;
  if (static_cast<double>(sim.resampled) > kMaxFailureRate * static_cast<double>(config.reps)) {
    throw std::runtime_error("degenerate-path rate above 0.1%: " + std::to_string(sim.resampled) + " of " +
                             std::to_string(config.reps));
  }
  return sim;
}

ModelTargets model_targets(const ModelSpec& model, double k1, double k2) {
  const MaterializedFilter filter = materialize_filter(model.filter);
  const LimitParams p = make_limit_params(model.innovations, filter);
  ModelTargets t;
  const double s2 = model.innovations.sigma_sq;
  t.fpe = 2.0 * s2;
  t.ape_slope = 2.0 * s2;
  t.mse = mse_limit_formula(p, k1, k2);
  t.lambda_sq = p.lambda * p.lambda;
  t.cross_product = k1 * p.rho * p.rho * p.sigma_omega * p.sigma_omega + k2 * p.sigma_theta * p.sigma_theta;
  t.stationary = s2;
  return t;
}

std::vector<McSummary> summarize(const SimulationResult& sim, const ExperimentConfig& config) {
  if (sim.reps < kMinSummaryReps) throw ConfigError("summaries need reps >= 30");
  const ModelTargets targets = model_targets(config.model);
  std::vector<McSummary> out;
  for (std::size_t k = 0; k < sim.n_grid.size(); ++k) {
    const std::size_t n = sim.n_grid[k];
    const double log_n = std::log(static_cast<double>(n));
    for (Statistic s : config.statistics) {
      McSummary row;
      row.statistic = std::string(statistic_name(s));
      row.n = n;
      row.reps = sim.reps;
      row.seed = sim.base_seed;
      MeanEstimate e;
      switch (s) {
        case Statistic::excess_ape:
          e = mean_estimate(sim.column(k, &PathStats::excess_ape));
          row.target = targets.ape_slope * log_n;
          break;
        case Statistic::fpe_stat:
          e = mean_estimate(sim.column(k, &PathStats::fpe_stat));
          row.target = targets.fpe;
          break;
        case Statistic::norm_est_sq:
          e = mean_estimate(sim.column(k, &PathStats::norm_est_sq));
          row.target = targets.mse;
          break;
        case Statistic::x_n_sq_over_n:
          e = mean_estimate(sim.column(k, &PathStats::x_n_sq_over_n));
          row.target = targets.lambda_sq;
          break;
        case Statistic::cross_moment: {
          const auto c = product_contrast(sim.column(k, &PathStats::x_n_sq_over_n),
                                          sim.column(k, &PathStats::norm_est_sq));
          e = {c.product, c.product_se, sim.reps};
          row.target = targets.cross_product;
          break;
        }
        case Statistic::log_fisher:
          e = mean_estimate(sim.column(k, &PathStats::log_fisher_difference));
          row.target = log_n;
          break;
      }
      row.mean = e.mean;
      row.mc_se = e.se;
      row.ratio = row.target != 0.0 ? row.mean / row.target : 0.0;
      out.push_back(row);
    }
  }
  return out;
}

std::vector<McSummary> run(const ExperimentConfig& config) { return summarize(simulate(config), config); }

double ape_slope(std::span<const McSummary> summaries) {
  std::vector<double> log_n;
  std::vector<double> means;
  for (const auto& s : summaries) {
    if (s.statistic != statistic_name(Statistic::excess_ape)) continue;
    log_n.push_back(std::log(static_cast<double>(s.n)));
    means.push_back(s.mean);
  }
  if (log_n.size() < 3) throw std::invalid_argument("ape_slope needs at least 3 grid points with excess_ape");
  return ols_slope(log_n, means);
}

SlopeEstimate ape_slope(const SimulationResult& sim) {
  const std::size_t G = sim.n_grid.size();
  if (G < 3) throw std::invalid_argument("ape_slope needs at least 3 grid points");
  std::vector<double> log_n(G);
  for (std::size_t k = 0; k < G; ++k) log_n[k] = std::log(static_cast<double>(sim.n_grid[k]));

  SlopeEstimate out;
  out.n_grid = sim.n_grid;
  for (std::size_t k = 0; k < G; ++k) out.mean_excess.push_back(mean_estimate(sim.column(k, &PathStats::excess_ape)).mean);

  std::vector<double> per_rep(sim.reps);
  std::vector<double> row(G);
  for (std::size_t r = 0; r < sim.reps; ++r) {
    for (std::size_t k = 0; k < G; ++k) row[k] = sim.stats[k][r].excess_ape;
    per_rep[r] = ols_slope(log_n, row);
  }
  const MeanEstimate e = mean_estimate(per_rep);
  out.slope = ols_slope(log_n, out.mean_excess);
  out.se = e.se;
  return out;
}

CrossMomentResult cross_moment(const SimulationResult& sim) {
  const std::size_t k = sim.n_grid.size() - 1;
  const auto a = sim.column(k, &PathStats::x_n_sq_over_n);
  const auto b = sim.column(k, &PathStats::norm_est_sq);
  const auto c = product_contrast(a, b);
  CrossMomentResult out;
  out.n = sim.n_grid[k];
  out.joint = c.joint;
  out.marginal_x = c.marg_a;
  out.marginal_est = c.marg_b;
  out.product = c.product;
  out.product_se = c.product_se;
  out.correlation = sample_correlation(a, b);
  return out;
}

CrossMomentResult cross_moment(const ExperimentConfig& config) { return cross_moment(simulate(config)); }

StationaryResult stationary_comparison(const ExperimentConfig& config) {
  if (!config.model.varsigma) throw ConfigError("stationary comparison needs a stationary coefficient varsigma");
  const SimulationResult sim = simulate(config, RegressorMode::stationary);
  const std::size_t k = sim.n_grid.size() - 1;
  const std::size_t n = sim.n_grid[k];
  const auto& rows = sim.stats[k];
  std::vector<double> x_sq(rows.size());
  std::vector<double> scaled_err_sq(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x_sq[r] = rows[r].x_n * rows[r].x_n;
    scaled_err_sq[r] = static_cast<double>(n) * rows[r].est_error * rows[r].est_error;
  }
  const auto c = product_contrast(x_sq, scaled_err_sq);
  StationaryResult out;
  out.n = n;
  out.varsigma = *config.model.varsigma;
  out.joint = c.joint;
  out.product = c.product;
  out.product_se = c.product_se;
  out.difference = c.difference;
  out.difference_se = c.difference_se;
  return out;
}

double limit_distribution_check(std::span<const double> finite_n, std::span<const double> limit) {
  if (finite_n.size() < 1000 || limit.size() < 1000) {
    throw std::invalid_argument("limit_distribution_check needs at least 1000 samples on each side");
  }
  return ks_distance(std::vector<double>(finite_n.begin(), finite_n.end()),
                     std::vector<double>(limit.begin(), limit.end()));
}

}  // namespace urlab
