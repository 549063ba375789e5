#include "urlab/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "urlab/errors.hpp"
#include "urlab/rng.hpp"

namespace urlab {

namespace {

std::string n_label(std::size_t n) { return "n=" + std::to_string(n); }

class Session {
 public:
  Session(const LabConfig& cfg, ArtifactSink& sink, std::vector<Check>& checks)
      : cfg_(cfg), sink_(sink), checks_(checks), targets_(model_targets(cfg.experiment.model, cfg.thresholds.k1,
                                                                         cfg.thresholds.k2)) {}

  void fpe() {
    const auto& sim = unit_root();
    write_summaries("fpe");
    const std::size_t k = sim.n_grid.size() - 1;
    const auto e = mean_estimate(sim.column(k, &PathStats::fpe_stat));
    checks_.push_back(within("fpe_stat " + n_label(sim.n_grid[k]), e.mean, e.se, targets_.fpe,
                             cfg_.thresholds.fpe_floor, cfg_.thresholds.se_multiplier));
  }

  void mse() {
    const auto& sim = unit_root();
    write_summaries("mse");
    const std::size_t k = sim.n_grid.size() - 1;
    const auto e = mean_estimate(sim.column(k, &PathStats::norm_est_sq));
    checks_.push_back(within("norm_est_sq " + n_label(sim.n_grid[k]), e.mean, e.se, targets_.mse,
                             cfg_.thresholds.mse_floor, cfg_.thresholds.se_multiplier));
  }

  void ape_curve() {
    const auto& sim = unit_root();
    if (sim.n_grid.size() < 3) throw ConfigError("ape-curve needs at least 3 entries in n_grid");
    const SlopeEstimate slope = ape_slope(sim);

    // Increments over the first grid point remove the heavy-tailed early terms
    // shared by every prefix of a path.
    const auto base = sim.column(0, &PathStats::excess_ape);
    std::ostringstream csv;
    csv << "n,log_n,mean_excess_ape,mc_se,mean_increment,increment_se\n";
    Json rows = Json::array();
    for (std::size_t k = 0; k < sim.n_grid.size(); ++k) {
      const auto col = sim.column(k, &PathStats::excess_ape);
      std::vector<double> inc(col.size());
      for (std::size_t r = 0; r < col.size(); ++r) inc[r] = col[r] - base[r];
      const auto e = mean_estimate(col);
      const MeanEstimate ie = k == 0 ? MeanEstimate{0.0, 0.0, col.size()} : mean_estimate(inc);
      const double log_n = std::log(static_cast<double>(sim.n_grid[k]));
      csv << sim.n_grid[k] << ',' << format_double(log_n) << ',' << format_double(e.mean) << ','
          << format_double(e.se) << ',' << format_double(ie.mean) << ',' << format_double(ie.se) << '\n';
      Json row;
      row["n"] = sim.n_grid[k];
      row["mean_excess_ape"] = e.mean;
      row["mc_se"] = e.se;
      row["mean_increment"] = ie.mean;
      row["increment_se"] = ie.se;
      rows.push_back(row);
    }
    sink_.write_text("ape_curve.csv", csv.str());
    Json doc;
    doc["slope"] = slope.slope;
    doc["slope_se"] = slope.se;
    doc["target"] = targets_.ape_slope;
    doc["reps"] = sim.reps;
    doc["seed"] = sim.base_seed;
    doc["points"] = rows;
    sink_.write_json("ape_curve.json", doc);

    const double tol = cfg_.thresholds.slope_rel_tol * targets_.ape_slope;
    checks_.push_back(predicate("ape_slope", slope.slope, slope.se, targets_.ape_slope, tol,
                                std::fabs(slope.slope - targets_.ape_slope) <= tol, "OLS slope vs log n"));
  }

  void cross() {
    const auto& sim = unit_root();
    const CrossMomentResult c = cross_moment(sim);
    Json doc;
    doc["n"] = c.n;
    doc["reps"] = sim.reps;
    doc["seed"] = sim.base_seed;
    doc["joint"] = {{"mean", c.joint.mean}, {"se", c.joint.se}, {"target", targets_.fpe}};
    doc["product"] = {{"mean", c.product}, {"se", c.product_se}, {"target", targets_.cross_product}};
    doc["marginal_x_sq_over_n"] = {{"mean", c.marginal_x.mean}, {"se", c.marginal_x.se}, {"target", targets_.lambda_sq}};
    doc["marginal_norm_est_sq"] = {{"mean", c.marginal_est.mean}, {"se", c.marginal_est.se}, {"target", targets_.mse}};
    doc["correlation"] = {{"value", c.correlation.corr}, {"se", c.correlation.se}};
    sink_.write_json("cross_moment.json", doc);

    const auto& t = cfg_.thresholds;
    checks_.push_back(within("cross joint " + n_label(c.n), c.joint.mean, c.joint.se, targets_.fpe, t.fpe_floor,
                             t.se_multiplier));
    checks_.push_back(within("cross product " + n_label(c.n), c.product, c.product_se, targets_.cross_product,
                             t.cross_floor, t.se_multiplier));
    const double corr_tol = t.se_multiplier * c.correlation.se;
    checks_.push_back(predicate("cross correlation < 0", c.correlation.corr, c.correlation.se, 0.0, corr_tol,
                                c.correlation.corr < 0.0 && -c.correlation.corr > corr_tol,
                                "strictly negative beyond se_multiplier * se"));
  }

  void stationary() {
    if (!cfg_.experiment.model.varsigma) {
      throw ConfigError("stationary needs [model] varsigma with |varsigma| < 1");
    }
    const StationaryResult s = stationary_comparison(cfg_.experiment);
    Json doc;
    doc["n"] = s.n;
    doc["varsigma"] = s.varsigma;
    doc["burn_in"] = stationary_burn_in(s.varsigma);
    doc["reps"] = cfg_.experiment.reps;
    doc["seed"] = cfg_.experiment.base_seed;
    doc["joint"] = {{"mean", s.joint.mean}, {"se", s.joint.se}};
    doc["product"] = {{"mean", s.product}, {"se", s.product_se}};
    doc["difference"] = {{"mean", s.difference}, {"se", s.difference_se}};
    doc["target"] = targets_.stationary;
    sink_.write_json("stationary.json", doc);

    const auto& t = cfg_.thresholds;
    checks_.push_back(within("stationary joint " + n_label(s.n), s.joint.mean, s.joint.se, targets_.stationary,
                             t.stationary_floor, t.se_multiplier));
    checks_.push_back(within("stationary product " + n_label(s.n), s.product, s.product_se, targets_.stationary,
                             t.stationary_floor, t.se_multiplier));
    checks_.push_back(within("stationary joint - product", s.difference, s.difference_se, 0.0, 0.0,
                             t.se_multiplier));
  }

  void constants() {
    const ConstantsReport rep = estimate_constants(constants_config(cfg_));
    const LimitParams p = make_limit_params(cfg_.experiment.model.innovations,
                                            materialize_filter(cfg_.experiment.model.filter));
    const MeanEstimate fpe = fpe_functional_mean(rep.samples, p, cfg_.brownian.batches);

    Json doc;
    Json est = Json::array();
    for (const auto& e : rep.estimates) est.push_back(to_json(e));
    doc["estimates"] = est;
    if (!rep.refined.empty()) {
      Json ref = Json::array();
      for (const auto& e : rep.refined) ref.push_back(to_json(e));
      doc["refined"] = ref;
    }
    doc["fpe_functional"] = {{"value", fpe.mean}, {"se", fpe.se}, {"target", targets_.fpe}};
    sink_.write_json("constants.json", doc);

    const auto& t = cfg_.thresholds;
    const auto& k1 = rep.get("K1");
    const auto& k2 = rep.get("K2");
    checks_.push_back(within("K1", k1.value, k1.se, t.k1, t.k1_tol, 0.0));
    checks_.push_back(within("K2", k2.value, k2.se, t.k2, t.k2_tol, 0.0));
    checks_.push_back(predicate("K1 mc_se", k1.se, 0.0, t.k1_max_se, t.k1_max_se, k1.se <= t.k1_max_se, "upper bound"));
    checks_.push_back(predicate("K2 mc_se", k2.se, 0.0, t.k2_max_se, t.k2_max_se, k2.se <= t.k2_max_se, "upper bound"));
    checks_.push_back(within("limit fpe functional", fpe.mean, fpe.se, targets_.fpe, t.fpe_floor, t.se_multiplier));
  }

  void limit_check() {
    const auto& sim = unit_root();
    const LimitParams p = make_limit_params(cfg_.experiment.model.innovations,
                                            materialize_filter(cfg_.experiment.model.filter));
    const auto draws = limit_draws(p, cfg_.thresholds.ks_limit_grid, sim.reps, cfg_.experiment.base_seed,
                                   cfg_.experiment.workers);
    std::vector<double> limit(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) limit[i] = draws[i].fpe_limit_draw;

    Json rows = Json::array();
    std::vector<double> ks(sim.n_grid.size());
    for (std::size_t k = 0; k < sim.n_grid.size(); ++k) {
      ks[k] = limit_distribution_check(sim.column(k, &PathStats::fpe_stat), limit);
      rows.push_back({{"n", sim.n_grid[k]}, {"ks", ks[k]}});
    }
    Json doc;
    doc["statistic"] = "fpe_stat";
    doc["limit_grid"] = cfg_.thresholds.ks_limit_grid;
    doc["samples"] = sim.reps;
    doc["seed"] = sim.base_seed;
    doc["ks"] = rows;
    sink_.write_json("limit_check.json", doc);

    const std::size_t last = ks.size() - 1;
    checks_.push_back(predicate("KS " + n_label(sim.n_grid[last]), ks[last], 0.0, 0.0, cfg_.thresholds.ks_max,
                                ks[last] <= cfg_.thresholds.ks_max, "upper bound"));
    if (ks.size() >= 2) {
      checks_.push_back(predicate("KS " + n_label(sim.n_grid[0]) + " > KS " + n_label(sim.n_grid[last]), ks[0],
                                  0.0, ks[last], 0.0, ks[0] > ks[last], "distance shrinks with n"));
    }
  }

  void dump_trajectory() {
    const auto& e = cfg_.experiment;
    Stream stream(e.base_seed, 0, StreamRole::innovations);
    const Trajectory traj = generate_path(materialize_filter(e.model.filter), InnovationSampler(e.model.innovations),
                                          e.model.beta, e.n_grid.back(), stream);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    sink_.write_text("trajectory.csv", os.str());
  }

 private:
  const SimulationResult& unit_root() {
    if (!sim_) sim_ = simulate(cfg_.experiment);
    return *sim_;
  }

  void write_summaries(const std::string& stem) {
    if (wrote_summaries_) return;
    wrote_summaries_ = true;
    const auto rows = summarize(*sim_, cfg_.experiment);
    std::ostringstream csv;
    write_summary_csv(csv, rows);
    sink_.write_text("summary.csv", csv.str());
    Json list = Json::array();
    for (const auto& r : rows) list.push_back(to_json(r));
    sink_.write_json("summary.json", list);
    (void)stem;
  }

  const LabConfig& cfg_;
  ArtifactSink& sink_;
  std::vector<Check>& checks_;
  ModelTargets targets_;
  std::optional<SimulationResult> sim_;
  bool wrote_summaries_ = false;
};

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"fpe",        "ape-curve",  "mse",         "constants",
                                                 "cross-moment", "stationary", "limit-check", "all"};
  return names;
}

LabConfig apply_overrides(LabConfig config, const RunOptions& options) {
  if (options.seed) config.experiment.base_seed = *options.seed;
  if (options.workers) config.experiment.workers = *options.workers;
  if (options.output_dir) config.experiment.output = options.output_dir->string();
  return config;
}

DispatchResult dispatch(const RunOptions& options, const LabConfig& base_config, std::ostream& out) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), options.subcommand) == names.end()) {
    throw ConfigError("unknown subcommand '" + options.subcommand + "'");
  }
  const LabConfig cfg = apply_overrides(base_config, options);

  ArtifactSink sink(cfg.experiment.output);
  DispatchResult result;
  Session session(cfg, sink, result.checks);
  sink.write_text("config.ini", serialize_config(cfg));

  const std::string& sub = options.subcommand;
  const bool all = sub == "all";
  if (all || sub == "fpe") session.fpe();
  if (all || sub == "mse") session.mse();
  if (sub == "ape-curve" || (all && cfg.experiment.n_grid.size() >= 3)) session.ape_curve();
  if (all || sub == "cross-moment") session.cross();
  if (all || sub == "limit-check") session.limit_check();
  if (all || sub == "constants") session.constants();
  if (sub == "stationary" || (all && cfg.experiment.model.varsigma)) session.stationary();
  if (options.dump_trajectory) session.dump_trajectory();

  Json checks = Json::array();
  for (const auto& c : result.checks) checks.push_back(to_json(c));
  sink.write_json("checks.json", checks);

  const bool passed = std::all_of(result.checks.begin(), result.checks.end(), [](const Check& c) { return c.pass; });
  result.manifest["config"] = options.config_path;
  result.manifest["subcommand"] = sub;
  result.manifest["output_dir"] = cfg.experiment.output;
  result.manifest["base_seed"] = cfg.experiment.base_seed;
  result.manifest["workers"] = cfg.experiment.workers;
  result.manifest["strict"] = options.strict;
  result.manifest["passed"] = passed;
  result.manifest["artifacts"] = sink.checksums();
  {
    ArtifactSink manifest_sink(cfg.experiment.output);
    manifest_sink.write_json("manifest.json", result.manifest);
  }

  print_check_table(out, result.checks);
  out << (passed ? "all checks passed" : "some checks FAILED") << " (" << result.checks.size() << " checks, "
      << sink.files().size() << " artifacts in " << cfg.experiment.output << ")\n";
  result.exit_code = (!passed && options.strict) ? kExitAcceptanceFailure : kExitPass;
  return result;
}

}  // namespace urlab
