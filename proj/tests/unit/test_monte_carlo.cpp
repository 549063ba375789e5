#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "urlab/errors.hpp"
#include "urlab/monte_carlo.hpp"

using namespace urlab;

namespace {

ExperimentConfig small_config(FilterSpec filter, InnovationSpec innov, std::vector<std::size_t> grid,
                              std::size_t reps) {
  ExperimentConfig c;
  c.model.filter = std::move(filter);
  c.model.innovations = innov;
  c.n_grid = std::move(grid);
  c.reps = reps;
  c.base_seed = 99;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("results do not depend on the worker count") {
  ExperimentConfig c = small_config({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.5}, {50, 200}, 300);
  c.workers = 1;
  const auto a = simulate(c);
  c.workers = 5;
  const auto b = simulate(c);
  for (std::size_t k = 0; k < a.n_grid.size(); ++k) {
    for (std::size_t r = 0; r < a.reps; ++r) {
      REQUIRE(same_bits(a.stats[k][r].ape, b.stats[k][r].ape));
      REQUIRE(same_bits(a.stats[k][r].est_error, b.stats[k][r].est_error));
      REQUIRE(same_bits(a.stats[k][r].excess_ape, b.stats[k][r].excess_ape));
    }
  }
  const auto sa = summarize(a, c), sb = summarize(b, c);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(same_bits(sa[i].mean, sb[i].mean));
    CHECK(same_bits(sa[i].mc_se, sb[i].mc_se));
  }
}

TEST_CASE("fpe statistic is the product of its two factors") {
  const ExperimentConfig c = small_config({FiniteFilter{{1.0}}}, {1.0, 1.0, 1.0}, {100}, 200);
  const auto sim = simulate(c);
  for (const PathStats& s : sim.stats[0]) {
    REQUIRE(s.fpe_stat() == doctest::Approx(s.x_n_sq_over_n() * s.norm_est_sq()).epsilon(1e-12));
  }
}

TEST_CASE("summaries and targets") {
  ExperimentConfig c = small_config({FiniteFilter{{1.0}}}, {1.0, 1.0, 1.0}, {40, 80, 160}, 100);
  c.statistics = {Statistic::fpe_stat, Statistic::norm_est_sq};
  const auto rows = summarize(simulate(c), c);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].statistic == "fpe_stat");
  CHECK(rows[0].n == 40);
  CHECK(rows[0].target == doctest::Approx(2.0));
  CHECK(rows[1].target == doctest::Approx(13.3));
  CHECK(rows[5].n == 160);
  CHECK(rows[0].reps == 100);
  CHECK(rows[0].seed == 99);

  c.reps = 10;
  CHECK_THROWS_AS(summarize(simulate(c), c), ConfigError);

  const ModelTargets t = model_targets({FilterSpec{GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.5}});
  CHECK(t.lambda_sq == doctest::Approx(4.0));
  CHECK(t.cross_product == doctest::Approx(13.3 * 0.25 + 5.6 * 0.75));
  CHECK(t.mse == doctest::Approx(t.cross_product / 4.0));
}

TEST_CASE("endpoint variance for the geometric filter") {
  const ExperimentConfig c = small_config({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.0}, {1000}, 4000);
  const auto sim = simulate(c);
  const auto e = mean_estimate(sim.column(0, &PathStats::x_n_sq_over_n));
  // Exact E x_n^2 / n for the truncated filter differs from lambda^2 by O(1/n).
  CHECK(std::fabs(e.mean - 4.0) < 4.0 * e.se);
}

TEST_CASE("ape slope over summaries") {
  std::vector<McSummary> rows;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    McSummary s;
    s.statistic = "excess_ape";
    s.n = n;
    s.mean = 3.0 + 2.0 * std::log(static_cast<double>(n));
    rows.push_back(s);
    McSummary other = s;
    other.statistic = "fpe_stat";
    other.mean = 1e9;
    rows.push_back(other);
  }
  CHECK(ape_slope(rows) == doctest::Approx(2.0));
  rows.resize(2);
  CHECK_THROWS(ape_slope(rows));
}

TEST_CASE("stationary configs") {
  ExperimentConfig c = small_config({FiniteFilter{{1.0}}}, {1.0, 1.0, 0.0}, {500}, 2000);
  CHECK_THROWS_AS(stationary_comparison(c), ConfigError);
  c.model.varsigma = 1.5;
  CHECK_FALSE(validation_errors(c).empty());
  c.model.varsigma = 0.0;
  const auto s = stationary_comparison(c);
  CHECK(s.varsigma == 0.0);
  CHECK(std::fabs(s.joint.mean - 1.0) < 4.0 * s.joint.se + 0.05);
  CHECK(std::fabs(s.product - 1.0) < 4.0 * s.product_se + 0.05);
}

TEST_CASE("experiment validation collects every problem") {
  ExperimentConfig c;
  c.n_grid = {100, 50, 2};
  c.reps = 0;
  c.model.innovations.pi = 5.0;
  const auto problems = validation_errors(c);
  CHECK(problems.size() >= 3);
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("limit distribution check") {
  std::vector<double> a(2000);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sin(static_cast<double>(i));
  CHECK(limit_distribution_check(a, a) == 0.0);
  CHECK_THROWS(limit_distribution_check(std::vector<double>(10, 1.0), a));
}

TEST_CASE("statistic names round trip") {
  for (Statistic s : all_statistics()) CHECK(parse_statistic(statistic_name(s)) == s);
  CHECK_THROWS_AS(parse_statistic("median"), ConfigError);
}
