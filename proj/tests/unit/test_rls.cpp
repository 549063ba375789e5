#include "doctest.h"

#include <cmath>
#include <vector>

#include "urlab/errors.hpp"
#include "urlab/linear_process.hpp"
#include "urlab/rls.hpp"
#include "urlab/stats.hpp"

using namespace urlab;

namespace {

Trajectory hand_path(std::vector<double> x, double beta, std::vector<double> eps) {
  // x = x_1..x_n, eps = epsilon_2..epsilon_{n+1}
  Trajectory t;
  t.n = x.size();
  t.beta = beta;
  t.omega.assign(t.n + 1, 0.0);
  t.eta.assign(t.n + 1, 0.0);
  t.x.assign(t.n + 1, 0.0);
  t.epsilon.assign(t.n + 2, 0.0);
  t.y.assign(t.n + 2, 0.0);
  for (std::size_t i = 1; i <= t.n; ++i) {
    t.x[i] = x[i - 1];
    t.eta[i] = t.x[i] - t.x[i - 1];
    t.omega[i] = t.eta[i];
  }
  for (std::size_t i = 2; i <= t.n + 1; ++i) {
    t.epsilon[i] = eps[i - 2];
    t.y[i] = beta * t.x[i - 1] + t.epsilon[i];
  }
  return t;
}

Trajectory simulated(const FilterSpec& f, const InnovationSpec& in, double beta, std::size_t n, std::uint64_t rep) {
  Stream s(77, rep, StreamRole::innovations);
  return generate_path(materialize_filter(f), InnovationSampler(in), beta, n, s);
}

Trajectory prefix(const Trajectory& t, std::size_t n) {
  Trajectory p = t;
  p.n = n;
  p.omega.resize(n + 1);
  p.eta.resize(n + 1);
  p.x.resize(n + 1);
  p.epsilon.resize(n + 2);
  p.y.resize(n + 2);
  return p;
}

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("update and predict by hand") {
  RlsState s;
  CHECK_FALSE(s.started());
  CHECK_THROWS_AS(s.predict(1.0), NotStarted);
  s.update(1.0, 3.0);
  s.update(2.0, 5.0);
  REQUIRE(s.beta_hat());
  CHECK(*s.beta_hat() == doctest::Approx(2.6));
  CHECK(s.predict(2.0) == doctest::Approx(5.2));
  CHECK(s.predict(0.0) == 0.0);

  RlsState one;
  one.update(1.0, 1.7 + 0.0);
  CHECK(*one.beta_hat() == 1.7);

  RlsState zero;
  zero.update(0.0, 4.0);
  CHECK_FALSE(zero.started());
}

TEST_CASE("hand trace with the sequential start convention") {
  // x = (1, 2, 1), beta = 2, epsilon_2 = 1, epsilon_3 = -1: y_2 = 3, y_3 = 3.
  // betahat_2 uses the single pair (x_1, y_2) = 3; the first scored term is
  // y_3 - x_2 betahat_2 = 3 - 6.
  const auto t = hand_path({1.0, 2.0, 1.0}, 2.0, {1.0, -1.0, 0.5});
  CHECK(t.y[2] == 3.0);
  CHECK(t.y[3] == 3.0);
  const PathStats s = run_path(t);
  CHECK(s.scored_terms == 1);
  CHECK(s.ape == doctest::Approx(9.0));
  CHECK(s.sse_eps == doctest::Approx(1.0));
  CHECK(s.excess_ape == doctest::Approx(8.0));
  CHECK(s.beta_hat == doctest::Approx(9.0 / 5.0));  // (1*3 + 2*3) / (1 + 4)
  CHECK(s.x_n == 1.0);
  CHECK(s.fpe_stat() == doctest::Approx(3.0 * 0.04));
  CHECK(s.norm_est_sq() == doctest::Approx(9.0 * 0.04));

  CHECK_THROWS_AS(run_path(hand_path({1.0, 2.0}, 1.0, {0.0, 0.0})), std::invalid_argument);
  CHECK_THROWS_AS(run_path(hand_path({0.0, 0.0, 0.0}, 1.0, {1.0, 1.0, 1.0})), DegeneratePath);
}

TEST_CASE("noise-free paths are fitted exactly") {
  auto t = simulated({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.0}, 1.3, 400, 1);
  for (std::size_t i = 2; i <= t.n + 1; ++i) {
    t.epsilon[i] = 0.0;
    t.y[i] = t.beta * t.x[i - 1];
  }
  RlsState s;
  for (std::size_t i = 2; i <= t.n; ++i) {
    s.step(t.x[i - 1], t.y[i], t.epsilon[i]);
    if (s.started()) REQUIRE(*s.beta_hat() == doctest::Approx(1.3).epsilon(1e-14));
  }
  const PathStats p = run_path(t);
  CHECK(p.ape == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(p.fpe_stat() == doctest::Approx(0.0).epsilon(1e-20));

  const std::vector<std::size_t> grid = {50, 100, 200, 400};
  const auto stats = run_path_checkpoints(t, grid);
  std::vector<double> log_n, excess;
  for (const auto& st : stats) {
    log_n.push_back(std::log(static_cast<double>(st.n)));
    excess.push_back(st.excess_ape);
  }
  CHECK(ols_slope(log_n, excess) == 0.0);
}

TEST_CASE("recursive and batch estimates agree at every step") {
  const auto t = simulated({PolynomialFilter{1.0, 3.0}}, {1.0, 1.0, 0.6}, 0.8, 3000, 2);
  RlsState s;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 1; i < t.n; ++i) {
    s.update(t.x[i], t.y[i + 1]);
    // Batch oracle: recompute both sums from scratch.
    sxx = 0.0;
    sxy = 0.0;
    for (std::size_t j = 1; j <= i; ++j) {
      sxx += t.x[j] * t.x[j];
      sxy += t.x[j] * t.y[j + 1];
    }
    REQUIRE(rel_close(*s.beta_hat(), sxy / sxx, 1e-10));
  }
}

TEST_CASE("scale equivariance") {
  const auto t = simulated({FiniteFilter{{1.0}}}, {1.0, 1.0, 0.5}, 1.0, 500, 3);
  for (double k : {-3.0, 0.01, 250.0}) {
    RlsState a, b;
    for (std::size_t i = 2; i <= t.n; ++i) {
      if (a.started()) {
        REQUIRE(rel_close(b.predict(k * t.x[i - 1]), a.predict(t.x[i - 1]), 1e-12));
        REQUIRE(rel_close(*b.beta_hat(), *a.beta_hat() / k, 1e-12));
      }
      a.step(t.x[i - 1], t.y[i]);
      b.step(k * t.x[i - 1], t.y[i]);
    }
    CHECK(rel_close(b.ape(), a.ape(), 1e-11));
  }
}

TEST_CASE("prediction errors equal the oracle form term by term") {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto t = simulated({GeometricFilter{0.7, -0.4}}, {1.0, 2.0, 0.9}, 1.5, 2000, rep);
    const auto terms = prediction_terms(t);
    REQUIRE(terms.direct.size() == t.n - 2);
    double sum_direct = 0.0, sum_oracle = 0.0;
    for (std::size_t i = 0; i < terms.direct.size(); ++i) {
      REQUIRE(rel_close(terms.direct[i], terms.oracle[i], 1e-10));
      sum_direct += terms.direct[i] * terms.direct[i];
      sum_oracle += terms.oracle[i] * terms.oracle[i];
    }
    CHECK(rel_close(sum_direct, sum_oracle, 1e-10));
    CHECK(rel_close(run_path(t).ape, sum_direct, 1e-10));
  }
}

TEST_CASE("checkpoints match runs on prefixes") {
  const auto t = simulated({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.3}, 1.0, 1000, 4);
  const std::vector<std::size_t> grid = {3, 10, 250, 1000};
  const auto stats = run_path_checkpoints(t, grid);
  REQUIRE(stats.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PathStats ref = run_path(prefix(t, grid[k]));
    CHECK(stats[k].n == grid[k]);
    CHECK(stats[k].ape == doctest::Approx(ref.ape).epsilon(1e-12));
    CHECK(stats[k].beta_hat == doctest::Approx(ref.beta_hat).epsilon(1e-12));
    CHECK(stats[k].excess_ape == doctest::Approx(ref.excess_ape).epsilon(1e-9));
    CHECK(stats[k].excess_ape == doctest::Approx(ref.ape - ref.sse_eps).epsilon(1e-6));
    CHECK(stats[k].fpe_stat() >= 0.0);
    CHECK(stats[k].norm_est_sq() >= 0.0);
  }
  const std::vector<std::size_t> bad = {10, 10};
  CHECK_THROWS(run_path_checkpoints(t, bad));
  const std::vector<std::size_t> too_long = {2000};
  CHECK_THROWS(run_path_checkpoints(t, too_long));
}

TEST_CASE("excess APE grows like 2 sigma^2 log n on a random walk") {
  // Differences between nested prefixes drop the first prediction terms,
  // whose squares have no finite mean.
  const std::size_t n0 = 100, n = 10000, reps = 200;
  const std::vector<std::size_t> grid = {n0, n};
  std::vector<double> inc(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto st = run_path_checkpoints(simulated({FiniteFilter{{1.0}}}, {1.0, 1.0, 1.0}, 1.0, n, 100 + r), grid);
    inc[r] = st[1].excess_ape - st[0].excess_ape;
  }
  const auto e = mean_estimate(inc);
  const double ratio = e.mean / (2.0 * std::log(static_cast<double>(n) / static_cast<double>(n0)));
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.15));
}
