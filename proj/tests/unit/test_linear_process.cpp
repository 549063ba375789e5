#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "urlab/errors.hpp"
#include "urlab/linear_process.hpp"
#include "urlab/stats.hpp"

using namespace urlab;

namespace {

Trajectory path(const FilterSpec& spec, const InnovationSpec& innov, double beta, std::size_t n,
                std::uint64_t seed, std::uint64_t rep = 0) {
  Stream stream(seed, rep, StreamRole::innovations);
  return generate_path(materialize_filter(spec), InnovationSampler(innov), beta, n, stream);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string config_error_text(const FilterSpec& spec) {
  try {
    materialize_filter(spec);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("finite filter with a single unit coefficient") {
  const auto m = materialize_filter({FiniteFilter{{1.0}}});
  CHECK(m.theta == 1.0);
  CHECK(m.iota_sq() == 1.0);
  CHECK(m.lag() == 0);
  for (double f : m.tails) CHECK(f == 0.0);
}

TEST_CASE("geometric filter closed forms") {
  const auto m = materialize_filter({GeometricFilter{1.0, 0.5}});
  CHECK(m.theta == doctest::Approx(2.0));
  CHECK(m.iota_sq() == doctest::Approx(4.0));
  CHECK(m.lambda(1.0) == doctest::Approx(2.0));
  REQUIRE(m.tails.size() >= 2);
  CHECK(m.tails[0] == doctest::Approx(1.0));
  CHECK(m.tails[1] == doctest::Approx(0.5));
  CHECK(m.neglected_abs_tail <= 1e-8 * m.theta);
}

TEST_CASE("polynomial filter sum against direct summation") {
  // Independent oracle: 10^7 terms summed smallest first, plus the integral tail.
  double direct = 0.0;
  const long terms = 10000000;
  for (long k = terms; k >= 1; --k) {
    const double kd = static_cast<double>(k);
    direct += 1.0 / (kd * kd * kd);
  }
  direct += 1.0 / (2.0 * static_cast<double>(terms) * static_cast<double>(terms));

  const auto m = materialize_filter({PolynomialFilter{1.0, 3.0}, 0, 1e-8});
  CHECK(std::fabs(m.theta - direct) < 1e-12);
  CHECK(m.neglected_abs_tail <= 1e-8 * m.theta);
  CHECK(std::fabs(m.truncated_theta() + m.neglected_abs_tail - direct) < 1e-12);
  CHECK(power_tail_sum(3.0, 1) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("invalid filters") {
  CHECK(config_error_text({GeometricFilter{1.0, 1.0}}).find("not absolutely summable") != std::string::npos);
  CHECK(config_error_text({FiniteFilter{{1.0, -1.0}}}).find("filter sums to zero") != std::string::npos);
  CHECK_FALSE(config_error_text({PolynomialFilter{1.0, 2.0}}).empty());
  CHECK_FALSE(config_error_text({FiniteFilter{{}}}).empty());
}

TEST_CASE("random walk with epsilon equal to omega gives y_t = x_t") {
  const auto traj = path({FiniteFilter{{1.0}}}, {1.0, 1.0, 1.0}, 1.0, 500, 3);
  for (std::size_t t = 2; t <= traj.n; ++t) REQUIRE(traj.y[t] == doctest::Approx(traj.x[t]).epsilon(1e-14));
  CHECK(traj.x[0] == 0.0);
}

TEST_CASE("beta = 0 gives y = epsilon") {
  const auto traj = path({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.4}, 0.0, 200, 4);
  for (std::size_t t = 2; t <= traj.n + 1; ++t) REQUIRE(traj.y[t] == traj.epsilon[t]);
}

TEST_CASE("eta variance equals sigma_omega^2 sum c_j^2") {
  const std::vector<double> c = {1.0, 0.5, 0.25};
  const auto traj = path({FiniteFilter{c}}, {2.0, 1.0, 0.0}, 1.0, 100000, 6);
  std::vector<double> sq;
  for (std::size_t t = c.size(); t <= traj.n; ++t) sq.push_back(traj.eta[t] * traj.eta[t]);
  const double target = 2.0 * (1.0 + 0.25 + 0.0625);
  // Batches of 1000 consecutive terms are effectively independent for an MA(2).
  const auto e = batch_mean_estimate(sq, 100);
  CHECK(std::fabs(e.mean - target) < 4.0 * e.se);
}

TEST_CASE("generation is a pure function of the stream") {
  const auto a = path({PolynomialFilter{1.0, 3.0}}, {1.0, 2.0, 0.7}, 0.5, 300, 8, 5);
  const auto b = path({PolynomialFilter{1.0, 3.0}}, {1.0, 2.0, 0.7}, 0.5, 300, 8, 5);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
}

TEST_CASE("decomposition of a random walk is trivial") {
  const MaterializedFilter m = materialize_filter({FiniteFilter{{1.0}}});
  const auto traj = path({FiniteFilter{{1.0}}}, {1.0, 1.0, 0.0}, 1.0, 100, 1);
  const auto d = decompose(traj, m);
  for (std::size_t t = 1; t <= traj.n; ++t) {
    REQUIRE(d.S[t] == 0.0);
    REQUIRE(d.N[t] == doctest::Approx(traj.x[t]).epsilon(1e-14));
  }
}

TEST_CASE("geometric decomposition reconstructs the path") {
  const FilterSpec spec{GeometricFilter{1.0, 0.5}};
  const MaterializedFilter m = materialize_filter(spec);
  const auto traj = path(spec, {1.0, 1.0, 0.0}, 1.0, 10, 12);
  const auto d = decompose(traj, m);

  // Oracle: direct convolution of the applied coefficients.
  double max_x = 0.0, max_res = 0.0, x = 0.0;
  for (std::size_t t = 1; t <= traj.n; ++t) {
    double eta = 0.0;
    for (std::size_t j = 0; j < t && j < m.coeffs.size(); ++j) eta += m.coeffs[j] * traj.omega[t - j];
    x += eta;
    REQUIRE(x == doctest::Approx(traj.x[t]).epsilon(1e-13));
    max_x = std::max(max_x, std::fabs(x));
    max_res = std::max(max_res, std::fabs(d.N[t] - d.S[t] - x));
  }
  CHECK(max_res <= 1e-10 * max_x);
}

TEST_CASE("mismatched filter is reported") {
  const auto traj = path({GeometricFilter{1.0, 0.5}}, {1.0, 1.0, 0.0}, 1.0, 50, 2);
  CHECK_THROWS_AS(decompose(traj, materialize_filter({FiniteFilter{{1.0}}})), InternalError);
}

TEST_CASE("scaled random-walk endpoint has variance lambda^2") {
  const FilterSpec spec{GeometricFilter{1.0, 0.5}};
  const MaterializedFilter m = materialize_filter(spec);
  const std::size_t n = 400, reps = 4000;
  std::vector<double> sq(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto d = decompose(path(spec, {1.0, 1.0, 0.0}, 1.0, n, 21, r), m);
    const double z = d.N[n] / std::sqrt(static_cast<double>(n));
    sq[r] = z * z;
  }
  const auto e = mean_estimate(sq);
  CHECK(std::fabs(e.mean - 4.0) < 4.0 * e.se);
}

TEST_CASE("strong law diagnostic for i.i.d. squares") {
  const std::size_t n = 1000000;
  Stream s(31, 0, StreamRole::diagnostic);
  std::vector<double> w(n);
  for (auto& v : w) v = standard_draw(s, Family::gaussian);
  const std::vector<double> d = {1.0};
  const double r = strong_law_diagnostic(moving_average(w, d), d, 1.0);
  CHECK(std::fabs(r) < 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("strong law diagnostic on a zero series") {
  const std::vector<double> d = {1.0, 0.5};
  const std::vector<double> z(10, 0.0);
  // gamma_1 = 1, gamma_t = 1.25 afterwards
  const double expected = -(1.0 + 9 * 1.25) / 10.0;
  CHECK(strong_law_diagnostic(z, d, 1.0) == doctest::Approx(expected));
}

TEST_CASE("strong law residual shrinks with n for the geometric tails") {
  const MaterializedFilter m = materialize_filter({GeometricFilter{1.0, 0.5}});
  std::vector<double> medians;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<double> res;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Stream s(seed, n, StreamRole::diagnostic);
      std::vector<double> w(n);
      for (auto& v : w) v = standard_draw(s, Family::gaussian);
      res.push_back(std::fabs(strong_law_diagnostic(moving_average(w, m.tails), m.tails, 1.0)));
    }
    medians.push_back(median(res));
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("log Fisher diagnostic on the injected path x_j = j") {
  for (std::size_t n : {10u, 1000u, 100000u}) {
    std::vector<double> x(n + 1);
    std::iota(x.begin(), x.end(), 0.0);
    const auto lf = log_fisher_diagnostic(x);
    const double nd = static_cast<double>(n);
    CHECK(lf.log_energy == doctest::Approx(std::log((nd - 1) * nd * (2 * nd - 1) / 6.0)).epsilon(1e-13));
    CHECK(lf.two_log_n == doctest::Approx(2.0 * std::log(nd)));
    if (n >= 1000) CHECK(lf.difference - std::log(nd) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(2e-3));
  }
  CHECK_THROWS_AS(log_fisher_diagnostic(std::vector<double>(6, 0.0)), DegeneratePath);
}

TEST_CASE("log Fisher difference is small relative to log n") {
  for (const FilterSpec& spec : {FilterSpec{FiniteFilter{{1.0}}}, FilterSpec{GeometricFilter{1.0, 0.5}}}) {
    std::vector<double> medians;
    for (std::size_t n : {100u, 1000u, 10000u}) {
      std::vector<double> v;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto lf = log_fisher_diagnostic(path(spec, {1.0, 1.0, 1.0}, 1.0, n, seed, n));
        v.push_back(std::fabs(lf.difference) / std::log(static_cast<double>(n)));
      }
      medians.push_back(median(v));
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
  }
}

TEST_CASE("stationary paths and burn-in") {
  CHECK(stationary_burn_in(0.5) == 20);
  CHECK(stationary_burn_in(0.0) == 10);
  CHECK_THROWS_AS(stationary_burn_in(1.0), ConfigError);

  Stream s(3, 0, StreamRole::innovations);
  const auto traj = generate_path(materialize_filter({}), InnovationSampler({}), 1.0, 50, s, {0.5, 20});
  CHECK_FALSE(traj.unit_root());
  for (std::size_t t = 1; t <= traj.n; ++t) REQUIRE(traj.x[t] == doctest::Approx(0.5 * traj.x[t - 1] + traj.eta[t]));
  CHECK(traj.x[0] != 0.0);
}
