#pragma once

// Unit-root regressor driven by a moving-average filter, and the regression
// output built on it:
//
//   eta_t = sum_{j=0}^{min(t-1, L)} c_j omega_{t-j}
//   x_t   = x_{t-1} + eta_t,  x_0 = 0
//   y_t   = beta x_{t-1} + epsilon_t
//
// plus the Beveridge-Nelson style split x_t = N_t - S_t used by the
// strong-law diagnostics.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "urlab/innovations.hpp"
#include "urlab/rng.hpp"

namespace urlab {

struct FiniteFilter {
  std::vector<double> coeffs;  ///< c_0 .. c_K
  friend bool operator==(const FiniteFilter&, const FiniteFilter&) = default;
};

/// c_j = a r^j, |r| < 1.
struct GeometricFilter {
  double a = 1.0;
  double r = 0.0;
  friend bool operator==(const GeometricFilter&, const GeometricFilter&) = default;
};

/// c_j = a (j + 1)^{-p}, p > 2 so that sum_{j>=k} |c_j| = O(1/k).
struct PolynomialFilter {
  double a = 1.0;
  double p = 3.0;
  friend bool operator==(const PolynomialFilter&, const PolynomialFilter&) = default;
};

using FilterFamily = std::variant<FiniteFilter, GeometricFilter, PolynomialFilter>;

struct FilterSpec {
  FilterFamily family = FiniteFilter{{1.0}};
  /// Starting truncation lag; raised until the neglected tail satisfies tail_tol.
  std::size_t truncation_lag = 0;
  double tail_tol = 1e-8;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

std::string filter_family_name(const FilterFamily& family);

std::vector<std::string> validation_errors(const FilterSpec& spec);
void validate(const FilterSpec& spec);

/// sum_{k>=first} k^{-p} for p > 1 (Hurwitz zeta at integer offset), via
/// Euler-Maclaurin once first is large enough.
double power_tail_sum(double p, std::size_t first);

struct MaterializedFilter {
  std::vector<double> coeffs;  ///< c_0 .. c_L actually applied
  double theta = 0.0;          ///< sum of all c_j (closed form, untruncated)
  double neglected_abs_tail = 0.0;  ///< sum_{j>L} |c_j|
  /// f_j = sum_{l>j} c_l over the untruncated family, j = 0..L.
  std::vector<double> tails;
  /// \bar f_j = sum_{l<=j} c_l, j = 0..L.
  std::vector<double> partial_sums;

  std::size_t lag() const noexcept { return coeffs.size() - 1; }
  double iota_sq() const noexcept { return theta * theta; }
  double lambda(double sigma_omega) const noexcept { return sigma_omega * theta; }

  /// Sum of the applied (truncated) coefficients.
  double truncated_theta() const noexcept { return partial_sums.back(); }
  /// Tails of the applied filter: sum_{l=j+1}^{L} c_l. These reconstruct a
  /// generated path exactly; the closed-form tails differ by the neglected tail.
  std::vector<double> truncated_tails() const;
};

/// Throws ConfigError when the spec is invalid or sums to (nearly) zero.
MaterializedFilter materialize_filter(const FilterSpec& spec);

struct Trajectory {
  std::size_t n = 0;
  double beta = 0.0;
  double varsigma = 1.0;      ///< autoregressive coefficient of x; 1 is the unit root
  std::size_t burn_in = 0;    ///< presample steps discarded before t = 0
  std::vector<double> omega;    ///< [1..n]
  std::vector<double> eta;      ///< [1..n]
  std::vector<double> x;        ///< [0..n]
  std::vector<double> epsilon;  ///< [2..n+1]
  std::vector<double> y;        ///< [2..n+1]

  bool unit_root() const noexcept { return varsigma == 1.0 && burn_in == 0; }
};

struct PathOptions {
  double varsigma = 1.0;
  std::size_t burn_in = 0;
};

/// Burn-in used for stationary regressors: 10 * ceil(1 / (1 - |varsigma|)).
std::size_t stationary_burn_in(double varsigma);

/// Fills out (reusing its storage). Pure function of the inputs and the
/// stream state. Requires n >= 2.
void generate_path(const MaterializedFilter& filter, const InnovationSampler& innovations, double beta,
                   std::size_t n, Stream& stream, Trajectory& out, const PathOptions& options = {});

Trajectory generate_path(const MaterializedFilter& filter, const InnovationSampler& innovations, double beta,
                         std::size_t n, Stream& stream, const PathOptions& options = {});

struct Decomposition {
  std::vector<double> N;  ///< theta sum_{j<=t} omega_j, [1..n]
  std::vector<double> S;  ///< sum_{j<t} f_j omega_{t-j}, [1..n]
  double max_residual = 0.0;  ///< max_t |N_t - S_t - x_t|
};

/// Splits a unit-root path into its random-walk and stationary parts using the
/// applied filter. Throws InternalError when the reconstruction residual
/// exceeds 1e-9 relative to max |x_t|, which signals a mismatched filter.
Decomposition decompose(const Trajectory& traj, const MaterializedFilter& filter);

/// z_t = sum_{j=0}^{min(t-1, L)} d_j omega_{t-j}; both spans are 0-based with
/// omega[0] holding omega_1.
std::vector<double> moving_average(std::span<const double> omega, std::span<const double> d);

/// (1/n) sum_t (z_t^2 - gamma_t), gamma_t = sigma_omega^2 sum_{j<t} d_j^2.
/// z is 0-based (z[0] is z_1).
double strong_law_diagnostic(std::span<const double> z, std::span<const double> d, double sigma_omega_sq);

struct LogFisher {
  double log_energy = 0.0;  ///< log sum_{j=1}^{n-1} x_j^2
  double two_log_n = 0.0;
  double difference = 0.0;  ///< log_energy - two_log_n
};

/// x holds x_0 .. x_n. Throws DegeneratePath when the energy is zero.
LogFisher log_fisher_diagnostic(std::span<const double> x);
LogFisher log_fisher_diagnostic(const Trajectory& traj);

/// Column CSV: t,omega,epsilon,eta,x,y for t = 0..n+1 (missing entries empty).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace urlab
