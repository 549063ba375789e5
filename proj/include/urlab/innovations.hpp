#pragma once

// Paired innovations (omega_t, epsilon_t).
//
// epsilon_t = rho * omega_t + theta_t with theta_t independent of every omega,
// so epsilon_t is independent of all past omegas and the contemporaneous
// covariance is E(epsilon_t omega_t) = rho * sigma_omega^2 = pi.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "urlab/rng.hpp"

namespace urlab {

/// Every family has finite moments of all orders and an integrable
/// characteristic function once convolved, so no runtime density checks are
/// needed.
enum class Family { gaussian, laplace, uniform };

std::string_view family_name(Family f) noexcept;
/// Throws ConfigError for an unknown name.
Family parse_family(std::string_view name);

struct InnovationSpec {
  double sigma_omega_sq = 1.0;
  double sigma_sq = 1.0;
  double pi = 0.0;  ///< E(epsilon_t omega_t)
  Family family = Family::gaussian;

  friend bool operator==(const InnovationSpec&, const InnovationSpec&) = default;
};

/// Violated invariants as human-readable inequalities; empty when valid.
std::vector<std::string> validation_errors(const InnovationSpec& spec);
void validate(const InnovationSpec& spec);

struct CorrelationStructure {
  double rho = 0.0;             ///< pi / sigma_omega^2
  double sigma_theta_sq = 0.0;  ///< sigma^2 - rho^2 sigma_omega^2
};

CorrelationStructure derived_correlation(const InnovationSpec& spec);

struct InnovationPair {
  double omega = 0.0;
  double epsilon = 0.0;
};

/// Zero-mean, unit-variance draw from the family.
inline double standard_draw(Stream& stream, Family family) {
  switch (family) {
    case Family::gaussian: {
      boost::random::normal_distribution<double> normal;
      return normal(stream);
    }
    case Family::laplace: {
      // Scale 1/sqrt(2) gives unit variance.
      const double u = stream.uniform() - 0.5;
      const double mag = -std::log1p(-2.0 * std::fabs(u)) * M_SQRT1_2;
      return u < 0.0 ? -mag : mag;
    }
    case Family::uniform:
      return (2.0 * stream.uniform() - 1.0) * 1.7320508075688772;
  }
  return 0.0;
}

/// Validated spec with the derived scales precomputed for the hot loop.
class InnovationSampler {
 public:
  explicit InnovationSampler(const InnovationSpec& spec);

  InnovationPair draw(Stream& stream) const {
    const double omega = sigma_omega_ * standard_draw(stream, family_);
    double epsilon = rho_ * omega;
    if (sigma_theta_ > 0.0) epsilon += sigma_theta_ * standard_draw(stream, family_);
    return {omega, epsilon};
  }

  const InnovationSpec& spec() const noexcept { return spec_; }
  double rho() const noexcept { return rho_; }
  double sigma_omega() const noexcept { return sigma_omega_; }
  double sigma_theta() const noexcept { return sigma_theta_; }

 private:
  InnovationSpec spec_;
  Family family_;
  double sigma_omega_;
  double rho_;
  double sigma_theta_;
};

/// One-off draw. Loops should construct an InnovationSampler once instead.
InnovationPair draw_pair(Stream& stream, const InnovationSpec& spec);

}  // namespace urlab
