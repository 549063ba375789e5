#pragma once

// Euler-grid simulation of the Brownian functionals that the normalized
// least-squares statistics converge to.
//
// All stochastic integrals are left-endpoint (Ito) sums. Midpoint or
// right-endpoint sums converge to the Stratonovich integral, which for the
// self-integral differs by 1/2 and gives the wrong limit law.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urlab/innovations.hpp"
#include "urlab/linear_process.hpp"
#include "urlab/rng.hpp"
#include "urlab/stats.hpp"

namespace urlab {

/// Rounded reference values of E[(int w dw / int w^2 dt)^2] and
/// E[1 / int w^2 dt].
inline constexpr double kCanonicalK1 = 13.3;
inline constexpr double kCanonicalK2 = 5.6;

/// Two independent standard Brownian motions on the grid k/m, k = 0..m.
struct BmPath {
  std::size_t m = 0;
  std::vector<double> inc_a;    ///< [0..m-1], variance 1/m each
  std::vector<double> inc_b;
  std::vector<double> level_a;  ///< [0..m], level_a[0] = 0
  std::vector<double> level_b;
};

BmPath generate_bm_path(std::size_t m, Stream& stream_a, Stream& stream_b);

/// sum_{k=1}^m w[k-1] dv[k]. levels has m + 1 entries, increments m.
double ito_integral(std::span<const double> levels, std::span<const double> increments);

/// (1/m) sum_{k=1}^m w[k-1]^2.
double time_integral_sq(std::span<const double> levels);

/// Sufficient statistics of one path for every functional used here.
struct FunctionalSample {
  double w_end = 0.0;   ///< w_a(1)
  double ito_aa = 0.0;  ///< int w_a dw_a
  double ito_ab = 0.0;  ///< int w_a dw_b
  double time_sq = 0.0; ///< int w_a^2 dt
};

FunctionalSample functionals(const BmPath& path);

/// Streams one path without storing it. When with_cross is false, w_b is not
/// drawn and ito_ab is zero.
FunctionalSample sample_functionals(std::size_t m, Stream& stream_a, Stream& stream_b, bool with_cross);

/// Draws a path on the 2m grid and evaluates it on both grids; the coarse sample
/// uses pairwise-summed increments of the same path.
struct RefinedSample {
  FunctionalSample coarse;  ///< grid m
  FunctionalSample fine;    ///< grid 2m
};
RefinedSample sample_functionals_refined(std::size_t m, Stream& stream_a, Stream& stream_b, bool with_cross);

struct LimitParams {
  double rho = 0.0;
  double sigma_omega = 1.0;
  double sigma_theta = 0.0;
  double sigma = 1.0;
  double iota_sq = 1.0;
  double lambda = 1.0;
};

/// Parameters implied by a model; iota^2 = lambda^2 / sigma_omega^2 = theta^2.
LimitParams make_limit_params(const InnovationSpec& innovations, const MaterializedFilter& filter);
void validate(const LimitParams& p);

struct LimitDraw {
  double fpe_limit_draw = 0.0;  ///< w(1)^2 (rho s_w I_aa + s_th I_ab)^2 / T^2
  double mse_limit_draw = 0.0;  ///< (rho s_w I_aa + s_th I_ab)^2 / (lambda^2 T^2)
};

/// Throws DegeneratePath when int w^2 dt < 1e-12.
LimitDraw limit_sample(const FunctionalSample& f, const LimitParams& p);
LimitDraw limit_sample(const BmPath& path, const LimitParams& p);

/// (rho^2 / iota^2) K1 + (sigma_theta^2 / (iota^2 sigma_omega^2)) K2.
double mse_limit_formula(const LimitParams& p, double k1 = kCanonicalK1, double k2 = kCanonicalK2);

struct ConstantsConfig {
  std::size_t m = 4096;
  std::size_t reps = 100000;
  std::uint64_t base_seed = 20240501;
  unsigned workers = 0;
  bool with_cross = true;  ///< also estimate the w_b functionals
  bool refine = false;     ///< report grid 2m alongside grid m
  std::size_t batches = 100;
};

struct NamedEstimate {
  std::string name;
  double value = 0.0;
  double se = 0.0;
  std::size_t m = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

struct ConstantsReport {
  /// K1, K2, and when with_cross: fpe_aa = E[w(1)^2 I_aa^2 / T^2],
  /// fpe_ab = E[w(1)^2 I_ab^2 / T^2], fpe_cross = E[w(1)^2 I_aa I_ab / T^2].
  std::vector<NamedEstimate> estimates;
  /// Same names on grid 2m when refine is set.
  std::vector<NamedEstimate> refined;
  std::vector<FunctionalSample> samples;  ///< grid-m samples in replication order

  const NamedEstimate& get(const std::string& name) const;
};

ConstantsReport estimate_constants(const ConstantsConfig& config);

/// Mean of the limit FPE functional for given parameters, with SE, from stored
/// samples: rho^2 s_w^2 fpe_aa + s_th^2 fpe_ab + 2 rho s_w s_th fpe_cross.
MeanEstimate fpe_functional_mean(std::span<const FunctionalSample> samples, const LimitParams& p,
                                 std::size_t batches = 100);

/// Independent limit draws, replication r keyed by (seed, r).
std::vector<LimitDraw> limit_draws(const LimitParams& p, std::size_t m, std::size_t count, std::uint64_t seed,
                                   unsigned workers);

}  // namespace urlab
