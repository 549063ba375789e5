#pragma once

// Monte Carlo summaries over replication-indexed samples. All reductions run
// in index order, so results do not depend on how samples were produced.

#include <cstddef>
#include <span>
#include <vector>

namespace urlab {

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;  ///< sample sd / sqrt(count)
  std::size_t count = 0;
};

/// Mean and standard error from the sample variance.
MeanEstimate mean_estimate(std::span<const double> values);

/// Mean with a standard error from equal-size batch means (trailing values
/// that do not fill a batch still count toward the mean).
MeanEstimate batch_mean_estimate(std::span<const double> values, std::size_t batches);

struct CorrelationEstimate {
  double corr = 0.0;
  double se = 0.0;  ///< delta-method (influence function) standard error
};

CorrelationEstimate sample_correlation(std::span<const double> a, std::span<const double> b);

/// E[ab] - E[a]E[b] style contrasts.
struct ProductContrast {
  MeanEstimate joint;    ///< mean of a_i b_i
  MeanEstimate marg_a;
  MeanEstimate marg_b;
  double product = 0.0;     ///< mean(a) * mean(b)
  double product_se = 0.0;  ///< delta method
  double difference = 0.0;  ///< joint - product
  double difference_se = 0.0;
};

ProductContrast product_contrast(std::span<const double> a, std::span<const double> b);

/// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov distance sup_t |F_a(t) - F_b(t)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace urlab
