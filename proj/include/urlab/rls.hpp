#pragma once

// Recursive least squares for y_{i+1} = beta x_i + epsilon_{i+1}, the
// one-step predictor yhat_{i+1} = x_i betahat_i, and per-path prediction-error
// statistics.
//
// Indexing follows the model: betahat_n is fitted on the pairs
// (x_i, y_{i+1}), i = 1..n-1, and y_i is predicted by x_{i-1} betahat_{i-1}.
// betahat_1 has no pairs, so the first scored prediction is y_3.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "urlab/linear_process.hpp"
#include "urlab/summation.hpp"

namespace urlab {

/// predict() before any nonzero regressor has been absorbed.
class NotStarted : public std::logic_error {
 public:
  NotStarted() : std::logic_error("no estimate yet: sum of x_i^2 is still zero") {}
};

class RlsState {
 public:
  /// Absorb the pair (x_i, y_{i+1}).
  void update(double x, double y_next) noexcept {
    s_xx_.add(x * x);
    s_xy_.add(x * y_next);
    ++pairs_;
    started_ = s_xx_.value() > 0.0;
  }

  bool started() const noexcept { return started_; }
  std::optional<double> beta_hat() const noexcept {
    if (!started_) return std::nullopt;
    return s_xy_.value() / s_xx_.value();
  }

  /// x * betahat. Throws NotStarted.
  double predict(double x) const {
    if (!started_) throw NotStarted();
    return x * (s_xy_.value() / s_xx_.value());
  }

  /// Predict y from x_prev (if an estimate exists), add the squared error to
  /// the APE, then absorb (x_prev, y). Returns the prediction error when scored.
  std::optional<double> step(double x_prev, double y) noexcept {
    std::optional<double> err;
    if (started_) {
      err = y - x_prev * (s_xy_.value() / s_xx_.value());
      ape_.add(*err * *err);
      ++scored_;
    }
    update(x_prev, y);
    return err;
  }

  /// As step(), also accumulating the noise energy over scored indices when
  /// the true epsilon is known (simulation only).
  std::optional<double> step(double x_prev, double y, double epsilon) noexcept {
    if (started_) sse_eps_.add(epsilon * epsilon);
    return step(x_prev, y);
  }

  double s_xx() const noexcept { return s_xx_.value(); }
  double s_xy() const noexcept { return s_xy_.value(); }
  double ape() const noexcept { return ape_.value(); }
  double sse_eps() const noexcept { return sse_eps_.value(); }
  std::size_t pairs() const noexcept { return pairs_; }
  std::size_t scored() const noexcept { return scored_; }

 private:
  CompensatedSum s_xx_;
  CompensatedSum s_xy_;
  CompensatedSum ape_;
  CompensatedSum sse_eps_;
  std::size_t pairs_ = 0;
  std::size_t scored_ = 0;
  bool started_ = false;
};

/// Per-path statistics at sample size n.
struct PathStats {
  std::size_t n = 0;
  double ape = 0.0;         ///< sum of scored (y_i - yhat_i)^2, i <= n
  double sse_eps = 0.0;     ///< sum of epsilon_i^2 over the same indices
  double excess_ape = 0.0;  ///< ape - sse_eps, accumulated termwise
  std::size_t scored_terms = 0;
  double beta_hat = 0.0;   ///< betahat_n
  double est_error = 0.0;  ///< betahat_n - beta
  double x_n = 0.0;
  double log_energy = 0.0;  ///< log sum_{j<n} x_j^2

  double fpe_stat() const noexcept {
    return static_cast<double>(n) * x_n * x_n * est_error * est_error;
  }
  double norm_est_sq() const noexcept {
    const double me = static_cast<double>(n) * est_error;
    return me * me;
  }
  double x_n_sq_over_n() const noexcept { return x_n * x_n / static_cast<double>(n); }
  double log_fisher_difference() const noexcept {
    return log_energy - 2.0 * std::log(static_cast<double>(n));
  }
};

/// Statistics at n = traj.n. Throws std::invalid_argument when n < 3 (fewer
/// than two usable pairs) and DegeneratePath when betahat_n is undefined.
PathStats run_path(const Trajectory& traj);

/// One pass over traj, reporting statistics at each checkpoint (strictly
/// increasing, each in [3, traj.n]). Each entry equals run_path on the prefix.
std::vector<PathStats> run_path_checkpoints(const Trajectory& traj, std::span<const std::size_t> checkpoints);

/// Per-term prediction errors y_i - yhat_i and the oracle form
/// epsilon_i - x_{i-1}(betahat_{i-1} - beta), i = 3..n. For identity checks.
struct PredictionTerms {
  std::vector<double> direct;
  std::vector<double> oracle;
};
PredictionTerms prediction_terms(const Trajectory& traj);

}  // namespace urlab
