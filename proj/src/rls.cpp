#include "urlab/rls.hpp"

#include <cmath>
#include <string>

#include "urlab/errors.hpp"

namespace urlab {

std::vector<PathStats> run_path_checkpoints(const Trajectory& traj, std::span<const std::size_t> checkpoints) {
  std::vector<PathStats> out;
  out.reserve(checkpoints.size());
  if (checkpoints.empty()) return out;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 3) throw std::invalid_argument("path too short: need n >= 3 for two usable pairs");
    if (checkpoints[k] > traj.n) throw std::invalid_argument("checkpoint beyond trajectory length");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) {
      throw std::invalid_argument("checkpoints must be strictly increasing");
    }
  }

  const double* x = traj.x.data();
  const double* y = traj.y.data();
  const double* eps = traj.epsilon.data();

  RlsState rls;
  // Sum x_i epsilon_{i+1}: betahat - beta without cancellation against beta.
  CompensatedSum s_xe;
  CompensatedSum excess;
  std::size_t next = 0;
  for (std::size_t i = 2; i <= checkpoints.back(); ++i) {
    const double xp = x[i - 1];
    if (rls.started()) {
      const double u = xp * (s_xe.value() / rls.s_xx());
      excess.add(u * u - 2.0 * eps[i] * u);
    }
    rls.step(xp, y[i], eps[i]);
    s_xe.add(xp * eps[i]);

    if (i == checkpoints[next]) {
      if (!rls.started()) throw DegeneratePath("betahat_n undefined: x_1..x_{n-1} all zero");
      PathStats s;
      s.n = i;
      s.ape = rls.ape();
      s.sse_eps = rls.sse_eps();
      s.excess_ape = excess.value();
      s.scored_terms = rls.scored();
      s.beta_hat = *rls.beta_hat();
      s.est_error = s_xe.value() / rls.s_xx();
      s.x_n = x[i];
      s.log_energy = std::log(rls.s_xx());
      out.push_back(s);
      ++next;
    }
  }
  return out;
}

PathStats run_path(const Trajectory& traj) {
  const std::size_t n = traj.n;
  return run_path_checkpoints(traj, std::span<const std::size_t>(&n, 1)).front();
}

PredictionTerms prediction_terms(const Trajectory& traj) {
  PredictionTerms out;
  RlsState rls;
  for (std::size_t i = 2; i <= traj.n; ++i) {
    const double xp = traj.x[i - 1];
    if (auto bh = rls.beta_hat()) {
      out.oracle.push_back(traj.epsilon[i] - xp * (*bh - traj.beta));
    }
    if (auto e = rls.step(xp, traj.y[i])) out.direct.push_back(*e);
  }
  return out;
}

}  // namespace urlab
