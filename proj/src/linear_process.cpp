#include "urlab/linear_process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "urlab/errors.hpp"
#include "urlab/summation.hpp"

namespace urlab {

namespace {

constexpr double kMinAbsTheta = 1e-6;
constexpr std::size_t kEulerMaclaurinStart = 20;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Euler-Maclaurin for sum_{k>=N} k^{-p}; three correction terms leave an error
// of order N^{-p-7}, below 1e-16 relative for N >= 20.
double euler_maclaurin_tail(double p, double N) {
  const double np = std::pow(N, -p);
  double s = N * np / (p - 1.0) + 0.5 * np;
  s += p * np / (12.0 * N);
  s -= p * (p + 1.0) * (p + 2.0) * np / (720.0 * N * N * N);
  s += p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * np / (30240.0 * N * N * N * N * N);
  return s;
}

double closed_form_theta(const FilterFamily& family) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteFilter>) {
          return compensated_total(f.coeffs);
        } else if constexpr (std::is_same_v<T, GeometricFilter>) {
          return f.a / (1.0 - f.r);
        } else {
          return f.a * power_tail_sum(f.p, 1);
        }
      },
      family);
}

}  // namespace

double power_tail_sum(double p, std::size_t first) {
  if (!(p > 1.0)) throw std::invalid_argument("power_tail_sum requires p > 1");
  if (first == 0) throw std::invalid_argument("power_tail_sum requires first >= 1");
  if (first >= kEulerMaclaurinStart) return euler_maclaurin_tail(p, static_cast<double>(first));
  // Small terms first.
  double s = euler_maclaurin_tail(p, static_cast<double>(kEulerMaclaurinStart));
  for (std::size_t k = kEulerMaclaurinStart - 1; k >= first; --k) {
    s += std::pow(static_cast<double>(k), -p);
  }
  return s;
}

std::string filter_family_name(const FilterFamily& family) {
  switch (family.index()) {
    case 0:
      return "finite";
    case 1:
      return "geometric";
    default:
      return "polynomial";
  }
}

std::vector<std::string> validation_errors(const FilterSpec& spec) {
  std::vector<std::string> out;
  if (!(spec.tail_tol > 0.0)) out.push_back("tail_tol > 0 violated (got " + fmt_double(spec.tail_tol) + ")");

  bool summable = true;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteFilter>) {
          if (f.coeffs.empty()) {
            out.push_back("finite filter needs at least one coefficient");
            summable = false;
          }
          for (double c : f.coeffs) {
            if (!std::isfinite(c)) {
              out.push_back("finite filter coefficients must be finite");
              summable = false;
              break;
            }
          }
        } else if constexpr (std::is_same_v<T, GeometricFilter>) {
          if (!std::isfinite(f.a)) {
            out.push_back("geometric filter amplitude must be finite");
            summable = false;
          }
          if (!(std::fabs(f.r) < 1.0)) {
            out.push_back("filter not absolutely summable: geometric ratio needs |r| < 1 (got r = " +
                          fmt_double(f.r) + ")");
            summable = false;
          }
        } else {
          if (!std::isfinite(f.a)) {
            out.push_back("polynomial filter amplitude must be finite");
            summable = false;
          }
          if (!(f.p > 2.0)) {
            out.push_back("polynomial filter needs p > 2 so that sum_{j>=k} |c_j| = O(1/k) (got p = " +
                          fmt_double(f.p) + ")");
            summable = false;
          }
        }
      },
      spec.family);

  if (summable) {
    const double theta = closed_form_theta(spec.family);
    if (!(std::fabs(theta) >= kMinAbsTheta)) {
      out.push_back("filter sums to zero: |sum c_j| >= 1e-6 required (got " + fmt_double(theta) + ")");
    }
  }
  return out;
}

void validate(const FilterSpec& spec) {
  auto problems = validation_errors(spec);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::vector<double> MaterializedFilter::truncated_tails() const {
  std::vector<double> out(coeffs.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) {
    out[j] = acc;
    acc += coeffs[j];
  }
  return out;
}

MaterializedFilter materialize_filter(const FilterSpec& spec) {
  validate(spec);
  MaterializedFilter m;
  m.theta = closed_form_theta(spec.family);
  const double budget = spec.tail_tol * std::fabs(m.theta);

  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteFilter>) {
          const std::size_t K = f.coeffs.size() - 1;
          std::size_t L = std::min(spec.truncation_lag, K);
          auto abs_tail = [&](std::size_t lag) {
            CompensatedSum s;
            for (std::size_t j = lag + 1; j <= K; ++j) s.add(std::fabs(f.coeffs[j]));
            return s.value();
          };
          while (L < K && abs_tail(L) > budget) ++L;
          m.neglected_abs_tail = abs_tail(L);
          m.coeffs.assign(f.coeffs.begin(), f.coeffs.begin() + static_cast<std::ptrdiff_t>(L + 1));
          m.tails.assign(L + 1, 0.0);
          CompensatedSum acc;
          for (std::size_t j = K + 1; j-- > 0;) {
            if (j <= L) m.tails[j] = acc.value();
            acc.add(f.coeffs[j]);
          }
        } else if constexpr (std::is_same_v<T, GeometricFilter>) {
          const double ar = std::fabs(f.r);
          auto abs_tail = [&](std::size_t lag) {
            return std::fabs(f.a) * std::pow(ar, static_cast<double>(lag + 1)) / (1.0 - ar);
          };
          std::size_t L = spec.truncation_lag;
          while (abs_tail(L) > budget) ++L;
          m.neglected_abs_tail = abs_tail(L);
          m.coeffs.resize(L + 1);
          m.tails.resize(L + 1);
          for (std::size_t j = 0; j <= L; ++j) {
            const double rj = std::pow(f.r, static_cast<double>(j));
            m.coeffs[j] = f.a * rj;
            m.tails[j] = f.a * rj * f.r / (1.0 - f.r);
          }
        } else {
          auto abs_tail = [&](std::size_t lag) { return std::fabs(f.a) * power_tail_sum(f.p, lag + 2); };
          std::size_t lo = spec.truncation_lag;
          std::size_t L = std::max<std::size_t>(lo, 1);
          if (abs_tail(lo) <= budget) {
            L = lo;
          } else {
            while (abs_tail(L) > budget) {
              lo = L;
              L *= 2;
            }
            // abs_tail(lo) > budget >= abs_tail(L)
            while (L - lo > 1) {
              const std::size_t mid = lo + (L - lo) / 2;
              if (abs_tail(mid) > budget) {
                lo = mid;
              } else {
                L = mid;
              }
            }
          }
          m.neglected_abs_tail = abs_tail(L);
          m.coeffs.resize(L + 1);
          m.tails.resize(L + 1);
          for (std::size_t j = 0; j <= L; ++j) m.coeffs[j] = f.a * std::pow(static_cast<double>(j + 1), -f.p);
          m.tails[L] = f.a * power_tail_sum(f.p, L + 2);
          for (std::size_t j = L; j-- > 0;) m.tails[j] = m.tails[j + 1] + m.coeffs[j + 1];
        }
      },
      spec.family);

  m.partial_sums.resize(m.coeffs.size());
  CompensatedSum acc;
  for (std::size_t j = 0; j < m.coeffs.size(); ++j) {
    acc.add(m.coeffs[j]);
    m.partial_sums[j] = acc.value();
  }
  return m;
}

std::size_t stationary_burn_in(double varsigma) {
  if (!(std::fabs(varsigma) < 1.0)) throw ConfigError("stationary coefficient must satisfy |varsigma| < 1");
  return 10 * static_cast<std::size_t>(std::ceil(1.0 / (1.0 - std::fabs(varsigma))));
}

void generate_path(const MaterializedFilter& filter, const InnovationSampler& innovations, double beta,
                   std::size_t n, Stream& stream, Trajectory& out, const PathOptions& options) {
  if (n < 2) throw std::invalid_argument("generate_path requires n >= 2");
  const std::size_t B = options.burn_in;
  const std::size_t T = B + n;

  out.n = n;
  out.beta = beta;
  out.varsigma = options.varsigma;
  out.burn_in = B;
  out.omega.assign(n + 1, 0.0);
  out.eta.assign(n + 1, 0.0);
  out.x.assign(n + 1, 0.0);
  out.epsilon.assign(n + 2, 0.0);
  out.y.assign(n + 2, 0.0);

  // Global-time buffers; with no burn-in they alias the output arrays.
  std::vector<double> omega_presample;
  std::vector<double> epsilon_presample;
  double* om = out.omega.data();
  double* ep = out.epsilon.data();
  if (B > 0) {
    omega_presample.assign(T + 1, 0.0);
    epsilon_presample.assign(T + 2, 0.0);
    om = omega_presample.data();
    ep = epsilon_presample.data();
  }

  for (std::size_t t = 1; t <= T + 1; ++t) {
    const InnovationPair pair = innovations.draw(stream);
    if (t <= T) om[t] = pair.omega;
    if (t >= 2) ep[t] = pair.epsilon;
  }

  const std::span<const double> c(filter.coeffs);
  const std::size_t L = filter.lag();
  const double varsigma = options.varsigma;
  double x_prev = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    double eta;
    if (L == 0) {
      eta = c[0] * om[t];
    } else {
      const std::size_t lags = std::min(t - 1, L);
      eta = 0.0;
      for (std::size_t j = 0; j <= lags; ++j) eta += c[j] * om[t - j];
    }
    const double x = varsigma * x_prev + eta;
    if (t == B) out.x[0] = x;
    if (t > B) {
      out.eta[t - B] = eta;
      out.x[t - B] = x;
    }
    x_prev = x;
  }

  if (B > 0) {
    for (std::size_t s = 1; s <= n; ++s) out.omega[s] = om[s + B];
    for (std::size_t s = 2; s <= n + 1; ++s) out.epsilon[s] = ep[s + B];
  }
  for (std::size_t s = 2; s <= n + 1; ++s) out.y[s] = beta * out.x[s - 1] + out.epsilon[s];
}

Trajectory generate_path(const MaterializedFilter& filter, const InnovationSampler& innovations, double beta,
                         std::size_t n, Stream& stream, const PathOptions& options) {
  Trajectory traj;
  generate_path(filter, innovations, beta, n, stream, traj, options);
  return traj;
}

Decomposition decompose(const Trajectory& traj, const MaterializedFilter& filter) {
  if (!traj.unit_root()) throw std::invalid_argument("decompose requires a unit-root path without burn-in");
  const std::size_t n = traj.n;
  const double theta = filter.truncated_theta();
  const std::vector<double> f = filter.truncated_tails();
  const std::size_t L = filter.lag();

  Decomposition d;
  d.N.assign(n + 1, 0.0);
  d.S.assign(n + 1, 0.0);
  CompensatedSum walk;
  double scale = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    walk.add(traj.omega[t]);
    d.N[t] = theta * walk.value();
    double s = 0.0;
    // f_j vanishes for j >= L.
    const std::size_t lags = std::min(t, L);
    for (std::size_t j = 0; j < lags; ++j) s += f[j] * traj.omega[t - j];
    d.S[t] = s;
    d.max_residual = std::max(d.max_residual, std::fabs(d.N[t] - d.S[t] - traj.x[t]));
    scale = std::max(scale, std::fabs(traj.x[t]));
  }
  if (d.max_residual > 1e-9 * std::max(scale, 1.0)) {
    throw InternalError("decomposition residual " + fmt_double(d.max_residual) +
                        " exceeds tolerance; filter does not match trajectory");
  }
  return d;
}

std::vector<double> moving_average(std::span<const double> omega, std::span<const double> d) {
  std::vector<double> z(omega.size(), 0.0);
  for (std::size_t t = 0; t < omega.size(); ++t) {
    const std::size_t lags = std::min(t, d.size() - 1);
    double s = 0.0;
    for (std::size_t j = 0; j <= lags; ++j) s += d[j] * omega[t - j];
    z[t] = s;
  }
  return z;
}

double strong_law_diagnostic(std::span<const double> z, std::span<const double> d, double sigma_omega_sq) {
  if (z.empty()) throw std::invalid_argument("strong_law_diagnostic needs a non-empty series");
  CompensatedSum gamma_acc;
  CompensatedSum total;
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (t < d.size()) gamma_acc.add(d[t] * d[t]);
    const double gamma = sigma_omega_sq * gamma_acc.value();
    total.add(z[t] * z[t] - gamma);
  }
  return total.value() / static_cast<double>(z.size());
}

LogFisher log_fisher_diagnostic(std::span<const double> x) {
  if (x.size() < 4) throw std::invalid_argument("log_fisher_diagnostic requires n >= 3");
  const std::size_t n = x.size() - 1;
  CompensatedSum energy;
  for (std::size_t j = 1; j <= n - 1; ++j) energy.add(x[j] * x[j]);
  if (!(energy.value() > 0.0)) throw DegeneratePath("sum of x_j^2 is zero");
  LogFisher out;
  out.log_energy = std::log(energy.value());
  out.two_log_n = 2.0 * std::log(static_cast<double>(n));
  out.difference = out.log_energy - out.two_log_n;
  return out;
}

LogFisher log_fisher_diagnostic(const Trajectory& traj) { return log_fisher_diagnostic(std::span(traj.x)); }

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,omega,epsilon,eta,x,y\n";
  char buf[40];
  auto put = [&](bool present, double v) {
    os << ',';
    if (present) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
    }
  };
  for (std::size_t t = 0; t <= traj.n + 1; ++t) {
    os << t;
    const bool in_body = t >= 1 && t <= traj.n;
    const bool in_output = t >= 2;
    put(in_body, in_body ? traj.omega[t] : 0.0);
    put(in_output, in_output ? traj.epsilon[t] : 0.0);
    put(in_body, in_body ? traj.eta[t] : 0.0);
    put(t <= traj.n, t <= traj.n ? traj.x[t] : 0.0);
    put(in_output, in_output ? traj.y[t] : 0.0);
    os << '\n';
  }
}

}  // namespace urlab
