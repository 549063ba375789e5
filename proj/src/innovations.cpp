#include "urlab/innovations.hpp"

#include <cstdio>

#include "urlab/errors.hpp"

namespace urlab {

namespace {

// Relative slack for the Cauchy-Schwarz bound, so that pi = sigma * sigma_omega
// computed in floating point is still accepted as the fully correlated case.
constexpr double kCauchySchwarzSlack = 1e-12;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::gaussian:
      return "gaussian";
    case Family::laplace:
      return "laplace";
    case Family::uniform:
      return "uniform";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "laplace") return Family::laplace;
  if (name == "uniform") return Family::uniform;
  throw ConfigError("unknown innovation family '" + std::string(name) +
                    "' (expected gaussian, laplace or uniform)");
}

std::vector<std::string> validation_errors(const InnovationSpec& spec) {
  std::vector<std::string> out;
  if (!(spec.sigma_omega_sq > 0.0)) {
    out.push_back("sigma_omega_sq > 0 violated (got " + fmt_double(spec.sigma_omega_sq) + ")");
  }
  if (!(spec.sigma_sq > 0.0)) {
    out.push_back("sigma_sq > 0 violated (got " + fmt_double(spec.sigma_sq) + ")");
  }
  if (!std::isfinite(spec.pi)) {
    out.push_back("pi must be finite");
  } else if (out.empty()) {
    const double bound = spec.sigma_sq * spec.sigma_omega_sq;
    if (spec.pi * spec.pi > bound * (1.0 + kCauchySchwarzSlack)) {
      out.push_back("Cauchy-Schwarz violated: pi^2 <= sigma_sq * sigma_omega_sq required (pi^2 = " +
                    fmt_double(spec.pi * spec.pi) + ", bound = " + fmt_double(bound) + ")");
    }
  }
  return out;
}

void validate(const InnovationSpec& spec) {
  auto problems = validation_errors(spec);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

CorrelationStructure derived_correlation(const InnovationSpec& spec) {
  validate(spec);
  const double rho = spec.pi / spec.sigma_omega_sq;
  double sigma_theta_sq = spec.sigma_sq - rho * rho * spec.sigma_omega_sq;
  // Only reachable through the slack above.
  if (sigma_theta_sq < 0.0) sigma_theta_sq = 0.0;
  return {rho, sigma_theta_sq};
}

InnovationSampler::InnovationSampler(const InnovationSpec& spec)
    : spec_(spec), family_(spec.family) {
  const auto corr = derived_correlation(spec);
  sigma_omega_ = std::sqrt(spec.sigma_omega_sq);
  rho_ = corr.rho;
  sigma_theta_ = std::sqrt(corr.sigma_theta_sq);
}

InnovationPair draw_pair(Stream& stream, const InnovationSpec& spec) {
  return InnovationSampler(spec).draw(stream);
}

}  // namespace urlab
