#include "urlab/brownian.hpp"

#include <cmath>
#include <stdexcept>

#include "urlab/errors.hpp"
#include "urlab/parallel.hpp"

namespace urlab {

namespace {

constexpr double kMinTimeIntegral = 1e-12;
constexpr int kMaxResamples = 16;

using Normal = boost::random::normal_distribution<double>;

// Fresh role for the k-th resample of replication r.
std::uint32_t resample_role(StreamRole base, int attempt) {
  return static_cast<std::uint32_t>(StreamRole::resample_base) + 2u * static_cast<std::uint32_t>(attempt) +
         (base == StreamRole::brownian_b ? 1u : 0u);
}

template <class Sampler>
FunctionalSample draw_valid(std::uint64_t seed, std::size_t rep, Sampler&& sampler) {
  Stream sa(seed, rep, StreamRole::brownian_a);
  Stream sb(seed, rep, StreamRole::brownian_b);
  FunctionalSample f = sampler(sa, sb);
  for (int attempt = 0; f.time_sq < kMinTimeIntegral; ++attempt) {
    if (attempt == kMaxResamples) throw DegeneratePath("repeated vanishing int w^2 dt");
    Stream ra(seed, rep, resample_role(StreamRole::brownian_a, attempt));
    Stream rb(seed, rep, resample_role(StreamRole::brownian_b, attempt));
    f = sampler(ra, rb);
  }
  return f;
}

struct Columns {
  std::vector<double> k1, k2, fpe_aa, fpe_ab, fpe_cross;

  explicit Columns(std::size_t n) : k1(n), k2(n), fpe_aa(n), fpe_ab(n), fpe_cross(n) {}

  void set(std::size_t i, const FunctionalSample& f) {
    const double inv_t = 1.0 / f.time_sq;
    const double w2 = f.w_end * f.w_end * inv_t * inv_t;
    k1[i] = f.ito_aa * f.ito_aa * inv_t * inv_t;
    k2[i] = inv_t;
    fpe_aa[i] = w2 * f.ito_aa * f.ito_aa;
    fpe_ab[i] = w2 * f.ito_ab * f.ito_ab;
    fpe_cross[i] = w2 * f.ito_aa * f.ito_ab;
  }
};

std::vector<NamedEstimate> summarize(const Columns& c, const ConstantsConfig& cfg, std::size_t m) {
  std::vector<NamedEstimate> out;
  auto add = [&](const char* name, const std::vector<double>& v) {
    const MeanEstimate e = batch_mean_estimate(v, cfg.batches);
    out.push_back({name, e.mean, e.se, m, cfg.reps, cfg.base_seed});
  };
  add("K1", c.k1);
  add("K2", c.k2);
  if (cfg.with_cross) {
    add("fpe_aa", c.fpe_aa);
    add("fpe_ab", c.fpe_ab);
    add("fpe_cross", c.fpe_cross);
  }
  return out;
}

}  // namespace

BmPath generate_bm_path(std::size_t m, Stream& stream_a, Stream& stream_b) {
  if (m < 1) throw std::invalid_argument("Brownian grid needs m >= 1");
  BmPath p;
  p.m = m;
  p.inc_a.resize(m);
  p.inc_b.resize(m);
  p.level_a.assign(m + 1, 0.0);
  p.level_b.assign(m + 1, 0.0);
  const double scale = std::sqrt(1.0 / static_cast<double>(m));
  Normal normal;
  for (std::size_t k = 0; k < m; ++k) {
    p.inc_a[k] = scale * normal(stream_a);
    p.inc_b[k] = scale * normal(stream_b);
    p.level_a[k + 1] = p.level_a[k] + p.inc_a[k];
    p.level_b[k + 1] = p.level_b[k] + p.inc_b[k];
  }
  return p;
}

double ito_integral(std::span<const double> levels, std::span<const double> increments) {
  if (levels.size() != increments.size() + 1) {
    throw std::invalid_argument("ito_integral: levels must have one more entry than increments");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < increments.size(); ++k) s += levels[k] * increments[k];
  return s;
}

double time_integral_sq(std::span<const double> levels) {
  if (levels.size() < 2) throw std::invalid_argument("time_integral_sq needs m >= 1");
  const std::size_t m = levels.size() - 1;
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) s += levels[k] * levels[k];
  return s / static_cast<double>(m);
}

FunctionalSample functionals(const BmPath& path) {
  return {path.level_a.back(), ito_integral(path.level_a, path.inc_a), ito_integral(path.level_a, path.inc_b),
          time_integral_sq(path.level_a)};
}

FunctionalSample sample_functionals(std::size_t m, Stream& stream_a, Stream& stream_b, bool with_cross) {
  if (m < 1) throw std::invalid_argument("Brownian grid needs m >= 1");
  const double scale = std::sqrt(1.0 / static_cast<double>(m));
  Normal normal;
  double w = 0.0, aa = 0.0, ab = 0.0, tt = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double da = scale * normal(stream_a);
    if (with_cross) ab += w * scale * normal(stream_b);
    aa += w * da;
    tt += w * w;
    w += da;
  }
  return {w, aa, ab, tt / static_cast<double>(m)};
}

RefinedSample sample_functionals_refined(std::size_t m, Stream& stream_a, Stream& stream_b, bool with_cross) {
  if (m < 1) throw std::invalid_argument("Brownian grid needs m >= 1");
  const double scale = std::sqrt(0.5 / static_cast<double>(m));
  Normal normal;
  double w = 0.0;
  FunctionalSample fine, coarse;
  for (std::size_t k = 0; k < m; ++k) {
    const double w_start = w;
    double da_sum = 0.0, db_sum = 0.0;
    for (int half = 0; half < 2; ++half) {
      const double da = scale * normal(stream_a);
      const double db = with_cross ? scale * normal(stream_b) : 0.0;
      fine.ito_aa += w * da;
      fine.ito_ab += w * db;
      fine.time_sq += w * w;
      w += da;
      da_sum += da;
      db_sum += db;
    }
    coarse.ito_aa += w_start * da_sum;
    coarse.ito_ab += w_start * db_sum;
    coarse.time_sq += w_start * w_start;
  }
  fine.w_end = coarse.w_end = w;
  fine.time_sq /= static_cast<double>(2 * m);
  coarse.time_sq /= static_cast<double>(m);
  return {coarse, fine};
}

LimitParams make_limit_params(const InnovationSpec& innovations, const MaterializedFilter& filter) {
  const CorrelationStructure c = derived_correlation(innovations);
  LimitParams p;
  p.rho = c.rho;
  p.sigma_omega = std::sqrt(innovations.sigma_omega_sq);
  p.sigma_theta = std::sqrt(c.sigma_theta_sq);
  p.sigma = std::sqrt(innovations.sigma_sq);
  p.lambda = filter.lambda(p.sigma_omega);
  p.iota_sq = p.lambda * p.lambda / innovations.sigma_omega_sq;
  return p;
}

void validate(const LimitParams& p) {
  std::vector<std::string> problems;
  if (!(p.sigma_omega > 0.0)) problems.emplace_back("sigma_omega > 0 violated");
  if (!(p.sigma_theta >= 0.0)) problems.emplace_back("sigma_theta >= 0 violated");
  if (!(p.iota_sq > 0.0)) problems.emplace_back("iota^2 > 0 violated (filter sums to zero)");
  if (problems.empty()) {
    const double st2 = p.sigma * p.sigma - p.rho * p.rho * p.sigma_omega * p.sigma_omega;
    if (std::fabs(st2 - p.sigma_theta * p.sigma_theta) > 1e-9 * std::max(1.0, p.sigma * p.sigma)) {
      problems.emplace_back("sigma_theta^2 = sigma^2 - rho^2 sigma_omega^2 violated");
    }
    const double i2 = p.lambda * p.lambda / (p.sigma_omega * p.sigma_omega);
    if (std::fabs(i2 - p.iota_sq) > 1e-9 * std::max(1.0, p.iota_sq)) {
      problems.emplace_back("iota^2 = lambda^2 / sigma_omega^2 violated");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

LimitDraw limit_sample(const FunctionalSample& f, const LimitParams& p) {
  if (!(f.time_sq >= kMinTimeIntegral)) throw DegeneratePath("int w^2 dt below 1e-12; resample the path");
  const double numer = p.rho * p.sigma_omega * f.ito_aa + p.sigma_theta * f.ito_ab;
  const double ratio_sq = numer * numer / (f.time_sq * f.time_sq);
  return {f.w_end * f.w_end * ratio_sq, ratio_sq / (p.lambda * p.lambda)};
}

LimitDraw limit_sample(const BmPath& path, const LimitParams& p) { return limit_sample(functionals(path), p); }

double mse_limit_formula(const LimitParams& p, double k1, double k2) {
  if (!(p.iota_sq > 0.0)) throw ConfigError("iota^2 > 0 violated (filter sums to zero)");
  return p.rho * p.rho / p.iota_sq * k1 +
         p.sigma_theta * p.sigma_theta / (p.iota_sq * p.sigma_omega * p.sigma_omega) * k2;
}

const NamedEstimate& ConstantsReport::get(const std::string& name) const {
  for (const auto& e : estimates) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("no estimate named " + name);
}

ConstantsReport estimate_constants(const ConstantsConfig& cfg) {
  if (cfg.m < 2) throw ConfigError("Brownian grid needs m >= 2");
  if (cfg.reps < 2 * cfg.batches) throw ConfigError("reps must be at least twice the batch count");

  ConstantsReport report;
  report.samples.resize(cfg.reps);
  std::vector<FunctionalSample> fine;
  if (cfg.refine) fine.resize(cfg.reps);

  parallel_for(cfg.reps, cfg.workers, [&](std::size_t r) {
    if (cfg.refine) {
      RefinedSample rs;
      report.samples[r] = draw_valid(cfg.base_seed, r, [&](Stream& a, Stream& b) {
        rs = sample_functionals_refined(cfg.m, a, b, cfg.with_cross);
        // Resample unless both grids are usable.
        FunctionalSample c = rs.coarse;
        if (rs.fine.time_sq < kMinTimeIntegral) c.time_sq = 0.0;
        return c;
      });
      fine[r] = rs.fine;
    } else {
      report.samples[r] = draw_valid(cfg.base_seed, r, [&](Stream& a, Stream& b) {
        return sample_functionals(cfg.m, a, b, cfg.with_cross);
      });
    }
  });

  Columns coarse(cfg.reps);
  for (std::size_t r = 0; r < cfg.reps; ++r) coarse.set(r, report.samples[r]);
  report.estimates = summarize(coarse, cfg, cfg.m);
  if (cfg.refine) {
    Columns f(cfg.reps);
    for (std::size_t r = 0; r < cfg.reps; ++r) f.set(r, fine[r]);
    report.refined = summarize(f, cfg, 2 * cfg.m);
  }
  return report;
}

MeanEstimate fpe_functional_mean(std::span<const FunctionalSample> samples, const LimitParams& p,
                                 std::size_t batches) {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = limit_sample(samples[i], p).fpe_limit_draw;
  return batch_mean_estimate(v, batches);
}

std::vector<LimitDraw> limit_draws(const LimitParams& p, std::size_t m, std::size_t count, std::uint64_t seed,
                                   unsigned workers) {
  validate(p);
  const bool cross = p.sigma_theta > 0.0;
  std::vector<LimitDraw> out(count);
  parallel_for(count, workers, [&](std::size_t r) {
    const FunctionalSample f =
        draw_valid(seed, r, [&](Stream& a, Stream& b) { return sample_functionals(m, a, b, cross); });
    out[r] = limit_sample(f, p);
  });
  return out;
}

}  // namespace urlab
