#include "urlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urlab/summation.hpp"

namespace urlab {

namespace {

double mean_of(std::span<const double> v) { return compensated_total(v) / static_cast<double>(v.size()); }

// Standard error of the mean of an influence-function sample.
double influence_se(std::span<const double> psi) {
  const std::size_t n = psi.size();
  const double m = mean_of(psi);
  CompensatedSum ss;
  for (double p : psi) ss.add((p - m) * (p - m));
  return std::sqrt(ss.value() / static_cast<double>(n - 1) / static_cast<double>(n));
}

void require_paired(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples must have equal length");
  if (a.size() < 2) throw std::invalid_argument("need at least two samples");
}

}  // namespace

MeanEstimate mean_estimate(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("mean_estimate needs at least two values");
  return {mean_of(values), influence_se(values), values.size()};
}

MeanEstimate batch_mean_estimate(std::span<const double> values, std::size_t batches) {
  if (batches < 2 || values.size() < batches) {
    throw std::invalid_argument("batch_mean_estimate needs at least two non-empty batches");
  }
  const std::size_t per = values.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean_of(values.subspan(b * per, per));
  MeanEstimate out;
  out.mean = mean_of(values);
  out.se = influence_se(means);
  out.count = values.size();
  return out;
}

CorrelationEstimate sample_correlation(std::span<const double> a, std::span<const double> b) {
  require_paired(a, b);
  const std::size_t n = a.size();
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  CompensatedSum saa, sbb, sab;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa.add(da * da);
    sbb.add(db * db);
    sab.add(da * db);
  }
  const double sa = std::sqrt(saa.value() / static_cast<double>(n));
  const double sb = std::sqrt(sbb.value() / static_cast<double>(n));
  if (!(sa > 0.0) || !(sb > 0.0)) throw std::invalid_argument("correlation undefined for a constant sample");
  CorrelationEstimate out;
  out.corr = sab.value() / static_cast<double>(n) / (sa * sb);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double za = (a[i] - ma) / sa;
    const double zb = (b[i] - mb) / sb;
    psi[i] = za * zb - 0.5 * out.corr * (za * za + zb * zb);
  }
  out.se = influence_se(psi);
  return out;
}

ProductContrast product_contrast(std::span<const double> a, std::span<const double> b) {
  require_paired(a, b);
  const std::size_t n = a.size();
  std::vector<double> ab(n);
  for (std::size_t i = 0; i < n; ++i) ab[i] = a[i] * b[i];
  ProductContrast out;
  out.joint = mean_estimate(ab);
  out.marg_a = mean_estimate(a);
  out.marg_b = mean_estimate(b);
  const double ma = out.marg_a.mean;
  const double mb = out.marg_b.mean;
  out.product = ma * mb;
  out.difference = out.joint.mean - out.product;

  std::vector<double> psi_prod(n);
  std::vector<double> psi_diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lin = mb * (a[i] - ma) + ma * (b[i] - mb);
    psi_prod[i] = lin;
    psi_diff[i] = ab[i] - lin;
  }
  out.product_se = influence_se(psi_prod);
  out.difference_se = influence_se(psi_diff);
  return out;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  const double mx = mean_of(x);
  const double my = mean_of(y);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("ols_slope needs at least two distinct x values");
  return sxy.value() / sxx.value();
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace urlab
