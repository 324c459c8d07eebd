#include "fbmclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbmclt/errors.hpp"

namespace fbmclt {

namespace {

constexpr std::size_t kMinSamples = 8;

void require_size(std::size_t n, const char* what) {
  if (n < kMinSamples) throw DomainError(std::string(what) + ": need at least 8 samples");
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Standard error of the mean of the values produced by f(i), i < n.
template <class F>
double se_of(std::size_t n, F&& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += f(i);
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = f(i) - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi)/l sum_j exp(-(2j-1)^2 pi^2 / (8 l^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double term = std::exp(-(2.0 * j - 1.0) * (2.0 * j - 1.0) * c);
      s += term;
      if (term < 1e-18) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical_value: need n > 0 and 0 < alpha < 1");
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

KsResult ks_normal(std::span<const double> samples) {
  require_size(samples.size(), "ks_normal");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i]);
    const double upper = static_cast<double>(i + 1) / n - f;
    const double lower = f - static_cast<double>(i) / n;
    d = std::max({d, upper, lower});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_size(a.size(), "ks_two_sample");
  require_size(b.size(), "ks_two_sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {d, kolmogorov_survival(std::sqrt(n * m / (n + m)) * d)};
}

GapResult fourth_moment_gap(std::span<const double> samples) {
  require_size(samples.size(), "fourth_moment_gap");
  const std::size_t n = samples.size();
  double m2 = 0.0, m4 = 0.0;
  for (double v : samples) {
    const double v2 = v * v;
    m2 += v2;
    m4 += v2 * v2;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  // Influence of one draw on m4 - 3 m2^2 is x^4 - 6 m2 x^2 (up to a constant).
  const double se = se_of(n, [&](std::size_t i) {
    const double v2 = samples[i] * samples[i];
    return v2 * v2 - 6.0 * m2 * v2;
  });
  return {m4 - 3.0 * m2 * m2, se};
}

MomentSummary summarize_moments(std::span<const double> x) {
  require_size(x.size(), "summarize_moments");
  const std::size_t n = x.size();
  MomentSummary s;
  const double mu = mean_of(x);
  double ss = 0.0, m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    ss += (v - mu) * (v - mu);
    m2 += v * v;
    m4 += v * v * v * v;
  }
  const double var = ss / static_cast<double>(n - 1);
  s.mean = {mu, std::sqrt(var / static_cast<double>(n))};
  s.var = {var, se_of(n, [&](std::size_t i) { return (x[i] - mu) * (x[i] - mu); })};
  s.second_raw = {m2 / static_cast<double>(n), se_of(n, [&](std::size_t i) { return x[i] * x[i]; })};
  s.fourth_raw = {m4 / static_cast<double>(n), se_of(n, [&](std::size_t i) {
                    const double v2 = x[i] * x[i];
                    return v2 * v2;
                  })};
  s.gap = fourth_moment_gap(x);
  return s;
}

Estimate sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("sample_covariance: length mismatch");
  require_size(x.size(), "sample_covariance");
  const std::size_t n = x.size();
  const double mx = mean_of(x), my = mean_of(y);
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) c += (x[i] - mx) * (y[i] - my);
  c /= static_cast<double>(n - 1);
  return {c, se_of(n, [&](std::size_t i) { return (x[i] - mx) * (y[i] - my); })};
}

Estimate covariance_ratio(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("covariance_ratio: length mismatch");
  require_size(x.size(), "covariance_ratio");
  const std::size_t n = x.size();
  const double mx = mean_of(x), my = mean_of(y);
  double c = 0.0, v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c += (x[i] - mx) * (y[i] - my);
    v += (x[i] - mx) * (x[i] - mx);
  }
  c /= static_cast<double>(n - 1);
  v /= static_cast<double>(n - 1);
  const double ratio = c / v;
  const double se = se_of(n, [&](std::size_t i) {
    const double dx = x[i] - mx;
    return dx * (y[i] - my) / v - ratio * dx * dx / v;
  });
  return {ratio, se};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("ols_slope: need two or more paired points");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("ols_slope: all abscissae are equal");
  return sxy / sxx;
}

}  // namespace fbmclt
