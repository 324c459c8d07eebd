#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbmclt {

double normal_cdf(double x);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
/// Uses 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2) for lambda >= 1.18 and the
/// theta-function form of the CDF below that.
double kolmogorov_survival(double lambda);

/// D such that P(sqrt(n) D_n > sqrt(n) D) = alpha asymptotically.
double ks_critical_value(std::size_t n, double alpha);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS test against N(0,1); p from the asymptotic Kolmogorov law
/// with lambda = sqrt(n) D. Throws DomainError for fewer than 8 samples.
KsResult ks_normal(std::span<const double> samples);

/// Two-sample KS test; lambda = sqrt(nm/(n+m)) D. Same size requirement.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct GapResult {
  double gap = 0.0;  // m4 - 3 m2^2 with raw moments about 0
  double se = 0.0;   // delta method
};

/// Throws DomainError for fewer than 8 samples.
GapResult fourth_moment_gap(std::span<const double> samples);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct MomentSummary {
  Estimate mean;
  Estimate var;          // unbiased sample variance
  Estimate second_raw;   // mean of x^2
  Estimate fourth_raw;   // mean of x^4
  GapResult gap;
};

MomentSummary summarize_moments(std::span<const double> x);

/// Sample covariance with an influence-function standard error.
Estimate sample_covariance(std::span<const double> x, std::span<const double> y);

/// cov(x, y) / var(x) with a delta-method standard error.
Estimate covariance_ratio(std::span<const double> x, std::span<const double> y);

/// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fbmclt
