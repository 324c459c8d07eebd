#include "fbmclt/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbmclt/errors.hpp"

namespace fbmclt {

Hurst::Hurst(double h) : h_(h), alpha_(h * (2.0 * h - 1.0)) {
  if (!(h > 0.5 && h < 1.0)) {
    throw ConfigError("Hurst index must lie in the open interval (1/2, 1), got " + std::to_string(h));
  }
}

double covariance_unchecked(double s, double t, double two_h) noexcept {
  const auto [lo, hi] = std::minmax(s, t);
  if (hi == 0.0) return 0.0;
  const double lo_p = std::pow(lo, two_h);
  const double hi_p = std::pow(hi, two_h);
  return 0.5 * (lo_p - hi_p * std::expm1(two_h * std::log1p(-lo / hi)));
}

double covariance(double s, double t, const Hurst& h) {
  if (!(s >= 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t)) {
    throw DomainError("covariance: times must be finite and non-negative");
  }
  return covariance_unchecked(s, t, 2.0 * h.value());
}

Eigen::MatrixXd covariance_matrix(const TimeGrid& grid, const Hurst& h) {
  const auto& p = grid.points();
  const Eigen::Index n = static_cast<Eigen::Index>(p.size()) - 1;
  const double two_h = 2.0 * h.value();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = covariance_unchecked(p[i + 1], p[j + 1], two_h);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

}  // namespace fbmclt
