#pragma once

#include <Eigen/Core>

#include "fbmclt/grid.hpp"
#include "fbmclt/hurst.hpp"

namespace fbmclt {

/// fBm covariance R(s,t) = (s^2H + t^2H - |s-t|^2H) / 2.
///
/// Evaluated as (lo^2H - hi^2H * expm1(2H log1p(-lo/hi))) / 2 with lo <= hi,
/// which is symmetric bit for bit and free of cancellation when lo << hi.
/// Throws DomainError for negative or non-finite times.
double covariance(double s, double t, const Hurst& h);

/// Same kernel without argument validation; for inner loops whose arguments
/// are non-negative by construction.
double covariance_unchecked(double s, double t, double two_h) noexcept;

/// Covariance of the grid values at points[1..n-1] (the t = 0 row is dropped
/// because B_0 = 0 identically).
Eigen::MatrixXd covariance_matrix(const TimeGrid& grid, const Hurst& h);

}  // namespace fbmclt
