#include "fbmclt/grid.hpp"

#include <algorithm>
#include <cmath>

#include "fbmclt/errors.hpp"

namespace fbmclt {

namespace {
constexpr double kSnapTol = 1e-12;
}

std::string to_string(Spacing s) { return s == Spacing::uniform ? "uniform" : "geometric"; }

TimeGrid::TimeGrid(std::vector<double> points, Spacing spacing)
    : points_(std::move(points)), spacing_(spacing) {
  if (points_.size() < 2) throw ConfigError("time grid needs at least 2 points");
  if (points_.front() != 0.0) throw ConfigError("time grid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw ConfigError("time grid points must be finite");
    if (!(points_[i] > points_[i - 1])) {
      throw ConfigError("time grid points must be strictly increasing (duplicate or unordered time at index " +
                        std::to_string(i) + ")");
    }
  }
}

TimeGrid TimeGrid::uniform(double t_end, std::size_t n_intervals) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("uniform grid: t_end must be positive");
  if (n_intervals < 1) throw ConfigError("uniform grid: need at least one interval");
  std::vector<double> p(n_intervals + 1);
  for (std::size_t i = 0; i <= n_intervals; ++i) p[i] = t_end * static_cast<double>(i) / static_cast<double>(n_intervals);
  return TimeGrid(std::move(p), Spacing::uniform);
}

TimeGrid TimeGrid::geometric(double k, double t_max, std::size_t n_intervals, std::size_t warmup) {
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("geometric grid: base k must be > 1");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("geometric grid: t_max must be positive");
  if (n_intervals < 1 || warmup < 1) throw ConfigError("geometric grid: need at least one interval per segment");
  std::vector<double> p;
  p.reserve(warmup + n_intervals + 1);
  for (std::size_t i = 0; i < warmup; ++i) p.push_back(static_cast<double>(i) / static_cast<double>(warmup));
  const double log_k = std::log(k);
  for (std::size_t i = 0; i <= n_intervals; ++i) {
    p.push_back(std::exp(log_k * (t_max * static_cast<double>(i) / static_cast<double>(n_intervals))));
  }
  return TimeGrid(std::move(p), Spacing::geometric);
}

TimeGrid TimeGrid::from_points(std::vector<double> points, Spacing spacing) {
  return TimeGrid(std::move(points), spacing);
}

std::size_t TimeGrid::index_at_or_below(double t) const {
  const double bound = t * (1.0 + kSnapTol);
  auto it = std::upper_bound(points_.begin(), points_.end(), bound);
  if (it == points_.begin()) throw DomainError("time lies before the start of the grid");
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

std::size_t TimeGrid::index_at_or_above(double t) const {
  const double bound = t * (1.0 - kSnapTol);
  auto it = std::lower_bound(points_.begin(), points_.end(), bound);
  if (it == points_.end()) throw DomainError("time lies beyond the end of the grid");
  return static_cast<std::size_t>(it - points_.begin());
}

}  // namespace fbmclt
