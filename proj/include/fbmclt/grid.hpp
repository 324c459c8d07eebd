#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fbmclt {

enum class Spacing { uniform, geometric };

std::string to_string(Spacing s);

/// Strictly increasing sampling times starting at 0.
class TimeGrid {
 public:
  /// n_intervals equal steps on [0, t_end].
  static TimeGrid uniform(double t_end, std::size_t n_intervals);

  /// Warm-up of `warmup` equal steps on [0, 1], then
  /// exp(log_k * t_max * i / n_intervals) for i = 0..n_intervals, i.e. a
  /// log-uniform mesh of [1, k^t_max]. Checkpoints t that are multiples of
  /// t_max / n_intervals land on grid points.
  static TimeGrid geometric(double k, double t_max, std::size_t n_intervals, std::size_t warmup = 16);

  /// Arbitrary points; validated (first point 0, finite, strictly increasing, >= 2 points).
  static TimeGrid from_points(std::vector<double> points, Spacing spacing);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double back() const noexcept { return points_.back(); }
  Spacing spacing() const noexcept { return spacing_; }

  /// Largest index i with points[i] <= t (relative tolerance 1e-12 in t).
  std::size_t index_at_or_below(double t) const;
  /// Smallest index i with points[i] >= t (same tolerance).
  std::size_t index_at_or_above(double t) const;

 private:
  TimeGrid(std::vector<double> points, Spacing spacing);
  std::vector<double> points_;
  Spacing spacing_;
};

}  // namespace fbmclt
