#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fbmclt/grid.hpp"
#include "fbmclt/hurst.hpp"
#include "fbmclt/sampler.hpp"

namespace fbmclt {

enum class Scheme { left_point, trapezoid };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct IterConfig {
  int q = 2;
  Hurst h{0.75};
  double k = 10.0;
  std::vector<double> checkpoints{1.0};  // t values, strictly increasing, > 0
  Scheme scheme = Scheme::left_point;
  /// levels[l] is the path component driving integration level l + 1.
  /// Empty means the identity assignment.
  std::vector<int> levels;

  /// Throws ConfigError on q < 2, k <= 1, bad checkpoints or a levels vector
  /// that is not a list of distinct component indices.
  void validate() const;
};

struct IterIntegralEstimate {
  IterConfig config;
  std::vector<double> y_values;           // Y_{k^t}, one per checkpoint
  std::vector<double> x_values;           // Y_{k^t} / sqrt(log k)
  std::vector<std::size_t> snapped_index; // grid index used for k^t
  std::vector<double> snap_error;         // (k^t - s_snapped) / k^t, >= 0
};

/// Precomputed per-grid data of the nested sum: start index (time 1),
/// checkpoint indices and outer weights s^{-qH}. Built once per experiment
/// and shared read-only by all replications.
class IterPlan {
 public:
  IterPlan(const TimeGrid& grid, const IterConfig& cfg);

  const IterConfig& config() const noexcept { return cfg_; }
  std::size_t start() const noexcept { return start_; }
  const std::vector<std::size_t>& stops() const noexcept { return stops_; }
  const std::vector<double>& snap_errors() const noexcept { return snap_error_; }
  /// Number of components a path set needs (max level index + 1).
  int components_needed() const noexcept { return needed_; }

  /// Evaluates Y at every checkpoint. comps[c] points to the grid values of
  /// component c. Cost O(n q). `y` must have room for one value per checkpoint.
  void evaluate(const double* const* comps, double* y) const;

 private:
  IterConfig cfg_;
  std::vector<int> levels_;
  std::size_t start_ = 0;
  std::vector<std::size_t> stops_;
  std::vector<double> snap_error_;
  std::vector<double> weight_;  // s_m^{-qH}
  int needed_ = 0;
};

/// Nested left-point (or trapezoid) Riemann sum of
///   int_1^{k^t} int_1^{s_q} ... int_1^{s_2} s_q^{-qH} dB^1 ... dB^q
/// at every checkpoint. Throws ConfigError if paths.d < q, DomainError if
/// the grid does not reach k^{max t}.
IterIntegralEstimate iterated_integral(const FbmPathSet& paths, const IterConfig& cfg);

enum class Winding { Z, Zprime };

struct WindingTerms {
  double z = 0.0;        // int_1^t (B2 dB1 - B1 dB2) / s^2H
  double term_21 = 0.0;  // int_1^t int_1^s dB2 dB1 / s^2H
  double term_12 = 0.0;  // int_1^t int_1^s dB1 dB2 / s^2H
  double zprime() const noexcept { return term_21 - term_12; }
};

/// Planar winding functionals from components 0 and 1 over [1, t_end].
/// Computed over raw arrays so experiments can skip building path sets.
WindingTerms winding_terms(const TimeGrid& grid, const double* b1, const double* b2, const Hurst& h, double t_end,
                           Scheme scheme);
WindingTerms winding_terms(const FbmPathSet& paths, double t_end, Scheme scheme = Scheme::left_point);

double winding_functional(const FbmPathSet& paths, const Hurst& h, double t_end, Winding variant,
                          Scheme scheme = Scheme::left_point);

}  // namespace fbmclt
