#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fbmclt/errors.hpp"
#include "fbmclt/hurst.hpp"
#include "fbmclt/iterint.hpp"
#include "fbmclt/parallel.hpp"
#include "fbmclt/stats.hpp"

namespace fbmclt {

struct ExperimentConfig {
  int q = 2;
  Hurst h{0.75};
  std::vector<double> k_list{100.0};
  std::vector<double> t_list{1.0};
  std::int64_t reps = 2000;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::left_point;
  std::size_t resolution = 4096;  // intervals on [1, k^{max t}]
  std::size_t warmup = 16;        // intervals on [0, 1]
  /// levels[l] = component driving level l + 1; empty = identity.
  std::vector<int> levels;
  bool keep_samples = false;
  double budget_seconds = 0.0;  // 0 = unlimited
  Parallelism parallel{};

  /// ConfigError on empty or non-increasing lists, k <= 1, reps < 1, q < 2.
  void validate() const;
};

struct CellStats {
  double t = 0.0;
  Estimate mean;
  Estimate var;
  Estimate second_moment;  // E[X^2] about 0
  Estimate fourth_moment;
  GapResult gap;
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  double snap_error = 0.0;
};

struct KBlock {
  double k = 0.0;
  std::vector<CellStats> cells;   // one per t
  Eigen::MatrixXd cov;            // sample covariance over t_list
  Eigen::MatrixXd cov_se;
  /// Slope of log E|X(t_last) - X(t_i)|^4 against log(t_last - t_i); NaN
  /// when fewer than 3 checkpoints.
  double tightness_slope = 0.0;
  bool jittered = false;
  std::vector<std::vector<double>> samples;  // [t][rep] when keep_samples
};

struct McReport {
  ExperimentConfig config;
  std::vector<KBlock> blocks;
  bool partial = false;
};

/// Budget exhausted; carries the blocks that completed.
class PartialReportError : public Error {
 public:
  PartialReportError(const std::string& what, McReport partial) : Error(what), partial_(std::move(partial)) {}
  std::string_view kind() const noexcept override { return "partial"; }
  const McReport& partial() const noexcept { return partial_; }

 private:
  McReport partial_;
};

/// Samples of X_k(t) for every k in the config, rep-major per t:
/// result[ki][ti][rep]. Replications run as independent OpenMP tasks; the
/// paths of replication r for the ki-th k come from
/// path_stream_seed(seed, ki, r, component).
std::vector<std::vector<std::vector<double>>> simulate_x(const ExperimentConfig& cfg);

/// Plain serial version of simulate_x using the reference sampler; equal to
/// simulate_x up to rounding.
std::vector<std::vector<std::vector<double>>> simulate_x_reference(const ExperimentConfig& cfg);

McReport run_experiment(const ExperimentConfig& cfg);

struct TightnessResult {
  double slope = 0.0;
  std::vector<double> gaps;     // t - tau of the used pairs
  std::vector<double> moments;  // E|X(t) - X(tau)|^4, same order
};

/// Pairs with tau == t are dropped; fewer than 2 remaining pairs is a
/// DomainError.
TightnessResult tightness_probe(int q, const Hurst& h, double k, const std::vector<std::pair<double, double>>& t_pairs,
                                std::int64_t reps, std::uint64_t seed, std::size_t resolution = 4096,
                                Parallelism par = {});

struct RatePoint {
  double k = 0.0;
  double log_log_k = 0.0;
  double bound = 0.0;   // right side of the total-variation bound
  double moment_term = 0.0;
  double variance_term = 0.0;
  bool clamped = false;  // gap estimate was not positive and was replaced by its SE
};

struct RateResult {
  double exponent = 0.0;
  std::vector<RatePoint> points;
};

/// Total-variation bound 2 sqrt(gap / (3 m2^2)) + 2 |m2 - sigma^2 t| / max(m2, sigma^2 t)
/// at checkpoint t of every block, regressed in log against log log k.
RateResult rate_probe(const std::vector<McReport>& reports, double t, double sigma_sq);

struct WindingStats {
  Estimate var_z;        // Var[Z_t] / log t
  Estimate var_zprime;   // Var[Z'_t] / log t
  Estimate cov_terms;    // Cov of the two iterated terms / log t
  Estimate var_term_21;  // / log t
  Estimate var_term_12;  // / log t
  std::vector<WindingTerms> samples;
};

/// Winding functionals over [1, t_end] for reps replications of planar fBm
/// on a geometric grid of the given resolution.
WindingStats winding_experiment(const Hurst& h, double t_end, std::int64_t reps, std::uint64_t seed,
                                std::size_t resolution = 4096, Scheme scheme = Scheme::left_point,
                                Parallelism par = {});

}  // namespace fbmclt
