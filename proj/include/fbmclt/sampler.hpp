#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fbmclt/grid.hpp"
#include "fbmclt/hurst.hpp"

namespace fbmclt {

enum class SamplingMethod { cholesky, circulant };

std::string to_string(SamplingMethod m);
SamplingMethod parse_sampling_method(const std::string& s);

/// Stream seed of one path component. Experiments key by (k index,
/// replication, component); a stand-alone sample_fbm call uses k index 0 and
/// replication 0.
std::uint64_t path_stream_seed(std::uint64_t master, std::uint64_t k_index, std::uint64_t rep,
                               std::uint64_t component) noexcept;

/// Exact sampler of one fBm component on a fixed grid. The factorisation is
/// computed once in the constructor and never modified, so one sampler can be
/// shared by all threads.
class FbmSampler {
 public:
  /// Columns are transformed in fixed-width blocks so that a column's value
  /// never depends on how many other columns were requested with it.
  static constexpr Eigen::Index kBlockColumns = 32;

  FbmSampler(std::shared_ptr<const TimeGrid> grid, Hurst h, SamplingMethod method);

  const TimeGrid& grid() const noexcept { return *grid_; }
  std::shared_ptr<const TimeGrid> grid_ptr() const noexcept { return grid_; }
  const Hurst& hurst() const noexcept { return h_; }
  SamplingMethod method() const noexcept { return method_; }
  /// True when the Cholesky factorisation needed the diagonal jitter.
  bool jittered() const noexcept { return jittered_; }
  /// Lower Cholesky factor (empty for the circulant method).
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }

  /// out is resized to (grid size) x seeds.size(); column c is one path drawn
  /// from the stream seeded with seeds[c]; row 0 holds B_0 = 0.
  void sample_columns(std::span<const std::uint64_t> seeds, Eigen::MatrixXd& out) const;

  /// Plain-loop version of sample_columns (same random numbers, no blocked
  /// products). Kept as the reference for tests and benchmarks.
  void sample_columns_reference(std::span<const std::uint64_t> seeds, Eigen::MatrixXd& out) const;

 private:
  void fill_normals(std::span<const std::uint64_t> seeds, Eigen::Index first, Eigen::MatrixXd& z) const;
  void circulant_column(std::uint64_t seed, double* out) const;

  std::shared_ptr<const TimeGrid> grid_;
  Hurst h_;
  SamplingMethod method_;
  Eigen::MatrixXd factor_;
  std::vector<double> sqrt_eig_;  // circulant: sqrt(lambda_j / 2M)
  bool jittered_ = false;
};

/// d independent fBm components on one grid.
struct FbmPathSet {
  std::shared_ptr<const TimeGrid> grid;
  int d = 0;
  Eigen::MatrixXd values;  // d x n; values(i, 0) == 0
  Hurst hurst;
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::cholesky;

  /// CSV with header time,component_1,...,component_d.
  void write_csv(std::ostream& os) const;
};

/// Deterministic in (grid, d, h, seed, method). Throws ConfigError for
/// d < 1 or circulant on a non-uniform grid, NumericalError if the
/// factorisation fails even after jitter.
FbmPathSet sample_fbm(const TimeGrid& grid, int d, const Hurst& h, std::uint64_t seed, SamplingMethod method);

/// Overload reusing an existing sampler (and its factorisation).
FbmPathSet sample_fbm(const FbmSampler& sampler, int d, std::uint64_t seed);

}  // namespace fbmclt
