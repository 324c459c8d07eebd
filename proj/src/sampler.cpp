#include "fbmclt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include "fbmclt/covariance.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/rng.hpp"

namespace fbmclt {

std::string to_string(SamplingMethod m) { return m == SamplingMethod::cholesky ? "cholesky" : "circulant"; }

SamplingMethod parse_sampling_method(const std::string& s) {
  if (s == "cholesky") return SamplingMethod::cholesky;
  if (s == "circulant") return SamplingMethod::circulant;
  throw ConfigError("unknown sampling method '" + s + "' (expected cholesky or circulant)");
}

std::uint64_t path_stream_seed(std::uint64_t master, std::uint64_t k_index, std::uint64_t rep,
                               std::uint64_t component) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(StreamTag::paths), k_index, rep, component});
}

namespace {

// Autocovariance of unit-step fractional Gaussian noise at lag j.
double fgn_autocov(std::size_t j, double two_h) {
  const double x = static_cast<double>(j);
  if (j == 0) return 1.0;
  return 0.5 * (std::pow(x + 1.0, two_h) - 2.0 * std::pow(x, two_h) + std::pow(x - 1.0, two_h));
}

}  // namespace

FbmSampler::FbmSampler(std::shared_ptr<const TimeGrid> grid, Hurst h, SamplingMethod method)
    : grid_(std::move(grid)), h_(h), method_(method) {
  if (!grid_) throw ConfigError("sampler needs a grid");
  const double two_h = 2.0 * h_.value();
  if (method_ == SamplingMethod::cholesky) {
    Eigen::MatrixXd c = covariance_matrix(*grid_, h_);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      const double jitter = 1e-12 * std::pow(grid_->back(), two_h);
      c.diagonal().array() += jitter;
      llt.compute(c);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("Cholesky factorisation of the fBm covariance failed after diagonal jitter");
      }
      jittered_ = true;
    }
    factor_ = llt.matrixL();
    return;
  }

  if (grid_->spacing() != Spacing::uniform) {
    throw ConfigError("circulant sampling requires a uniformly spaced grid");
  }
  const std::size_t n = grid_->size() - 1;
  const std::size_t m = 2 * n;
  std::vector<double> c(m);
  for (std::size_t j = 0; j <= n; ++j) c[j] = fgn_autocov(j, two_h);
  for (std::size_t j = n + 1; j < m; ++j) c[j] = c[m - j];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> lambda;
  fft.fwd(lambda, c);
  double lmax = 0.0;
  for (const auto& l : lambda) lmax = std::max(lmax, l.real());
  sqrt_eig_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double l = lambda[j].real();
    if (l < -1e-10 * lmax) throw NumericalError("circulant embedding is not positive semidefinite");
    sqrt_eig_[j] = std::sqrt(std::max(l, 0.0) / static_cast<double>(m));
  }
}

void FbmSampler::fill_normals(std::span<const std::uint64_t> seeds, Eigen::Index first, Eigen::MatrixXd& z) const {
  const Eigen::Index rows = z.rows();
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const Eigen::Index src = first + c;
    if (src < static_cast<Eigen::Index>(seeds.size())) {
      RandomStream rs(seeds[static_cast<std::size_t>(src)]);
      for (Eigen::Index r = 0; r < rows; ++r) z(r, c) = rs.normal();
    } else {
      z.col(c).setZero();
    }
  }
}

void FbmSampler::circulant_column(std::uint64_t seed, double* out) const {
  const std::size_t m = sqrt_eig_.size();
  const std::size_t n = m / 2;
  RandomStream rs(seed);
  std::vector<std::complex<double>> w(m), y;
  for (std::size_t j = 0; j < m; ++j) {
    const double a = rs.normal();
    const double b = rs.normal();
    w[j] = {sqrt_eig_[j] * a, sqrt_eig_[j] * b};
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.fwd(y, w);
  const double scale = std::pow((*grid_)[1], h_.value());
  out[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += scale * y[i].real();
    out[i + 1] = acc;
  }
}

void FbmSampler::sample_columns(std::span<const std::uint64_t> seeds, Eigen::MatrixXd& out) const {
  const Eigen::Index n = static_cast<Eigen::Index>(grid_->size());
  const Eigen::Index cols = static_cast<Eigen::Index>(seeds.size());
  out.resize(n, cols);
  if (method_ == SamplingMethod::circulant) {
    for (Eigen::Index c = 0; c < cols; ++c) circulant_column(seeds[static_cast<std::size_t>(c)], out.col(c).data());
    return;
  }
  Eigen::MatrixXd z(n - 1, kBlockColumns);
  Eigen::MatrixXd x(n - 1, kBlockColumns);
  for (Eigen::Index first = 0; first < cols; first += kBlockColumns) {
    fill_normals(seeds, first, z);
    x.noalias() = factor_.triangularView<Eigen::Lower>() * z;
    const Eigen::Index take = std::min(kBlockColumns, cols - first);
    out.block(0, first, 1, take).setZero();
    out.block(1, first, n - 1, take) = x.leftCols(take);
  }
}

void FbmSampler::sample_columns_reference(std::span<const std::uint64_t> seeds, Eigen::MatrixXd& out) const {
  const Eigen::Index n = static_cast<Eigen::Index>(grid_->size());
  const Eigen::Index cols = static_cast<Eigen::Index>(seeds.size());
  out.resize(n, cols);
  if (method_ == SamplingMethod::circulant) {
    for (Eigen::Index c = 0; c < cols; ++c) circulant_column(seeds[static_cast<std::size_t>(c)], out.col(c).data());
    return;
  }
  std::vector<double> z(static_cast<std::size_t>(n - 1));
  for (Eigen::Index c = 0; c < cols; ++c) {
    RandomStream rs(seeds[static_cast<std::size_t>(c)]);
    for (auto& v : z) v = rs.normal();
    out(0, c) = 0.0;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j <= i; ++j) acc += factor_(i, j) * z[static_cast<std::size_t>(j)];
      out(i + 1, c) = acc;
    }
  }
}

FbmPathSet sample_fbm(const FbmSampler& sampler, int d, std::uint64_t seed) {
  if (d < 1) throw ConfigError("component count d must be >= 1");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) seeds[static_cast<std::size_t>(i)] = path_stream_seed(seed, 0, 0, static_cast<std::uint64_t>(i));
  Eigen::MatrixXd cols;
  sampler.sample_columns(seeds, cols);
  return FbmPathSet{sampler.grid_ptr(), d, cols.transpose(), sampler.hurst(), seed, sampler.method()};
}

FbmPathSet sample_fbm(const TimeGrid& grid, int d, const Hurst& h, std::uint64_t seed, SamplingMethod method) {
  if (d < 1) throw ConfigError("component count d must be >= 1");
  FbmSampler sampler(std::make_shared<const TimeGrid>(grid), h, method);
  return sample_fbm(sampler, d, seed);
}

void FbmPathSet::write_csv(std::ostream& os) const {
  os << "time";
  for (int i = 1; i <= d; ++i) os << ",component_" << i;
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t j = 0; j < grid->size(); ++j) {
    os << (*grid)[j];
    for (int i = 0; i < d; ++i) os << ',' << values(i, static_cast<Eigen::Index>(j));
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fbmclt
