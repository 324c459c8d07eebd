#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fbmclt/adaptive.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/parallel.hpp"
#include "fbmclt/rng.hpp"

namespace fbmclt {

/// A point of (0,1) together with its distance to 1, kept separately so that
/// factors like (1-x)^p stay accurate near the right end.
struct UnitPoint {
  double x;
  double one_minus_x;
};

/// Two-piece proposal on (0,1) with density proportional to x^{-a} on (0,1/2]
/// and (1-x)^{-b} on (1/2,1), 0 <= a, b < 1. Sampled by inverse transform on
/// each half.
class EndpointMixture {
 public:
  EndpointMixture(double a, double b);
  UnitPoint sample(RandomStream& rs) const;
  double density(const UnitPoint& p) const;

 private:
  double a_, b_, m0_, m1_, p0_;
};

/// Sample (x, u) for integrands that behave like |x-u|^{2H-2} times a
/// scale-free profile. x is log-uniform on [lo, hi]; u = x z where z is a
/// draw w of EndpointMixture(H, 2-2H) or its reciprocal, each with
/// probability 1/2. u is not confined to [lo, hi]; callers reject.
struct PairSample {
  double x, u;
  double gap;      // |x - u|, computed without cancellation
  double density;  // joint density of (x, u)
};

class PairProposal {
 public:
  explicit PairProposal(double h);
  /// Requires 0 < lo < hi.
  PairSample sample(RandomStream& rs, double lo, double hi) const;
  /// Density of the ratio z = u / x; gap = |1 - z|.
  double ratio_density(double z, double gap) const;

 private:
  EndpointMixture mix_;
};

/// One level of the ordered-chain integrals: draws (x, y) in
/// [lo, x_hi] x [lo, y_hi] so that |x - y|^{2H-2} / density is constant.
/// The shorter side is uniform; the other coordinate is the first plus a
/// power-law offset with density proportional to |d|^{2H-2} on |d| <= long - lo.
/// `weight` already includes the |x - y|^{2H-2} factor; it is 0 when the
/// draw falls outside the box.
struct BoxSample {
  double x, y, weight;
};

BoxSample sample_box(RandomStream& rs, double h, double lo, double x_hi, double y_hi);

/// Stream key of a Monte Carlo quadrature; distinct per operation so that
/// estimates of different integrals never share random numbers.
enum class McKey : std::uint64_t {
  sigmaq = 1,
  oracle = 2,
  lemma41 = 3,
  contraction_sym = 4,
  contraction_g2 = 5,
  contraction_g1 = 6,
};

struct McOptions {
  std::int64_t n_samples = 1 << 20;
  std::uint64_t seed = 0;
  Parallelism parallel{};
};

/// Fixed number of batches for the batch-means error estimate.
inline constexpr int kMcBatches = 64;

/// Batch-means Monte Carlo. n_samples is rounded up to a multiple of
/// kMcBatches; batch b draws from stream derive_seed(seed, {quad_mc, key, extra, b})
/// and the batch means are reduced in batch order, so the result does not
/// depend on the thread count. A non-finite draw raises NumericalError.
template <class Draw>
QuadResult batch_means(const McOptions& opt, McKey key, std::uint64_t extra, Draw&& draw) {
  if (opt.n_samples < kMcBatches) {
    throw ConfigError("Monte Carlo quadrature needs at least " + std::to_string(kMcBatches) + " samples");
  }
  const std::int64_t per_batch = (opt.n_samples + kMcBatches - 1) / kMcBatches;
  std::vector<double> means(kMcBatches, 0.0);
  parallel_for(kMcBatches, opt.parallel, [&](std::int64_t b) {
    RandomStream rs = RandomStream::keyed(
        opt.seed, {static_cast<std::uint64_t>(StreamTag::quad_mc), static_cast<std::uint64_t>(key), extra,
                   static_cast<std::uint64_t>(b)});
    double acc = 0.0;
    for (std::int64_t i = 0; i < per_batch; ++i) {
      const double v = draw(rs);
      if (!std::isfinite(v)) throw NumericalError("non-finite Monte Carlo sample (importance density mismatch)");
      acc += v;
    }
    means[static_cast<std::size_t>(b)] = acc / static_cast<double>(per_batch);
  });
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= kMcBatches;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  QuadResult r;
  r.value = mean;
  r.error_estimate = std::sqrt(ss / (kMcBatches - 1) / kMcBatches);
  r.n_evals = per_batch * kMcBatches;
  r.method = QuadMethod::simplex_mc;
  return r;
}

}  // namespace fbmclt
