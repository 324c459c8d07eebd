#pragma once

#include <cstdint>

#include "fbmclt/adaptive.hpp"
#include "fbmclt/hurst.hpp"
#include "fbmclt/importance.hpp"

namespace fbmclt {

/// alpha_H x^{-2H} R(1,x) (1-x)^{2H-2}, the one-dimensional kernel whose
/// integral over (0,1) gives half the q = 2 limit variance rate.
double sigma2_integrand(double x, const Hurst& h);

/// c * alpha_H * Beta(1-H, 2H-1): the finiteness bound for the limit
/// variances (the kernel is dominated by x^{-H}(1-x)^{2H-2} because R(1,x) <= x^H).
double sigma_beta_bound(const Hurst& h, double c = 1.0);

/// Limit variance rate sigma_2^2 = lim E[Y_K^2] / log K for q = 2.
///
/// Equals 2 * int_0^1 sigma2_integrand: both faces {r = K} and {s = K} of the
/// symmetric domain contribute. Computed with the endpoint singularities
/// removed by the substitutions x = u^{1/(1-H)} on [0,1/2] and
/// 1 - x = v^{1/(2H-1)} on [1/2,1]. Requires 1e-12 <= rel_tol <= 1e-2.
QuadResult sigma2_squared(const Hurst& h, double rel_tol = 1e-10);

/// Independent route to sigma2_squared: plain adaptive rule on [eps, 1-eps]
/// plus closed-form leading terms of the integrand's expansions on the two
/// end strips.
QuadResult sigma2_squared_truncated(const Hurst& h, double rel_tol = 1e-10, double eps = 1e-5);

/// Limit variance rate sigma_q^2 for q >= 3 by importance sampling of the
/// (2q-3)-dimensional ordered-chain integral (times 2 for the two faces).
/// Requires n_samples >= 1e4.
QuadResult sigmaq_squared(int q, const Hurst& h, std::int64_t n_samples, std::uint64_t seed, Parallelism par = {});

/// Same estimator, also accepting q = 2 (used to cross-check the
/// deterministic sigma2_squared).
QuadResult sigmaq_squared_mc(int q, const Hurst& h, const McOptions& mc);

/// E[Y_{k^s} Y_{k^t}] for s <= t, i.e. log(k) E[X_k(s) X_k(t)].
/// Deterministic nested quadrature for q = 2, Monte Carlo for q >= 3.
QuadResult variance_oracle(int q, const Hurst& h, double k, double s, double t, const McOptions& mc = {},
                           double rel_tol = 1e-8);

/// q = 2 only: outer adaptive rule in log r, inner rule in w = |r-u|^{2H-1}.
QuadResult variance_oracle_deterministic(const Hurst& h, double k, double s, double t, double rel_tol = 1e-8);

/// Any q >= 2: (r_q, s_q) from the scale-free pair proposal, lower chain
/// levels from the box sampler, innermost pair integrated in closed form.
QuadResult variance_oracle_mc(int q, const Hurst& h, double k, double s, double t, const McOptions& mc);

/// int_{[1/T,1]^4} (xyuv)^{-2H} R(x,y) R(u,v) |x-u|^{2H-2} |y-v|^{2H-2}.
QuadResult lemma41_integral(double T, const Hurst& h, std::int64_t n_samples, std::uint64_t seed,
                            Parallelism par = {});

struct ContractionNorms {
  QuadResult unsym;  // ||f~ (x)_1 f~||^2 from the raw 8-dimensional integrals
  QuadResult sym;    // ||f~ (x)~_1 f~||^2 from the reduced 4-dimensional integral
};

/// q = 2, horizon k (t = 1). The contraction of the symmetric kernel is
/// already symmetric, so both numbers estimate the same quantity along two
/// independent routes.
ContractionNorms contraction_norm_q2(double k, const Hurst& h, std::int64_t n_samples, std::uint64_t seed,
                                     Parallelism par = {});

/// Coefficient c(q,p) = (3/q) p (p!)^2 C(q,p)^4 (2q-2p)! in
/// E[F^4] - 3 E[F^2]^2 = sum_p c(q,p) ||f (x)~_p f||^2 for F = I_q(f).
double stein_gap_coefficient(int q, int p);

}  // namespace fbmclt
