#include "fbmclt/quad.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "fbmclt/covariance.hpp"

namespace fbmclt {

namespace {

// Draws whose outer coordinate underflows this far contribute nothing
// measurable but would turn x^{-qH} into inf.
constexpr double kTiny = 1e-200;

void require_samples(std::int64_t n, std::int64_t min_n) {
  if (n < min_n) throw ConfigError("n_samples must be at least " + std::to_string(min_n));
}

// x^{-2H} R(1,x) with y = 1 - x supplied separately.
// For small x, 1 - y^{2H} goes through expm1/log1p; the plain difference
// loses all digits there and the left-end substitution magnifies the noise.
double kernel_head(double x, double y, double two_h) {
  const double x_p = std::pow(x, two_h);
  const double one_minus_y_p = x < 0.5 ? -std::expm1(two_h * std::log1p(-x)) : 1.0 - std::pow(y, two_h);
  return std::pow(x, -two_h) * 0.5 * (x_p + one_minus_y_p);
}

}  // namespace

double sigma2_integrand(double x, const Hurst& h) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("sigma2_integrand: x must lie in (0,1)");
  const double two_h = 2.0 * h.value();
  return h.alpha() * kernel_head(x, 1.0 - x, two_h) * std::pow(1.0 - x, two_h - 2.0);
}

double sigma_beta_bound(const Hurst& h, double c) {
  const double H = h.value();
  return c * h.alpha() * std::exp(std::lgamma(1.0 - H) + std::lgamma(2.0 * H - 1.0) - std::lgamma(H));
}

QuadResult sigma2_squared(const Hurst& h, double rel_tol) {
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-2)) throw ConfigError("rel_tol must lie in [1e-12, 1e-2]");
  const double H = h.value();
  const double two_h = 2.0 * H;
  const double e = two_h - 1.0;
  const double alpha = h.alpha();
  AdaptiveOptions opt;
  opt.rel_tol = rel_tol;
  opt.max_evals = 1'000'000;

  // [0, 1/2] with x = u^{1/(1-H)}: the x^{1-2H} behaviour times the Jacobian
  // u^{H/(1-H)} / (1-H) is bounded.
  const double p_left = 1.0 / (1.0 - H);
  auto left = [&](double u) {
    const double x = std::pow(u, p_left);
    const double y = 1.0 - x;
    const double jac = p_left * std::pow(u, H * p_left);
    // Near H = 1 x underflows; x^{1-2H} jac is exactly p_left u.
    if (x < 1e-100) return alpha * (0.5 * jac + H * p_left * u);
    return alpha * kernel_head(x, y, two_h) * std::pow(y, two_h - 2.0) * jac;
  };
  // [1/2, 1] with 1 - x = v^{1/(2H-1)}: (1-x)^{2H-2} times the Jacobian is
  // exactly 1/(2H-1), so it is dropped from both.
  const double p_right = 1.0 / e;
  auto right = [&](double v) {
    const double y = std::pow(v, p_right);
    return alpha * kernel_head(1.0 - y, y, two_h) / e;
  };
  QuadResult a, b;
  try {
    a = integrate_adaptive(left, 0.0, std::pow(0.5, 1.0 - H), opt);
    b = integrate_adaptive(right, 0.0, std::pow(0.5, e), opt);
  } catch (const ConvergenceError& err) {
    QuadResult best = err.best();
    best.value *= 2.0;
    best.error_estimate *= 2.0;
    throw ConvergenceError(std::string("sigma2_squared: ") + err.what(), best);
  }
  QuadResult r;
  r.value = 2.0 * (a.value + b.value);
  r.error_estimate = 2.0 * (a.error_estimate + b.error_estimate);
  r.n_evals = a.n_evals + b.n_evals;
  r.method = QuadMethod::adaptive_deterministic;
  return r;
}

QuadResult sigma2_squared_truncated(const Hurst& h, double rel_tol, double eps) {
  if (!(eps > 0.0 && eps < 0.25)) throw ConfigError("truncation eps must lie in (0, 1/4)");
  const double H = h.value();
  const double two_h = 2.0 * H;
  const double alpha = h.alpha();
  AdaptiveOptions opt;
  opt.rel_tol = rel_tol;
  opt.max_evals = 4'000'000;
  auto f = [&](double x) { return sigma2_integrand(x, h); };
  const QuadResult mid = integrate_adaptive(f, eps, 1.0 - eps, opt);

  // Leading terms of the expansion near 0:
  //   (alpha/2) [1 + 2H x^{1-2H} + (2-2H) x + (2H(2-2H) - alpha) x^{2-2H} + ...]
  const double tail0 = 0.5 * alpha *
                       (eps + two_h * std::pow(eps, 2.0 - two_h) / (2.0 - two_h) + (1.0 - H) * eps * eps +
                        (two_h * (2.0 - two_h) - alpha) * std::pow(eps, 3.0 - two_h) / (3.0 - two_h));
  // Near 1, with y = 1 - x: (alpha/2) [2 y^{2H-2} + 2H y^{2H-1} - y^{4H-2} + ...]
  const double tail1 = 0.5 * alpha *
                       (2.0 * std::pow(eps, two_h - 1.0) / (two_h - 1.0) + std::pow(eps, two_h) -
                        std::pow(eps, 2.0 * two_h - 1.0) / (2.0 * two_h - 1.0));
  // Size of the first neglected terms, used as the truncation error bound.
  const double neglected = alpha * (std::pow(eps, 4.0 - two_h) + std::pow(eps, two_h + 1.0) + std::pow(eps, 2.0 * two_h));
  QuadResult r;
  r.value = 2.0 * (mid.value + tail0 + tail1);
  r.error_estimate = 2.0 * (mid.error_estimate + neglected);
  r.n_evals = mid.n_evals;
  r.method = QuadMethod::adaptive_deterministic;
  return r;
}

QuadResult sigmaq_squared_mc(int q, const Hurst& h, const McOptions& mc) {
  if (q < 2) throw ConfigError("sigma_q needs q >= 2");
  const double H = h.value();
  const double two_h = 2.0 * H;
  const double qh = q * H;
  const double alpha_pow = std::pow(h.alpha(), q - 1);
  const EndpointMixture mix(H, 2.0 - two_h);
  return batch_means(mc, McKey::sigmaq, static_cast<std::uint64_t>(q), [&](RandomStream& rs) {
    const UnitPoint p = mix.sample(rs);
    if (p.x < kTiny) return 0.0;
    double w = alpha_pow * std::pow(p.x, -qh) * std::pow(p.one_minus_x, two_h - 2.0) / mix.density(p);
    double xb = p.x, yb = 1.0;
    for (int level = q - 1; level >= 2; --level) {
      const BoxSample b = sample_box(rs, H, 0.0, xb, yb);
      if (b.weight == 0.0) return 0.0;
      w *= b.weight;
      xb = b.x;
      yb = b.y;
    }
    return 2.0 * w * covariance_unchecked(xb, yb, two_h);
  });
}

QuadResult sigmaq_squared(int q, const Hurst& h, std::int64_t n_samples, std::uint64_t seed, Parallelism par) {
  if (q < 3) throw ConfigError("sigmaq_squared needs q >= 3 (use sigma2_squared for q = 2)");
  require_samples(n_samples, 10'000);
  return sigmaq_squared_mc(q, h, McOptions{n_samples, seed, par});
}

QuadResult variance_oracle_deterministic(const Hurst& h, double k, double s, double t, double rel_tol) {
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("base k must be a finite number > 1");
  if (s > t) throw DomainError("variance_oracle needs s <= t");
  if (s <= 0.0) return QuadResult{0.0, 0.0, 1, QuadMethod::adaptive_deterministic};
  const double two_h = 2.0 * h.value();
  const double e = two_h - 1.0;
  const double alpha = h.alpha();
  const double log_k = std::log(k);
  const double rho_s = s * log_k;
  const double rho_t = t * log_k;
  const double ks = std::exp(rho_s);

  AdaptiveOptions inner_opt;
  inner_opt.rel_tol = 0.1 * rel_tol;
  inner_opt.max_evals = 400'000;
  std::int64_t evals = 0;

  // int_1^{K_s} u^{-2H} |r-u|^{2H-2} R(r-1, u-1) du, split at u = r and
  // integrated in w = |r-u|^{2H-1} so the power singularity disappears.
  auto inner = [&](double rho) {
    const double r = std::exp(rho);
    const double rm1 = std::expm1(rho);
    double total = 0.0;
    const double d_lo = rho > rho_s ? ks * std::expm1(rho - rho_s) : 0.0;
    if (rm1 > d_lo) {
      auto below = [&](double w) {
        const double d = std::pow(w, 1.0 / e);
        return std::pow(r - d, -two_h) * covariance_unchecked(rm1, std::max(rm1 - d, 0.0), two_h) / e;
      };
      const QuadResult q = integrate_adaptive(below, std::pow(d_lo, e), std::pow(rm1, e), inner_opt);
      total += q.value;
      evals += q.n_evals;
    }
    if (rho < rho_s) {
      const double d_hi = r * std::expm1(rho_s - rho);
      auto above = [&](double w) {
        const double d = std::pow(w, 1.0 / e);
        return std::pow(r + d, -two_h) * covariance_unchecked(rm1, rm1 + d, two_h) / e;
      };
      const QuadResult q = integrate_adaptive(above, 0.0, std::pow(d_hi, e), inner_opt);
      total += q.value;
      evals += q.n_evals;
    }
    return total;
  };
  auto outer = [&](double rho) { return alpha * std::exp((1.0 - two_h) * rho) * inner(rho); };

  AdaptiveOptions outer_opt;
  outer_opt.rel_tol = rel_tol;
  outer_opt.max_evals = 20'000;
  QuadResult r{0.0, 0.0, 0, QuadMethod::adaptive_deterministic};
  try {
    const QuadResult a = integrate_adaptive(outer, 0.0, rho_s, outer_opt);
    r.value = a.value;
    r.error_estimate = a.error_estimate;
    evals += a.n_evals;
    if (rho_t > rho_s) {
      const QuadResult b = integrate_adaptive(outer, rho_s, rho_t, outer_opt);
      r.value += b.value;
      r.error_estimate += b.error_estimate;
      evals += b.n_evals;
    }
  } catch (const ConvergenceError& err) {
    QuadResult best = err.best();
    best.n_evals = evals;
    throw ConvergenceError(std::string("variance_oracle: ") + err.what(), best);
  }
  r.error_estimate += 0.1 * rel_tol * std::abs(r.value);
  r.n_evals = evals;
  return r;
}

QuadResult variance_oracle_mc(int q, const Hurst& h, double k, double s, double t, const McOptions& mc) {
  if (q < 2) throw ConfigError("variance_oracle needs q >= 2");
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("base k must be a finite number > 1");
  if (s > t) throw DomainError("variance_oracle needs s <= t");
  if (s <= 0.0) return QuadResult{0.0, 0.0, 1, QuadMethod::simplex_mc};
  const double H = h.value();
  const double two_h = 2.0 * H;
  const double qh = q * H;
  const double alpha_pow = std::pow(h.alpha(), q - 1);
  const double kt = std::exp(t * std::log(k));
  const double ks = std::exp(s * std::log(k));
  const PairProposal pairs(H);
  const std::uint64_t extra = static_cast<std::uint64_t>(q);
  return batch_means(mc, McKey::oracle, extra, [&](RandomStream& rs) {
    const PairSample p = pairs.sample(rs, 1.0, kt);
    if (p.u < 1.0 || p.u > ks) return 0.0;
    double w = alpha_pow * std::pow(p.x * p.u, -qh) * std::pow(p.gap, two_h - 2.0) / p.density;
    double rb = p.x, ub = p.u;
    for (int level = q - 1; level >= 2; --level) {
      const BoxSample b = sample_box(rs, H, 1.0, rb, ub);
      if (b.weight == 0.0) return 0.0;
      w *= b.weight;
      rb = b.x;
      ub = b.y;
    }
    return w * covariance_unchecked(rb - 1.0, ub - 1.0, two_h);
  });
}

QuadResult variance_oracle(int q, const Hurst& h, double k, double s, double t, const McOptions& mc, double rel_tol) {
  if (q < 2) throw ConfigError("variance_oracle needs q >= 2");
  if (q == 2) return variance_oracle_deterministic(h, k, s, t, rel_tol);
  return variance_oracle_mc(q, h, k, s, t, mc);
}

namespace {

// int over [lo,hi]^4 of (xyuv)^{-2H} R(x-c,y-c) R(u-c,v-c) |x-u|^{2H-2} |y-v|^{2H-2},
// with (x,u) and (y,v) drawn from independent pair proposals.
QuadResult pair_product_integral(const Hurst& h, double lo, double hi, double shift, const McOptions& mc, McKey key,
                                 std::uint64_t extra) {
  const double two_h = 2.0 * h.value();
  const PairProposal pairs(h.value());
  return batch_means(mc, key, extra, [&](RandomStream& rs) {
    const PairSample a = pairs.sample(rs, lo, hi);
    const PairSample b = pairs.sample(rs, lo, hi);
    if (a.u < lo || a.u > hi || b.u < lo || b.u > hi) return 0.0;
    const double w = std::pow(a.x * a.u * b.x * b.u, -two_h) * std::pow(a.gap * b.gap, two_h - 2.0) /
                     (a.density * b.density);
    return w * covariance_unchecked(a.x - shift, b.x - shift, two_h) *
           covariance_unchecked(a.u - shift, b.u - shift, two_h);
  });
}

std::uint64_t key_of(double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof bits);
  return bits;
}

}  // namespace

QuadResult lemma41_integral(double T, const Hurst& h, std::int64_t n_samples, std::uint64_t seed, Parallelism par) {
  if (!(T > 1.0) || !std::isfinite(T)) throw DomainError("lemma41_integral needs a finite T > 1");
  require_samples(n_samples, kMcBatches);
  return pair_product_integral(h, 1.0 / T, 1.0, 0.0, McOptions{n_samples, seed, par}, McKey::lemma41, key_of(T));
}

ContractionNorms contraction_norm_q2(double k, const Hurst& h, std::int64_t n_samples, std::uint64_t seed,
                                     Parallelism par) {
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("base k must be a finite number > 1");
  require_samples(n_samples, kMcBatches);
  const double H = h.value();
  const double two_h = 2.0 * H;
  const double alpha = h.alpha();
  const McOptions mc{n_samples, seed, par};
  const std::uint64_t extra = key_of(k);
  ContractionNorms out;

  // Reduced route: ||g||^2 = 2 ||g_22||^2 = (alpha^2 / 8) J(k).
  QuadResult j = pair_product_integral(h, 1.0, k, 1.0, mc, McKey::contraction_sym, extra);
  const double c = alpha * alpha / 8.0;
  out.sym = QuadResult{c * j.value, c * j.error_estimate, j.n_evals, QuadMethod::simplex_mc};

  const PairProposal pairs(H);
  const double quarter2 = alpha * alpha / 16.0;

  // g_22(s,t) = (st)^{-2H} R(s-1,t-1) / 4, with each R sampled as
  // alpha * int_0^{s-1} int_0^{t-1} |a-b|^{2H-2} by the box sampler.
  const QuadResult g2 = batch_means(mc, McKey::contraction_g2, extra, [&](RandomStream& rs) {
    const PairSample a = pairs.sample(rs, 1.0, k);
    const PairSample b = pairs.sample(rs, 1.0, k);
    if (a.u < 1.0 || a.u > k || b.u < 1.0 || b.u > k) return 0.0;
    const BoxSample r1 = sample_box(rs, H, 0.0, a.x - 1.0, b.x - 1.0);
    const BoxSample r2 = sample_box(rs, H, 0.0, a.u - 1.0, b.u - 1.0);
    const double w = std::pow(a.x * a.u * b.x * b.u, -two_h) * std::pow(a.gap * b.gap, two_h - 2.0) /
                     (a.density * b.density);
    return quarter2 * w * alpha * r1.weight * alpha * r2.weight;
  });

  // g_11(s,t) = G(s,t) / 4 with G(s,t) = alpha int_s^k int_t^k (ab)^{-2H} |a-b|^{2H-2};
  // each G is sampled by a pair proposal anchored at the larger lower limit.
  auto sample_g = [&](RandomStream& rs, double s, double t) {
    const bool s_first = s >= t;
    const double lo_first = s_first ? s : t;
    const double lo_second = s_first ? t : s;
    if (!(lo_first < k)) return 0.0;
    const PairSample p = pairs.sample(rs, lo_first, k);
    if (p.u < lo_second || p.u > k) return 0.0;
    return alpha * std::pow(p.x * p.u, -two_h) * std::pow(p.gap, two_h - 2.0) / p.density;
  };
  const QuadResult g1 = batch_means(mc, McKey::contraction_g1, extra, [&](RandomStream& rs) {
    const PairSample a = pairs.sample(rs, 1.0, k);  // (s, s')
    const PairSample b = pairs.sample(rs, 1.0, k);  // (t, t')
    if (a.u < 1.0 || a.u > k || b.u < 1.0 || b.u > k) return 0.0;
    const double ga = sample_g(rs, a.x, b.x);
    const double gb = sample_g(rs, a.u, b.u);
    const double w = std::pow(a.gap * b.gap, two_h - 2.0) / (a.density * b.density);
    return quarter2 * w * ga * gb;
  });
  out.unsym.value = g2.value + g1.value;
  out.unsym.error_estimate = std::hypot(g2.error_estimate, g1.error_estimate);
  out.unsym.n_evals = g2.n_evals + g1.n_evals;
  out.unsym.method = QuadMethod::simplex_mc;
  return out;
}

double stein_gap_coefficient(int q, int p) {
  if (q < 2 || p < 1 || p >= q) throw DomainError("stein_gap_coefficient needs 1 <= p < q");
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  const double binom = fact(q) / (fact(p) * fact(q - p));
  return 3.0 / q * p * fact(p) * fact(p) * std::pow(binom, 4) * fact(2 * q - 2 * p);
}

}  // namespace fbmclt
