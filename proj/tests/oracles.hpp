#pragma once

// Reference values computed independently of the library's own quadrature
// and sampling code. Boost's tanh-sinh rule handles the endpoint
// singularities; nothing here calls into src/quad.cpp.

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "fbmclt/grid.hpp"

namespace oracle {

inline double alpha(double h) { return h * (2.0 * h - 1.0); }

// Tanh-sinh on [a, b]. Integrands taking (x, xc) receive the exact distance
// to the nearer endpoint, which keeps endpoint powers accurate.
template <class F>
double ts(F f, double a, double b, double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule.integrate(f, a, b, tol);
}

// alpha * int_0^s int_0^t |u - v|^{2H-2} dv du by nested tanh-sinh.
inline double rxy(double s, double t, double h) {
  const double p = 2.0 * h - 2.0;
  auto inner = [&](double u) {
    // (0, min(u,t)) has the singularity at its right end, (u, t) at its left end.
    const double lo_end = std::min(u, t);
    double below = ts(
        [&](double v, double vc) {
          const double d = (lo_end == u && vc > 0) ? vc : u - v;
          return d > 0 ? std::pow(d, p) : 0.0;
        },
        0.0, lo_end);
    double above = ts(
        [&](double v, double vc) {
          const double d = vc < 0 ? -vc : v - u;
          return d > 0 ? std::pow(d, p) : 0.0;
        },
        u, t);
    return below + above;
  };
  // Split the outer range where the inner integral changes form.
  double total = 0.0;
  if (s <= t) {
    total = ts([&](double u) { return inner(u); }, 0.0, s, 1e-12);
  } else {
    total = ts([&](double u) { return inner(u); }, 0.0, t, 1e-12) +
            ts([&](double u) { return inner(u); }, t, s, 1e-12);
  }
  return alpha(h) * total;
}

inline double r(double s, double t, double h) {
  return 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(s - t), 2 * h));
}

// Gamma-function value of alpha * int_0^1 x^{-2H} R(1,x) (1-x)^{2H-2} dx.
// The limit variance of X_k(1) for q = 2 is twice this number (both faces of
// the square [1,k]^2 contribute).
inline double sigma2_face(double h) {
  const double a = alpha(h);
  return a * 0.5 * (1.0 / (2 * h - 1) - std::tgamma(1 - 2 * h) * std::tgamma(4 * h - 1) / std::tgamma(2 * h));
}

// 2 alpha Beta(1-H, 2H-1).
inline double beta_bound(double h, double c = 2.0) { return c * alpha(h) * boost::math::beta(1 - h, 2 * h - 1); }

// Limit variance for q = 3 over 0 < x2 < x3 < 1, 0 < y < 1 (y3 = 1),
// doubled for the two faces. The y integral
//   g(x2) = int_0^1 R(x2, y) |x2 - y|^{2H-2} dy
// is closed form below x2 and a smooth 1D integral above it; swapping the order leaves
//   2 alpha^2 int_0^1 g(x2) W(x2) dx2,  W(x2) = int_{x2}^1 x3^{-3H} (1-x3)^{2H-2} dx3.
inline double sigma3_nested(double h, double tol = 1e-10) {
  const double a = alpha(h);
  const double e = 2 * h - 1;
  const double p = 2 * h - 2;
  auto g = [&](double x2) {
    const double c = 1.0 - x2;
    // y < x2: every term scales like x2^{4H-1}.
    const double below =
        0.5 * std::pow(x2, 4 * h - 1) * (1.0 / e + boost::math::beta(2 * h + 1, e) - 1.0 / (4 * h - 1));
    // y > x2 with y - x2 = c v^{1/e}; y^{2H} - (y - x2)^{2H} via expm1 so
    // small x2 keeps its relative accuracy.
    const double above = std::pow(c, e) / (2 * e) * ts(
        [&](double v) {
          const double y = x2 + c * std::pow(v, 1.0 / e);
          return std::pow(x2, 2 * h) - std::pow(y, 2 * h) * std::expm1(2 * h * std::log1p(-x2 / y));
        },
        0.0, 1.0, tol);
    return below + above;
  };
  auto w = [&](double x2) {
    return ts(
        [&](double x3, double xc) {
          const double one_minus = xc > 0 ? xc : 1.0 - x3;
          return one_minus > 0 ? std::pow(x3, -3 * h) * std::pow(one_minus, p) : 0.0;
        },
        x2, 1.0, tol);
  };
  // Below x2 = 1e-100 the integrand is O(x2^{1-H}) and W overflows.
  return 2.0 * a * a * ts([&](double x2) { return x2 > 1e-100 && x2 < 1 ? g(x2) * w(x2) : 0.0; }, 0.0, 1.0, tol);
}

struct BilinearMoments {
  double variance = 0.0;
  double kappa4 = 0.0;  // E[Y^4] - 3 Var^2
};

// Exact law of the q = 2 left-point sum Y = sum_{j<m} w_m dB1_j dB2_m over
// grid intervals [start, stop): Y = z1' (L' A L) z2 with C = L L' the
// increment covariance, so Y = sum sigma_i xi_i eta_i over the singular
// values of L' A L.
inline BilinearMoments discrete_q2(const fbmclt::TimeGrid& g, std::size_t start, std::size_t stop, double h) {
  const Eigen::Index n = static_cast<Eigen::Index>(stop - start);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a0 = g[start + i], a1 = g[start + i + 1];
      const double b0 = g[start + j], b1 = g[start + j + 1];
      c(i, j) = r(a1, b1, h) - r(a1, b0, h) - r(a0, b1, h) + r(a0, b0, h);
    }
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double w = std::pow(g[start + m], -2 * h);
    for (Eigen::Index j = 0; j < m; ++j) a(j, m) = w;
  }
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(c).matrixL();
  const Eigen::MatrixXd m = l.transpose() * a * l;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  BilinearMoments out;
  out.variance = sv.squaredNorm();
  out.kappa4 = 6.0 * sv.array().pow(4).sum();
  return out;
}

struct WindingMoments {
  double var_21;
  double cov_terms;
};

// Second moments of the left-point winding terms
// T21 = sum_m w_m (B2_m - B2_a) dB1_m and T12 with the components swapped,
// by Isserlis over independent components.
inline WindingMoments discrete_winding(const fbmclt::TimeGrid& g, std::size_t a, std::size_t e, double h) {
  WindingMoments out{0.0, 0.0};
  for (std::size_t m = a; m < e; ++m) {
    for (std::size_t n = a; n < e; ++n) {
      const double w = std::pow(g[m], -2 * h) * std::pow(g[n], -2 * h);
      // level(x) = B_x - B_a; inc(m) = B_{m+1} - B_m
      const double lev_lev = r(g[m], g[n], h) - r(g[m], g[a], h) - r(g[a], g[n], h) + r(g[a], g[a], h);
      const double inc_inc =
          r(g[m + 1], g[n + 1], h) - r(g[m + 1], g[n], h) - r(g[m], g[n + 1], h) + r(g[m], g[n], h);
      const double lev_m_inc_n = r(g[m], g[n + 1], h) - r(g[m], g[n], h) - r(g[a], g[n + 1], h) + r(g[a], g[n], h);
      const double inc_m_lev_n = r(g[m + 1], g[n], h) - r(g[m], g[n], h) - r(g[m + 1], g[a], h) + r(g[m], g[a], h);
      out.var_21 += w * lev_lev * inc_inc;
      out.cov_terms += w * lev_m_inc_n * inc_m_lev_n;
    }
  }
  return out;
}

}  // namespace oracle
