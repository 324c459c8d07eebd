#include "fbmclt/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fbmclt {

std::string to_string(QuadMethod m) {
  return m == QuadMethod::adaptive_deterministic ? "adaptive_deterministic" : "simplex_mc";
}

namespace {

// Kronrod abscissae (descending) and weights; Gauss weights on the odd nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment qk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double result = resk * half;
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
  return {a, b, result, err};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, const AdaptiveOptions& opt) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate_adaptive: limits must be finite");
  QuadResult out;
  out.method = QuadMethod::adaptive_deterministic;
  if (a == b) {
    out.n_evals = 1;
    return out;
  }
  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;  // segments too narrow to split further
  Segment first = qk15(f, a, b);
  std::int64_t evals = 15;
  heap.push(first);
  double total = first.value;
  double total_err = first.error;

  auto summarize = [&]() {
    // Re-sum in a fixed order so the result does not depend on heap history.
    std::vector<Segment> all(frozen);
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    double v = 0.0, e = 0.0;
    for (const auto& s : all) {
      v += s.value;
      e += s.error;
    }
    out.value = v;
    out.error_estimate = e;
    out.n_evals = evals;
  };

  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (total_err <= target) break;
    if (heap.empty()) {
      summarize();
      throw ConvergenceError("adaptive quadrature: tolerance not reachable at machine resolution", out);
    }
    if (evals + 30 > opt.max_evals) {
      summarize();
      throw ConvergenceError("adaptive quadrature: evaluation budget of " + std::to_string(opt.max_evals) +
                                 " exhausted",
                             out);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = qk15(f, worst.a, mid);
    Segment right = qk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  summarize();
  if (!std::isfinite(out.value)) throw NumericalError("adaptive quadrature: non-finite integrand value");
  return out;
}

}  // namespace fbmclt
