#include "fbmclt/importance.hpp"

namespace fbmclt {

EndpointMixture::EndpointMixture(double a, double b) : a_(a), b_(b) {
  if (!(a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0)) throw ConfigError("endpoint mixture exponents must lie in [0,1)");
  m0_ = std::pow(0.5, 1.0 - a_) / (1.0 - a_);
  m1_ = std::pow(0.5, 1.0 - b_) / (1.0 - b_);
  p0_ = m0_ / (m0_ + m1_);
}

UnitPoint EndpointMixture::sample(RandomStream& rs) const {
  const double pick = rs.uniform();
  const double u = rs.uniform();
  if (pick < p0_) {
    const double x = 0.5 * std::pow(u, 1.0 / (1.0 - a_));
    return {x, 1.0 - x};
  }
  const double y = 0.5 * std::pow(u, 1.0 / (1.0 - b_));
  return {1.0 - y, y};
}

double EndpointMixture::density(const UnitPoint& p) const {
  const double norm = m0_ + m1_;
  if (p.x <= 0.5) return std::pow(p.x, -a_) / norm;
  return std::pow(p.one_minus_x, -b_) / norm;
}

PairProposal::PairProposal(double h) : mix_(h, 2.0 - 2.0 * h) {}

double PairProposal::ratio_density(double z, double gap) const {
  if (z < 1.0) return 0.5 * mix_.density({z, gap});
  const double w = 1.0 / z;
  return 0.5 * mix_.density({w, gap / z}) / (z * z);
}

PairSample PairProposal::sample(RandomStream& rs, double lo, double hi) const {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("pair proposal needs 0 < lo < hi");
  const double log_span = std::log(hi / lo);
  const double x = lo * std::exp(log_span * rs.uniform());
  const bool invert = rs.uniform() < 0.5;
  const UnitPoint w = mix_.sample(rs);
  double z, rel_gap;
  if (!invert) {
    z = w.x;
    rel_gap = w.one_minus_x;
  } else {
    z = 1.0 / w.x;
    rel_gap = w.one_minus_x / w.x;
  }
  PairSample s;
  s.x = x;
  s.u = x * z;
  s.gap = x * rel_gap;
  s.density = ratio_density(z, rel_gap) / (x * x * log_span);
  return s;
}

BoxSample sample_box(RandomStream& rs, double h, double lo, double x_hi, double y_hi) {
  const double sx = x_hi - lo;
  const double sy = y_hi - lo;
  const double u_first = rs.uniform();
  const double u_gap = rs.uniform();
  const bool negative = rs.uniform() < 0.5;
  const bool x_short = sx <= sy;
  const double s_short = x_short ? sx : sy;
  const double s_long = x_short ? sy : sx;
  if (!(s_short > 0.0)) return {lo, lo, 0.0};
  const double e = 2.0 * h - 1.0;
  const double first = lo + s_short * u_first;
  const double gap = s_long * std::pow(u_gap, 1.0 / e);
  const double second = negative ? first - gap : first + gap;
  BoxSample out{x_short ? first : second, x_short ? second : first, 0.0};
  if (second < lo || second > lo + s_long) return out;
  out.weight = s_short * 2.0 * std::pow(s_long, e) / e;
  return out;
}

}  // namespace fbmclt
